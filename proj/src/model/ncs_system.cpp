#include "ncs/errors.hpp"
#include "ncs/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ncs {

NodePartition::NodePartition(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DimensionMismatch("node partition needs at least one node");
  offsets_.reserve(sizes_.size());
  for (Eigen::Index s : sizes_) {
    if (s <= 0) throw DimensionMismatch("node sizes must be positive");
    offsets_.push_back(dim_);
    dim_ += s;
  }
}

double NodePartition::node_norm(const Vector& e, std::size_t node) const {
  return e.segment(offsets_[node], sizes_[node]).norm();
}

void NcsSystem::validate() const {
  if (partition.dimension() != n_e())
    throw DimensionMismatch("node partition covers " + std::to_string(partition.dimension()) +
                            " error components, system has " + std::to_string(n_e()));
}

namespace {

// Central differences with step 1e-6 (1 + |arg_i|), one column per argument.
template <typename Fn>
Eigen::MatrixXd numeric_jacobian(Fn&& g, const Vector& arg, Eigen::Index rows) {
  Eigen::MatrixXd jac(rows, arg.size());
  Vector probe = arg;
  for (Eigen::Index i = 0; i < arg.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(arg[i]));
    probe[i] = arg[i] + h;
    const Vector up = g(probe);
    probe[i] = arg[i] - h;
    const Vector down = g(probe);
    probe[i] = arg[i];
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

}  // namespace

ClosedLoopRates closed_loop_flow(const NcsSystem& sys, const Vector& x, const Vector& e) {
  const Eigen::Index n_p = sys.plant.n_p, n_c = sys.controller.n_c, n_u = sys.plant.n_u;
  if (x.size() != sys.n_x() || e.size() != sys.n_e())
    throw DimensionMismatch("closed_loop_flow: got x of size " + std::to_string(x.size()) +
                            " and e of size " + std::to_string(e.size()) + ", expected " +
                            std::to_string(sys.n_x()) + " and " + std::to_string(sys.n_e()));

  const Vector x_p = x.head(n_p);
  const Vector x_c = x.tail(n_c);
  const Vector x_hat = x_p + e.head(n_p);
  Vector u_hat = sys.controller.g(x_c, x_hat);
  if (sys.networked_input) u_hat += e.tail(n_u);

  ClosedLoopRates out;
  out.x_dot.resize(sys.n_x());
  const Vector x_p_dot = sys.plant.f(x_p, u_hat);
  out.x_dot.head(n_p) = x_p_dot;
  Vector x_c_dot = Vector::Zero(n_c);
  if (n_c > 0) {
    x_c_dot = sys.controller.f(x_c, x_hat);
    out.x_dot.tail(n_c) = x_c_dot;
  }

  out.e_dot.resize(sys.n_e());
  const Vector f_hat_p =
      sys.hold.f_hat_p ? sys.hold.f_hat_p(x_p, x_c, x_hat, u_hat) : Vector::Zero(n_p);
  out.e_dot.head(n_p) = f_hat_p - x_p_dot;

  if (sys.networked_input) {
    // e_u = u_hat - g_C(x_C, x_hat_P): chain rule through both arguments of g_C.
    Vector e_u_dot =
        sys.hold.f_hat_c ? sys.hold.f_hat_c(x_p, x_c, x_hat, u_hat) : Vector::Zero(n_u);
    if (n_c > 0) {
      const Eigen::MatrixXd dg_dxc =
          sys.controller.dg_dxc
              ? sys.controller.dg_dxc(x_c, x_hat)
              : numeric_jacobian([&](const Vector& v) { return sys.controller.g(v, x_hat); },
                                 x_c, n_u);
      e_u_dot -= dg_dxc * x_c_dot;
    }
    if (sys.hold.f_hat_p) {
      const Eigen::MatrixXd dg_dxhat =
          sys.controller.dg_dxhat
              ? sys.controller.dg_dxhat(x_c, x_hat)
              : numeric_jacobian([&](const Vector& v) { return sys.controller.g(x_c, v); },
                                 x_hat, n_u);
      e_u_dot -= dg_dxhat * f_hat_p;
    }
    out.e_dot.tail(n_u) = e_u_dot;
  }
  return out;
}

}  // namespace ncs
