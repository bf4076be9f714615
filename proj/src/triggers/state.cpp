#include "ncs/errors.hpp"
#include "ncs/triggers.hpp"

#include <string>

namespace ncs {

Vector pack(const NcsState& s, const StateLayout& layout) {
  if (s.x.size() != layout.n_x || s.e.size() != layout.n_e)
    throw DimensionMismatch("pack: state dimensions do not match the layout");
  Vector q(layout.size());
  q.head(layout.n_x) = s.x;
  q.segment(layout.n_x, layout.n_e) = s.e;
  q[layout.kappa_index()] = static_cast<double>(s.kappa);
  q[layout.eta_index()] = s.eta;
  if (layout.clocks) {
    q[layout.tau1_index()] = s.tau1;
    q[layout.tau2_index()] = s.tau2;
  }
  return q;
}

NcsState unpack(const Vector& q, const StateLayout& layout) {
  if (q.size() != layout.size())
    throw DimensionMismatch("unpack: vector has dimension " + std::to_string(q.size()) +
                            ", layout expects " + std::to_string(layout.size()));
  NcsState s;
  s.x = layout.x(q);
  s.e = layout.e(q);
  s.kappa = layout.kappa(q);
  s.eta = layout.eta(q);
  if (layout.clocks) {
    s.tau1 = q[layout.tau1_index()];
    s.tau2 = q[layout.tau2_index()];
  }
  return s;
}

Vector EventTriggeredModel::initial_state(const Vector& x0) const {
  NcsState s;
  s.x = x0;
  s.e = Vector::Zero(layout.n_e);
  s.eta = eta0;
  return pack(s, layout);
}

}  // namespace ncs
