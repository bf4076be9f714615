#pragma once

/**
 * @file model.hpp
 * @brief Plant, controller, holds and node partition of a networked loop
 *
 * The closed loop is written in the coordinates x = (x_P, x_C) and
 * e = (e_xP, e_u), where e is the difference between the values held
 * on the network side and the true values. Between transmissions
 *
 *   x_P' = f_P(x_P, u_hat),  x_C' = f_C(x_C, x_hat_P),
 *   u_hat = g_C(x_C, x_hat_P) + e_u,  x_hat_P = x_P + e_xP,
 *
 * and e evolves as the hold generators minus the true-value derivatives.
 */

#include "ncs/hybrid.hpp"
#include "ncs/polynomial.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncs {

struct PlantModel {
  Eigen::Index n_p = 0;
  Eigen::Index n_u = 0;
  std::function<Vector(const Vector& x_p, const Vector& u)> f;
};

struct ControllerModel {
  Eigen::Index n_c = 0;
  std::function<Vector(const Vector& x_c, const Vector& x_hat)> f;
  std::function<Vector(const Vector& x_c, const Vector& x_hat)> g;
  /// Jacobians of g; central differences are used when absent.
  std::function<Eigen::MatrixXd(const Vector& x_c, const Vector& x_hat)> dg_dxc;
  std::function<Eigen::MatrixXd(const Vector& x_c, const Vector& x_hat)> dg_dxhat;
};

/// Inter-transmission generators for x_hat_P and u_hat. Empty functions
/// mean zero-order hold.
struct HoldModel {
  using Generator = std::function<Vector(const Vector& x_p, const Vector& x_c,
                                         const Vector& x_hat, const Vector& u_hat)>;
  Generator f_hat_p;
  Generator f_hat_c;

  bool zero_order() const { return !f_hat_p && !f_hat_c; }
};

/// Index ranges of the l nodes inside e.
class NodePartition {
 public:
  /// `sizes[i]` is the dimension of node i; nodes are laid out contiguously.
  explicit NodePartition(std::vector<Eigen::Index> sizes);

  std::size_t nodes() const { return sizes_.size(); }
  Eigen::Index dimension() const { return dim_; }
  Eigen::Index offset(std::size_t node) const { return offsets_[node]; }
  Eigen::Index size(std::size_t node) const { return sizes_[node]; }

  /// Euclidean norm of node i's sub-vector.
  double node_norm(const Vector& e, std::size_t node) const;

 private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dim_ = 0;
};

struct NcsSystem {
  PlantModel plant;
  ControllerModel controller;
  HoldModel hold;
  NodePartition partition{{1}};
  /// False when the controller is wired directly to the actuator: u is not
  /// sent over the network and e carries only plant-state errors.
  bool networked_input = true;

  Eigen::Index n_x() const { return plant.n_p + controller.n_c; }
  Eigen::Index n_e() const { return plant.n_p + (networked_input ? plant.n_u : 0); }

  /// Throws DimensionMismatch when the partition does not cover e.
  void validate() const;
};

struct ClosedLoopRates {
  Vector x_dot;
  Vector e_dot;
};

ClosedLoopRates closed_loop_flow(const NcsSystem& sys, const Vector& x, const Vector& e);

/// A smooth scalar function of x with its gradient.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Jet engine compressor (Moore-Greitzer reduction) with the static
/// stabilizing law u = 4 x1 - 4 x2 - 9/2 x1^2 - 3/2 x1^3; two sensor nodes,
/// controller collocated with the actuator, zero-order holds.
NcsSystem jet_engine_system();

/// Design data published with the jet engine example.
struct JetEngineDesign {
  SmoothFunction lyapunov;      ///< V(x) = x1^2/2 + (x2 - 3 x1)^2/2
  Polynomial alpha;             ///< ISS decay rate, 0.066 s
  Polynomial gamma;             ///< ISS gain in |e|
  Polynomial gamma_tilde;       ///< threshold gain in W = |e|
  Polynomial delta;             ///< threshold decay, 0.01 s
  double eta0 = 5000.0;
  double period = 0.010;        ///< time-triggered baseline
  std::vector<double> sigma_eta;    ///< self-trigger coefficients for gamma_tilde(W) - eta
  std::vector<double> sigma_lyap;   ///< self-trigger coefficients for gamma_tilde(W) - V
  double t_star = 1e-3;
  double epsilon = 1e-4;
};

JetEngineDesign jet_engine_design();

/// Scalar plant x' = u with u = -2 x_hat sent over the network: one sensor
/// node and one actuator node. Used to exercise the clock-variable trigger.
NcsSystem scalar_clock_fixture();

/// Constants for the scalar fixture: W = |e| satisfies
///   W' <= L W + H(x),  V' <= -rho(|x|) - rho(|e|) - H(x)^2 + G W^2
/// with V = 9/4 x^2, H = 2|x|, rho(s) = s^2 / 2.
struct ScalarClockDesign {
  SmoothFunction lyapunov;
  double L = 0.0;
  double G = 0.0;
  std::function<double(const Vector& x)> H;
  double a = 1.0;
};

ScalarClockDesign scalar_clock_design();

}  // namespace ncs
