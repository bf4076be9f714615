#pragma once

/**
 * @file protocols.hpp
 * @brief Scheduling protocols: which node transmits at a transmission instant
 *
 * A protocol maps (kappa, e) to the post-transmission error, zeroing the
 * sub-vector of exactly one node. A UGAS certificate is a function W with
 * W(kappa + 1, jump(kappa, e)) <= rho W(kappa, e).
 */

#include "ncs/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncs {

struct ProtocolCertificate {
  std::function<double(std::uint64_t kappa, const Vector& e)> W;
  /// dW/de, used for closed-form Lie derivatives.
  std::function<Vector(std::uint64_t kappa, const Vector& e)> gradient;
  double rho = 1.0;
};

struct Protocol {
  std::string name;
  NodePartition partition{{1}};
  std::function<std::size_t(std::uint64_t kappa, const Vector& e)> select;
  std::optional<ProtocolCertificate> certificate;

  std::size_t nodes() const { return partition.nodes(); }
  /// Zeroes the selected node; other entries are copied unchanged.
  Vector jump(std::uint64_t kappa, const Vector& e) const;
  double W(std::uint64_t kappa, const Vector& e) const;
  double rho() const;
};

/// Node with the largest |e_i|; ties go to the lowest index.
std::size_t tod_select(const Vector& e, const NodePartition& partition);

Vector tod_jump(std::uint64_t kappa, const Vector& e, const NodePartition& partition);
Vector rr_jump(std::uint64_t kappa, const Vector& e, const NodePartition& partition);

/// W = |e| with rho = sqrt((l - 1) / l).
ProtocolCertificate tod_certificate(std::size_t nodes);

Protocol make_tod_protocol(const NodePartition& partition);
/// Round robin ships without a certificate; pass one to use it with the
/// event-triggered policies.
Protocol make_rr_protocol(const NodePartition& partition,
                          std::optional<ProtocolCertificate> certificate = std::nullopt);
/// "tod" or "rr"; throws ConfigError otherwise.
Protocol make_protocol(const std::string& name, const NodePartition& partition);

/// W(kappa + 1, jump(kappa, e)) / W(kappa, e).
double contraction_ratio(const Protocol& protocol, std::uint64_t kappa, const Vector& e);

struct ContractionSample {
  std::uint64_t kappa = 0;
  Vector e;
  double ratio = 0.0;
};

struct ContractionReport {
  std::size_t samples = 0;
  double rho = 0.0;
  double worst_ratio = 0.0;
  ContractionSample worst;
  std::vector<ContractionSample> violations;
};

/// Samples e uniformly in the radius ball and kappa uniformly in
/// {0, ..., 2l - 1}; any ratio above rho + 1e-12 is a violation.
ContractionReport verify_ugas_contraction(const Protocol& protocol, std::size_t samples,
                                          double radius, std::uint64_t seed);

}  // namespace ncs
