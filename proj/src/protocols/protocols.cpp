#include "ncs/protocols.hpp"

#include "ncs/errors.hpp"
#include "ncs/sampling.hpp"

#include <cmath>
#include <string>

namespace ncs {

namespace {

void check_dimension(const Vector& e, const NodePartition& partition) {
  if (e.size() != partition.dimension())
    throw DimensionMismatch("error vector has dimension " + std::to_string(e.size()) +
                            ", partition covers " + std::to_string(partition.dimension()));
}

Vector zero_node(const Vector& e, const NodePartition& partition, std::size_t node) {
  Vector out = e;
  out.segment(partition.offset(node), partition.size(node)).setZero();
  return out;
}

}  // namespace

std::size_t tod_select(const Vector& e, const NodePartition& partition) {
  check_dimension(e, partition);
  std::size_t best = 0;
  double best_norm = partition.node_norm(e, 0);
  for (std::size_t i = 1; i < partition.nodes(); ++i) {
    const double n = partition.node_norm(e, i);
    if (n > best_norm) {
      best = i;
      best_norm = n;
    }
  }
  return best;
}

Vector tod_jump(std::uint64_t, const Vector& e, const NodePartition& partition) {
  return zero_node(e, partition, tod_select(e, partition));
}

Vector rr_jump(std::uint64_t kappa, const Vector& e, const NodePartition& partition) {
  check_dimension(e, partition);
  return zero_node(e, partition, static_cast<std::size_t>(kappa % partition.nodes()));
}

ProtocolCertificate tod_certificate(std::size_t nodes) {
  ProtocolCertificate c;
  c.W = [](std::uint64_t, const Vector& e) { return e.norm(); };
  c.gradient = [](std::uint64_t, const Vector& e) {
    const double n = e.norm();
    return n == 0.0 ? Vector(Vector::Zero(e.size())) : Vector(e / n);
  };
  const double l = static_cast<double>(nodes);
  c.rho = std::sqrt((l - 1.0) / l);
  return c;
}

Vector Protocol::jump(std::uint64_t kappa, const Vector& e) const {
  check_dimension(e, partition);
  return zero_node(e, partition, select(kappa, e));
}

double Protocol::W(std::uint64_t kappa, const Vector& e) const {
  if (!certificate) throw ConfigError("protocol '" + name + "' has no Lyapunov certificate");
  return certificate->W(kappa, e);
}

double Protocol::rho() const {
  if (!certificate) throw ConfigError("protocol '" + name + "' has no Lyapunov certificate");
  return certificate->rho;
}

Protocol make_tod_protocol(const NodePartition& partition) {
  Protocol p;
  p.name = "tod";
  p.partition = partition;
  p.select = [partition](std::uint64_t, const Vector& e) { return tod_select(e, partition); };
  p.certificate = tod_certificate(partition.nodes());
  return p;
}

Protocol make_rr_protocol(const NodePartition& partition,
                          std::optional<ProtocolCertificate> certificate) {
  Protocol p;
  p.name = "rr";
  p.partition = partition;
  const std::size_t l = partition.nodes();
  p.select = [l](std::uint64_t kappa, const Vector&) { return static_cast<std::size_t>(kappa % l); };
  p.certificate = std::move(certificate);
  return p;
}

Protocol make_protocol(const std::string& name, const NodePartition& partition) {
  if (name == "tod") return make_tod_protocol(partition);
  if (name == "rr") return make_rr_protocol(partition);
  throw ConfigError("unknown protocol '" + name + "' (expected tod or rr)");
}

double contraction_ratio(const Protocol& protocol, std::uint64_t kappa, const Vector& e) {
  const Vector next = protocol.jump(kappa, e);
  return protocol.W(kappa + 1, next) / protocol.W(kappa, e);
}

ContractionReport verify_ugas_contraction(const Protocol& protocol, std::size_t samples,
                                          double radius, std::uint64_t seed) {
  ContractionReport report;
  report.rho = protocol.rho();
  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> kappa_dist(0, 2 * protocol.nodes() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector e = sample_in_ball(rng, protocol.partition.dimension(), radius);
    const std::uint64_t kappa = kappa_dist(rng);
    if (protocol.W(kappa, e) == 0.0) continue;
    const double ratio = contraction_ratio(protocol, kappa, e);
    ++report.samples;
    if (ratio > report.worst_ratio || report.samples == 1) {
      report.worst_ratio = ratio;
      report.worst = {kappa, e, ratio};
    }
    if (ratio > report.rho + 1e-12) report.violations.push_back({kappa, e, ratio});
  }
  return report;
}

}  // namespace ncs
