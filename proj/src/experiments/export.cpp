#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"

#include <charconv>
#include <fstream>

namespace ncs {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_transmission_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::ofstream out = open_output(path);
  const std::size_t nodes = record.log.empty() ? 2 : record.log.front().e_abs.size();
  out << "t,node";
  for (std::size_t i = 1; i <= nodes; ++i) out << ",e" << i << "_abs";
  out << ",interval\n";
  for (const Transmission& tx : record.log) {
    out << format_number(tx.t) << ',' << tx.node;
    for (double v : tx.e_abs) out << ',' << format_number(v);
    out << ',' << format_number(tx.interval) << '\n';
  }
  finish(out, path);
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<EnsembleSummary>& rows) {
  std::ofstream out = open_output(path);
  out << "policy,mean_interval,min_dwell,runs,violations\n";
  for (const EnsembleSummary& s : rows)
    out << s.policy << ',' << format_number(s.mean_interval) << ',' << format_number(s.min_dwell)
        << ',' << s.runs << ',' << s.violations << '\n';
  finish(out, path);
}

void write_monitor_report(const std::filesystem::path& path,
                          const std::vector<RunRecord>& records) {
  std::ofstream out = open_output(path);
  out << "run policy jumps mean_interval min_dwell flow_viol jump_viol final_norm converged status\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    out << i << ' ' << r.policy << ' ';
    if (r.aborted) {
      out << "- - - - - - - aborted: " << r.error << '\n';
      continue;
    }
    out << r.jumps << ' ' << format_number(r.mean_interval) << ' '
        << format_number(r.monitor.dwell.min) << ' ' << r.monitor.flow_violations.size() << ' '
        << r.monitor.jump_violations.size() << ' ' << format_number(r.monitor.final_norm) << ' '
        << (r.monitor.converged ? "yes" : "no") << " ok\n";
    for (const FlowViolation& v : r.monitor.flow_violations)
      out << "  flow t=" << format_number(v.time.t) << " j=" << v.time.j
          << " increase=" << format_number(v.increase) << '\n';
    for (const JumpViolation& v : r.monitor.jump_violations)
      out << "  jump " << v.jump_index << " increase=" << format_number(v.increase) << '\n';
  }
  finish(out, path);
}

void export_outputs(const std::filesystem::path& dir, const std::vector<RunRecord>& records,
                    const std::vector<EnsembleSummary>& summaries) {
  if (records.empty()) throw Error("export_outputs: no run records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!records[i].log.empty())
      write_transmission_csv(dir / ("log_" + std::to_string(i) + ".csv"), records[i]);
  if (!summaries.empty()) write_summary_csv(dir / "summary.csv", summaries);
  write_monitor_report(dir / "monitor.txt", records);
}

}  // namespace ncs
