#pragma once

// CSV and text reports of a run. Every number goes through format_real so
// that repeated runs produce byte-identical files.

#include "dynsamp/config.hpp"
#include "dynsamp/core.hpp"
#include "dynsamp/experiment.hpp"
#include "dynsamp/sampling.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace dynsamp {

inline void write_events_csv(std::ostream& os, const ExperimentResult& r) {
  os << "event_id,algorithm,t_hat,trigger_delta,sampler_id,f_hat,ground_truth_inner,thm_bound,abs_error\n";
  const auto& events = r.detection.events;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const BoundRow* rows_for_event = nullptr;
    for (const auto& row : r.rows) {
      if (row.event_id && *row.event_id == e) {
        rows_for_event = &row;
        break;
      }
    }
    for (std::size_t k = 0; k < events[e].f_hat.size(); ++k) {
      os << e << ',' << to_string(events[e].algorithm) << ',' << format_real(events[e].t_hat) << ','
         << format_real(events[e].trigger_delta) << ',' << k << ',' << format_real(events[e].f_hat[k]) << ',';
      if (rows_for_event) {
        const BoundRow& row = r.rows[static_cast<std::size_t>(rows_for_event - r.rows.data()) + k];
        os << format_real(row.truth) << ',' << format_real(row.bound) << ',' << format_real(row.empirical_error);
      } else {
        os << ",,";
      }
      os << '\n';
    }
  }
}

inline void write_bounds_csv(std::ostream& os, const std::string& scenario_id, const ExperimentResult& r) {
  os << "scenario_id,sampler_id,burst_id,empirical_error,bound_thm,margin\n";
  for (const auto& row : r.rows) {
    os << scenario_id << ',' << row.sampler_id << ',' << row.burst_id << ',' << format_real(row.empirical_error)
       << ',' << format_real(row.bound) << ',' << format_real(row.margin()) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "beta,max_error,bound\n";
  for (const auto& r : rows) os << format_real(r.beta) << ',' << format_real(r.max_error) << ',' << format_real(r.bound) << '\n';
}

inline void write_ground_truth_csv(std::ostream& os, const std::vector<std::vector<Real>>& truth) {
  os << "burst_id,sampler_id,inner\n";
  for (std::size_t j = 0; j < truth.size(); ++j) {
    for (std::size_t k = 0; k < truth[j].size(); ++k) os << j << ',' << k << ',' << format_real(truth[j][k]) << '\n';
  }
}

inline void write_summary(std::ostream& os, const RunConfig& c, const ExperimentResult& r) {
  os << "run " << c.name << " (" << to_string(c.mode) << ")\n";
  os << "beta " << format_real(c.beta) << ", horizon " << format_real(c.horizon) << ", sigma " << format_real(c.sigma)
     << ", seed " << c.seed << "\n";
  os << "validation: " << (r.validation.passed() ? "passed" : "FAILED") << "\n" << r.validation.describe();
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    os << "threshold sampler " << k << ": " << format_real(r.thresholds[k]) << "\n";
  }
  if (r.eps) os << "epsilon: " << format_real(*r.eps) << "\n";
  os << "scan stopped at t = " << format_real(r.detection.scan_end) << (r.detection.truncated ? " (end of data)" : "")
     << "\n";
  os << "events: " << r.detection.events.size() << "\n";
  for (const auto& e : r.detection.events) {
    os << "  t_hat = " << format_real(e.t_hat) << ", trigger sampler " << e.trigger_sampler << ", delta "
       << format_real(e.trigger_delta) << "\n";
  }
  for (std::size_t j = 0; j < r.burst_event.size(); ++j) {
    os << "burst " << j << " at t = " << format_real(c.bursts[j].time) << ": ";
    if (r.burst_event[j]) {
      os << "detected at " << format_real(r.detection.events[*r.burst_event[j]].t_hat);
    } else {
      os << "missed";
    }
    if (std::find(r.undetectable.begin(), r.undetectable.end(), j) != r.undetectable.end()) {
      os << " (undetectable window: within 4 beta of the horizon)";
    }
    os << "\n";
  }
  if (!r.unmatched_events.empty()) os << "events without a matching burst: " << r.unmatched_events.size() << "\n";
  os << "max recovery error " << format_real(r.max_error()) << ", max bound " << format_real(r.max_bound())
     << ", all within bounds: " << (r.within_bounds() ? "yes" : "no") << "\n";
}

namespace detail {
inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}
inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}
}  // namespace detail

/// measurements.csv, events.csv, bounds.csv, summary.txt and config.json in `dir`.
inline void write_run_outputs(const std::filesystem::path& dir, const RunConfig& c, const ExperimentResult& r) {
  detail::ensure_dir(dir);
  {
    auto f = detail::open_output(dir / "measurements.csv");
    write_measurements_csv(f, r.series);
  }
  {
    auto f = detail::open_output(dir / "events.csv");
    write_events_csv(f, r);
  }
  {
    auto f = detail::open_output(dir / "bounds.csv");
    write_bounds_csv(f, c.name, r);
  }
  {
    auto f = detail::open_output(dir / "summary.txt");
    write_summary(f, c, r);
  }
  {
    auto f = detail::open_output(dir / "config.json");
    f << config_to_json(c).dump(2) << '\n';
  }
}

}  // namespace dynsamp
