#pragma once

#include <cstdio>
#include <limits>
#include <ostream>

#include "granulite/morpho/metrics.hpp"

namespace granulite::morpho {

struct GradationRow {
  double threshold = 0.0;
  double percent_finer = 0.0;
};

struct GradationReport {
  std::vector<GradationRow> rows;
  std::size_t particle_count = 0;
};

// Cumulative percent of particles whose intermediate dimension d2 is strictly
// below each threshold. An unbounded row is appended when the last threshold
// leaves particles unaccounted for.
inline GradationReport gradation_report(const std::vector<ParticleMetrics>& metrics, const std::vector<double>& thresholds) {
  if (metrics.empty()) throw EmptyInput("gradation needs at least one particle");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1])) throw Error("gradation thresholds must be strictly ascending");
  std::vector<double> sizes;
  for (const auto& m : metrics) sizes.push_back(m.d2());
  std::sort(sizes.begin(), sizes.end());
  GradationReport report;
  report.particle_count = sizes.size();
  const double n = static_cast<double>(sizes.size());
  for (double t : thresholds) {
    const auto finer = std::lower_bound(sizes.begin(), sizes.end(), t) - sizes.begin();
    report.rows.push_back({t, 100.0 * static_cast<double>(finer) / n});
  }
  if (report.rows.empty() || report.rows.back().percent_finer < 100.0)
    report.rows.push_back({std::numeric_limits<double>::infinity(), 100.0});
  return report;
}

namespace detail {
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace detail

inline void write_metrics_csv(std::ostream& os, const std::vector<ParticleMetrics>& metrics) {
  os << "segment_id,face_count,surface_area,d1,d2,d3,elongation,flatness\n";
  for (const auto& m : metrics)
    os << m.segment_id << ',' << m.face_count << ',' << detail::fmt("%.10g", m.surface_area) << ',' << detail::fmt("%.10g", m.d1())
       << ',' << detail::fmt("%.10g", m.d2()) << ',' << detail::fmt("%.10g", m.d3()) << ',' << detail::fmt("%.6f", m.elongation)
       << ',' << detail::fmt("%.6f", m.flatness) << '\n';
}

inline void write_gradation_csv(std::ostream& os, const GradationReport& report) {
  os << "threshold,percent_finer\n";
  for (const auto& r : report.rows)
    os << (std::isinf(r.threshold) ? std::string("inf") : detail::fmt("%.10g", r.threshold)) << ','
       << detail::fmt("%.4f", r.percent_finer) << '\n';
}

inline void write_metrics_table(std::ostream& os, const std::vector<ParticleMetrics>& metrics) {
  char line[160];
  std::snprintf(line, sizeof line, "%8s %8s %12s %10s %10s %10s %8s %8s\n", "segment", "faces", "area", "d1", "d2", "d3", "elong",
                "flat");
  os << line;
  for (const auto& m : metrics) {
    std::snprintf(line, sizeof line, "%8d %8zu %12.5g %10.5g %10.5g %10.5g %8.3f %8.3f\n", m.segment_id, m.face_count, m.surface_area,
                  m.d1(), m.d2(), m.d3(), m.elongation, m.flatness);
    os << line;
  }
}

inline void write_gradation_table(std::ostream& os, const GradationReport& report) {
  char line[96];
  std::snprintf(line, sizeof line, "%12s %14s   (%zu particles)\n", "size (d2)", "percent finer", report.particle_count);
  os << line;
  for (const auto& r : report.rows) {
    if (std::isinf(r.threshold)) std::snprintf(line, sizeof line, "%12s %14.2f\n", "inf", r.percent_finer);
    else std::snprintf(line, sizeof line, "%12.5g %14.2f\n", r.threshold, r.percent_finer);
    os << line;
  }
}

}  // namespace granulite::morpho
