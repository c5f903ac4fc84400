#pragma once

// Turns per-window scores into damage-sensitivity outputs: per-level means,
// damage index, relative variation and the scatter/trend CSV rows.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nldd/error.hpp"

namespace nldd::detector {

enum class Kind { ae, gan };

inline std::string to_string(Kind k) { return k == Kind::ae ? "ae" : "gan"; }

/// DI = 1 - mean discriminator output.
inline double damage_index(std::span<const double> outputs) {
  if (outputs.empty()) throw DomainError("damage_index: empty output list");
  return 1.0 - std::accumulate(outputs.begin(), outputs.end(), 0.0) / static_cast<double>(outputs.size());
}

/// ae: (m_d - m_0) / m_0 on mean reconstruction losses.
/// gan: (DI_d - DI_0) / (1 - DI_0) on damage indices.
inline double relative_variation(double level, double baseline, Kind kind) {
  if (kind == Kind::ae) {
    if (baseline == 0.0) throw DomainError("relative_variation: zero ae baseline");
    return (level - baseline) / baseline;
  }
  if (baseline == 1.0) throw DomainError("relative_variation: gan baseline damage index is 1");
  return (level - baseline) / (1.0 - baseline);
}

/// Elementwise mean across DOF score lists.
inline std::vector<double> aggregate_dofs(const std::vector<std::vector<double>>& per_dof) {
  if (per_dof.empty()) return {};
  const std::size_t n = per_dof.front().size();
  for (const auto& d : per_dof)
    if (d.size() != n) throw ContractError("aggregate_dofs: DOF score lists differ in length");
  std::vector<double> out(n, 0.0);
  for (const auto& d : per_dof)
    for (std::size_t i = 0; i < n; ++i) out[i] += d[i];
  for (auto& v : out) v /= static_cast<double>(per_dof.size());
  return out;
}

/// Ranks starting at 1; ties share their average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("spearman: size mismatch");
  if (x.size() < 2) throw DomainError("spearman: need at least two points");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n, my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct ScoreRow {
  double level = 0.0;
  std::size_t window_id = 0;
  std::size_t dof = 0;
  double score = 0.0;
};

struct DetectionReport {
  Kind kind = Kind::ae;
  std::vector<ScoreRow> rows;  // sorted by level, then input order
  std::vector<double> levels;  // ascending, starts at 0
  std::vector<double> means;   // mean score per level
  double baseline = 0.0;
  std::vector<double> damage_index;  // gan only: 1 - mean per level
  std::vector<double> rel_variation;
  std::size_t dofs = 1;
  std::vector<std::vector<double>> dof_means;  // [dof][level]
  std::vector<std::vector<double>> dof_rel_variation;
};

namespace detail {
inline std::vector<double> variations(const std::vector<double>& means, Kind kind) {
  std::vector<double> out;
  if (kind == Kind::ae) {
    for (double m : means) out.push_back(relative_variation(m, means.front(), kind));
  } else {
    for (double m : means) out.push_back(relative_variation(1.0 - m, 1.0 - means.front(), kind));
  }
  return out;
}
}  // namespace detail

/// Groups rows by level. Level means average every row, which equals the
/// mean of the DOF-aggregated scores when each DOF has the same count.
inline DetectionReport build_report(std::vector<ScoreRow> rows, Kind kind) {
  DetectionReport r;
  r.kind = kind;
  std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) { return a.level < b.level; });
  if (rows.empty() || rows.front().level != 0.0) throw DomainError("build_report: undamaged baseline level 0 missing");
  for (const auto& row : rows) r.dofs = std::max(r.dofs, row.dof + 1);

  std::map<double, std::vector<std::vector<double>>> by_level;
  for (const auto& row : rows) {
    auto& per = by_level[row.level];
    per.resize(r.dofs);
    per[row.dof].push_back(row.score);
  }
  r.dof_means.assign(r.dofs, {});
  for (auto& [level, per] : by_level) {
    per.resize(r.dofs);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t d = 0; d < r.dofs; ++d) {
      const auto& s = per[d];
      if (s.empty()) throw DomainError("build_report: a DOF has no scores at some level");
      sum += std::accumulate(s.begin(), s.end(), 0.0);
      count += s.size();
      r.dof_means[d].push_back(std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()));
    }
    r.levels.push_back(level);
    r.means.push_back(sum / static_cast<double>(count));
  }
  r.baseline = r.means.front();
  if (kind == Kind::gan)
    for (double m : r.means) r.damage_index.push_back(1.0 - m);
  r.rel_variation = detail::variations(r.means, kind);
  for (const auto& dm : r.dof_means) r.dof_rel_variation.push_back(detail::variations(dm, kind));
  r.rows = std::move(rows);
  return r;
}

/// Shortest round-trip decimal form, so reruns give byte-identical files.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_scatter_csv(const DetectionReport& r, std::ostream& os) {
  os << "kind,level,window_id,dof,score\n";
  for (const auto& row : r.rows)
    os << to_string(r.kind) << ',' << format_number(row.level) << ',' << row.window_id << ',' << row.dof << ','
       << format_number(row.score) << '\n';
}

inline void write_trend_csv(const DetectionReport& r, std::ostream& os) {
  os << "kind,level,mean,rel_variation\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    os << to_string(r.kind) << ',' << format_number(r.levels[i]) << ',' << format_number(r.means[i]) << ','
       << format_number(r.rel_variation[i]) << '\n';
}

inline void write_dof_trend_csv(const DetectionReport& r, std::ostream& os) {
  os << "kind,level,dof,mean,rel_variation\n";
  for (std::size_t d = 0; d < r.dofs; ++d)
    for (std::size_t i = 0; i < r.levels.size(); ++i)
      os << to_string(r.kind) << ',' << format_number(r.levels[i]) << ',' << d << ','
         << format_number(r.dof_means[d][i]) << ',' << format_number(r.dof_rel_variation[d][i]) << '\n';
}

}  // namespace nldd::detector
