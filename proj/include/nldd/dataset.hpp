#pragma once

// Windowing, normalization, train/validation splits, benchmark corpus
// construction and the NLDS binary dataset format.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nldd/binary_io.hpp"
#include "nldd/dynamics.hpp"
#include "nldd/error.hpp"
#include "nldd/excitation.hpp"
#include "nldd/time_series.hpp"

namespace nldd::dataset {

enum class Split : std::uint8_t { unassigned = 0, train = 1, val = 2, score = 3 };

struct WindowMeta {
  std::string system;
  std::uint32_t dof = 0;
  /// Record the window was cut from. Windows of different DOFs that share a
  /// source are simultaneous.
  std::uint32_t source = 0;
  std::uint32_t segment = 0;
  double damage = 0.0;
  double peak = 0.0;  // excitation peak, m/s^2
  std::uint64_t seed = 0;

  bool operator==(const WindowMeta&) const = default;
};

/// Extremes of the raw window before min-max scaling.
struct ScaleRecord {
  double min = 0.0;
  double max = 0.0;
  bool degenerate = false;

  bool operator==(const ScaleRecord&) const = default;
};

struct Window {
  std::vector<double> values;
  WindowMeta meta;
  ScaleRecord scale;
  Split split = Split::unassigned;

  bool operator==(const Window&) const = default;
};

struct Dataset {
  std::vector<Window> windows;
  std::size_t window_len = 500;
  double rate = 250.0;

  std::size_t size() const noexcept { return windows.size(); }

  std::vector<const Window*> select(Split s) const {
    std::vector<const Window*> out;
    for (const auto& w : windows)
      if (w.split == s) out.push_back(&w);
    return out;
  }

  /// Sorted distinct damage levels.
  std::vector<double> levels() const {
    std::vector<double> out;
    for (const auto& w : windows) out.push_back(w.meta.damage);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool operator==(const Dataset&) const = default;
};

// ---------------------------------------------------------------------------

/// Non-overlapping consecutive windows; the trailing remainder is dropped.
/// Values are raw; the scale record holds their extremes.
inline std::vector<Window> segment(const TimeSeries& series, std::size_t window_len) {
  if (window_len == 0) throw DomainError("segment: window_len must be > 0");
  if (series.samples.size() < window_len) {
    std::ostringstream os;
    os << "segment: series of " << series.samples.size() << " samples is shorter than window_len " << window_len;
    throw DomainError(os.str());
  }
  const std::size_t count = series.samples.size() / window_len;
  std::vector<Window> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto first = series.samples.begin() + static_cast<std::ptrdiff_t>(k * window_len);
    out[k].values.assign(first, first + static_cast<std::ptrdiff_t>(window_len));
    const auto [lo, hi] = std::minmax_element(out[k].values.begin(), out[k].values.end());
    out[k].scale = {*lo, *hi, false};
    out[k].meta.segment = static_cast<std::uint32_t>(k);
  }
  return out;
}

/// Maps the window to [0,1] with its own extremes. Constant windows become
/// all 0.5 and are flagged degenerate.
inline Window minmax_normalize(Window w) {
  if (w.values.empty()) throw DomainError("minmax_normalize: empty window");
  const auto [lo_it, hi_it] = std::minmax_element(w.values.begin(), w.values.end());
  const double lo = *lo_it, hi = *hi_it;
  w.scale = {lo, hi, false};
  if (hi == lo) {
    w.scale.degenerate = true;
    std::fill(w.values.begin(), w.values.end(), 0.5);
    return w;
  }
  const double span = hi - lo;
  for (auto& v : w.values) v = (v - lo) / span;
  return w;
}

/// Inverse of minmax_normalize using the stored scale record.
inline std::vector<double> denormalize(const Window& w) {
  std::vector<double> out(w.values.size());
  if (w.scale.degenerate) {
    std::fill(out.begin(), out.end(), w.scale.min);
    return out;
  }
  const double span = w.scale.max - w.scale.min;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.scale.min + w.values[i] * span;
  return out;
}

/// Random train/validation partition. Windows sharing a source (the DOFs of
/// one record) stay together; counts refer to sources: round(N f) train, the
/// remainder validation.
inline Dataset split(Dataset ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw DomainError("split: train_fraction must be in (0,1]");
  if (ds.windows.size() < 2) throw DomainError("split: need at least 2 windows");
  std::vector<std::uint32_t> sources;
  for (const auto& w : ds.windows) sources.push_back(w.meta.source);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::mt19937_64 rng(seed);
  std::shuffle(sources.begin(), sources.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(sources.size()) * train_fraction));
  std::vector<std::uint32_t> train(sources.begin(), sources.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(train.begin(), train.end());
  for (auto& w : ds.windows)
    w.split = std::binary_search(train.begin(), train.end(), w.meta.source) ? Split::train : Split::val;
  return ds;
}

// ---------------------------------------------------------------------------
// Benchmark corpora

struct BenchmarkSpec {
  std::vector<double> levels{0.0};
  std::size_t windows_per_level = 2000;
  excitation::AmplitudeRange amplitude{0.01, 0.1};
  double noise_level = 0.1;
  std::size_t window_len = 500;
  dynamics::SimulationOptions sim{};  // sim.output_rate is the window sampling rate
  std::uint64_t seed = 1;

  void validate() const {
    if (levels.empty()) throw DomainError("benchmark: no damage levels");
    for (double d : levels) dynamics::check_damage(d);
    if (windows_per_level == 0) throw DomainError("benchmark: windows_per_level must be > 0");
    amplitude.validate();
    if (!(noise_level >= 0.0)) throw DomainError("benchmark: noise_level must be >= 0");
    if (window_len == 0) throw DomainError("benchmark: window_len must be > 0");
  }
  double duration() const { return static_cast<double>(window_len) / sim.output_rate; }
};

/// One simulated record before windowing.
struct Record {
  double peak = 0.0;
  std::uint64_t seed = 0;
  std::vector<TimeSeries> clean;  // per DOF
  std::vector<TimeSeries> noisy;  // per DOF
};

/// Deterministic per-record seed; depends on the damage level value (not its
/// position in the list) so a level reproduces across differently-shaped runs.
inline std::uint64_t record_seed(std::uint64_t base, double level, std::size_t index) {
  return derive_seed(base, {static_cast<std::uint64_t>(std::llround(level * 1e6)), index});
}

/// Draws an amplitude, generates white-noise base acceleration at the internal
/// rate, scales it to that peak, simulates the damaged model and contaminates
/// each DOF's decimated displacement with measurement noise.
inline Record generate_record(const dynamics::SystemModel& model, const BenchmarkSpec& spec, double level,
                              std::size_t index) {
  Record r;
  r.seed = record_seed(spec.seed, level, index);
  r.peak = excitation::draw_amplitude(spec.amplitude, derive_seed(r.seed, SeedTag::amplitude));
  const auto n_exc = static_cast<std::size_t>(std::llround(spec.duration() / spec.sim.dt_int));
  auto accel = excitation::white_noise(n_exc, spec.sim.dt_int, derive_seed(r.seed, SeedTag::excitation));
  accel = excitation::scale_to_peak(accel, r.peak);
  r.clean = dynamics::simulate(model, accel, level, spec.sim);
  for (std::size_t d = 0; d < r.clean.size(); ++d)
    r.noisy.push_back(excitation::add_measurement_noise(r.clean[d], spec.noise_level,
                                                        derive_seed(r.seed, SeedTag::measurement_noise, d)));
  return r;
}

/// Builds windows_per_level records for every level. Window order: level,
/// record index, DOF, segment. Each record gets its own source id.
inline Dataset build_benchmark(const dynamics::SystemModel& model, const BenchmarkSpec& spec) {
  spec.validate();
  dynamics::validate(model);
  Dataset ds;
  ds.window_len = spec.window_len;
  ds.rate = spec.sim.output_rate;
  const std::string system(dynamics::model_name(model));
  std::uint32_t source = 0;
  for (double level : spec.levels) {
    for (std::size_t i = 0; i < spec.windows_per_level; ++i) {
      const Record r = generate_record(model, spec, level, i);
      for (std::size_t d = 0; d < r.noisy.size(); ++d) {
        for (auto& w : segment(r.noisy[d], spec.window_len)) {
          w = minmax_normalize(std::move(w));
          w.meta.system = system;
          w.meta.dof = static_cast<std::uint32_t>(d);
          w.meta.source = source;
          w.meta.damage = level;
          w.meta.peak = r.peak;
          w.meta.seed = r.seed;
          ds.windows.push_back(std::move(w));
        }
      }
      ++source;
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// NLDS binary format

inline constexpr std::string_view kDatasetMagic = "NLDS";
inline constexpr std::uint32_t kDatasetVersion = 1;

inline void save(const Dataset& ds, const std::filesystem::path& path) {
  binary::Writer w;
  w.bytes(kDatasetMagic);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(ds.windows.size()));
  w.u32(static_cast<std::uint32_t>(ds.window_len));
  w.f64(ds.rate);
  for (const auto& win : ds.windows) {
    if (win.values.size() != ds.window_len) throw ContractError("save: window length differs from dataset");
    w.string(win.meta.system);
    w.u32(win.meta.dof);
    w.u32(win.meta.source);
    w.u32(win.meta.segment);
    w.f64(win.meta.damage);
    w.f64(win.meta.peak);
    w.u64(win.meta.seed);
    w.f64(win.scale.min);
    w.f64(win.scale.max);
    w.u8(win.scale.degenerate ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(win.split));
    w.f64s(win.values);
  }
  w.finish(path);
}

inline Dataset load(const std::filesystem::path& path) {
  binary::Reader r(path, kDatasetMagic);
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw VersionError("unsupported dataset version " + std::to_string(version) + " in " + path.string());
  }
  Dataset ds;
  const std::uint32_t count = r.u32();
  ds.window_len = r.u32();
  ds.rate = r.f64();
  // Each window needs at least this many bytes; reject absurd counts early.
  const std::size_t min_bytes = 4 + 3 * 4 + 5 * 8 + 2 + 8 * ds.window_len;
  if (static_cast<std::size_t>(count) * min_bytes > r.remaining()) throw TruncationError("file truncated: " + path.string());
  ds.windows.resize(count);
  for (auto& win : ds.windows) {
    win.meta.system = r.string();
    win.meta.dof = r.u32();
    win.meta.source = r.u32();
    win.meta.segment = r.u32();
    win.meta.damage = r.f64();
    win.meta.peak = r.f64();
    win.meta.seed = r.u64();
    win.scale.min = r.f64();
    win.scale.max = r.f64();
    win.scale.degenerate = r.u8() != 0;
    const std::uint8_t sp = r.u8();
    if (sp > 3) throw FormatError("invalid split tag in " + path.string());
    win.split = static_cast<Split>(sp);
    win.values = r.f64s(ds.window_len);
  }
  r.finish();
  return ds;
}

// ---------------------------------------------------------------------------
// Delimited text ingestion

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool has_comma_like = line.find_first_of(",;") != std::string::npos;
  auto flush = [&](bool keep_empty) {
    if (!cur.empty() || keep_empty) out.push_back(cur);
    cur.clear();
  };
  for (char c : line) {
    if (c == ',' || c == ';') {
      flush(true);
    } else if (c == ' ' || c == '\t' || c == '\r') {
      if (!has_comma_like) flush(false);
    } else {
      cur.push_back(c);
    }
  }
  flush(has_comma_like);
  return out;
}

inline bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace detail

/// Reads a delimited text file (comma, semicolon, tab or whitespace), one
/// column per channel. A non-numeric first row is treated as a header.
/// Every channel is optionally band-pass filtered, then segmented into
/// window_len windows and normalized.
inline Dataset ingest_external(const std::filesystem::path& path, std::size_t window_len, double rate,
                               double damage = 0.0, const std::string& system = "external",
                               std::optional<std::pair<double, double>> band = std::nullopt) {
  if (!(rate > 0.0)) throw DomainError("ingest_external: rate must be > 0");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::vector<double>> columns;
  std::string line;
  std::size_t row = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++row;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty() || (tokens.size() == 1 && tokens[0].empty())) continue;
    std::vector<double> values(tokens.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!detail::parse_number(tokens[i], values[i])) {
        numeric = false;
        bad = i;
        break;
      }
    }
    if (!numeric) {
      if (first_content_row) {
        first_content_row = false;
        continue;  // header
      }
      std::ostringstream os;
      os << path.string() << ":" << row << ": non-numeric cell '" << tokens[bad] << "' in column " << bad + 1;
      throw ParseError(os.str(), row);
    }
    first_content_row = false;
    if (columns.empty()) columns.resize(values.size());
    if (values.size() != columns.size()) {
      std::ostringstream os;
      os << path.string() << ":" << row << ": expected " << columns.size() << " columns, found " << values.size();
      throw ParseError(os.str(), row);
    }
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
  }
  if (columns.empty()) throw DomainError("ingest_external: no numeric rows in " + path.string());

  Dataset ds;
  ds.window_len = window_len;
  ds.rate = rate;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    TimeSeries ts{std::move(columns[c]), 1.0 / rate};
    if (band) ts = excitation::bandpass(ts, band->first, band->second);
    for (auto& w : segment(ts, window_len)) {
      w = minmax_normalize(std::move(w));
      w.meta.system = system;
      w.meta.dof = static_cast<std::uint32_t>(c);
      w.meta.source = w.meta.segment;
      w.meta.damage = damage;
      ds.windows.push_back(std::move(w));
    }
  }
  return ds;
}

}  // namespace nldd::dataset
