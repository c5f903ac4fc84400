#pragma once

// Experiment commands: simulate, train, detect, frc, scalogram. Each writes
// its outputs into a directory and refuses to overwrite unless forced.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nldd/analysis.hpp"
#include "nldd/autoencoder.hpp"
#include "nldd/config.hpp"
#include "nldd/dataset.hpp"
#include "nldd/detector.hpp"
#include "nldd/gan.hpp"
#include "nldd/nn/serialize.hpp"
#include "nldd/samples.hpp"
#include "nldd/svg.hpp"

namespace nldd::pipeline {

namespace fs = std::filesystem;
using detector::format_number;

struct Options {
  fs::path out;  // empty: the config's output directory
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_windows;
  std::optional<std::size_t> epochs;
  std::optional<std::vector<double>> levels;
};

/// Applies command-line overrides to a loaded config.
inline config::ExperimentConfig apply(config::ExperimentConfig c, const Options& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.n_windows) {
    if (*o.n_windows == 0) throw ConfigError("--n-windows: must be >= 1");
    c.benchmark.windows_per_level = *o.n_windows;
    const auto n_train = static_cast<std::size_t>(std::llround(c.train_fraction * static_cast<double>(*o.n_windows)));
    c.score_windows = std::max<std::size_t>(1, *o.n_windows - n_train);
  }
  if (o.epochs) {
    if (*o.epochs == 0) throw ConfigError("--epochs: must be >= 1");
    c.ae.max_epochs = *o.epochs;
    c.gan.epochs = *o.epochs;
  }
  if (o.levels) {
    if (o.levels->empty()) throw ConfigError("--levels: must not be empty");
    for (double d : *o.levels)
      if (!(d >= 0.0 && d < 1.0)) throw ConfigError("--levels: values must lie in [0, 1)");
    c.benchmark.levels = *o.levels;
  }
  if (!o.out.empty()) c.out_dir = o.out;
  return c;
}

namespace detail {

inline void claim(const std::vector<fs::path>& outputs, bool force) {
  for (const auto& p : outputs)
    if (fs::exists(p) && !force) throw IoError("output exists (use --force to overwrite): " + p.string());
  if (!outputs.empty()) {
    std::error_code ec;
    fs::create_directories(outputs.front().parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + outputs.front().parent_path().string() + ": " + ec.message());
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline double percent(double level) { return 100.0 * level; }

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate

/// Baseline windows are split into train/validation; damaged windows are
/// marked for scoring only.
inline dataset::Dataset build_dataset(const config::ExperimentConfig& c) {
  dataset::Dataset out;
  bool has_baseline = false;
  if (c.external) {
    std::uint32_t offset = 0;
    for (const auto& f : c.external->files) {
      auto ds = dataset::ingest_external(f.path, c.benchmark.window_len, c.external->rate, f.damage, "external",
                                         c.external->band);
      if (ds.windows.empty()) throw DomainError("no complete window in " + f.path.string());
      if (f.damage == 0.0) {
        ds = dataset::split(std::move(ds), c.train_fraction, derive_seed(c.seed, SeedTag::split));
        has_baseline = true;
      } else {
        for (auto& w : ds.windows) w.split = dataset::Split::score;
      }
      std::uint32_t top = 0;
      for (auto& w : ds.windows) {
        w.meta.source += offset;
        top = std::max(top, w.meta.source + 1);
      }
      offset = top;
      out.window_len = ds.window_len;
      out.rate = ds.rate;
      for (auto& w : ds.windows) out.windows.push_back(std::move(w));
    }
    if (!has_baseline) throw ConfigError("data.files: no undamaged (damage 0) file");
    return out;
  }

  dataset::BenchmarkSpec spec = c.benchmark;
  spec.seed = c.seed;
  out.window_len = spec.window_len;
  out.rate = spec.sim.output_rate;
  std::uint32_t offset = 0;
  for (double level : c.benchmark.levels) {
    spec.levels = {level};
    spec.windows_per_level = level == 0.0 ? c.benchmark.windows_per_level : c.score_windows;
    auto ds = dataset::build_benchmark(*c.model, spec);
    if (level == 0.0) {
      if (ds.windows.size() >= 2) ds = dataset::split(std::move(ds), c.train_fraction, derive_seed(c.seed, SeedTag::split));
    } else {
      for (auto& w : ds.windows) w.split = dataset::Split::score;
    }
    std::uint32_t top = offset;
    for (auto& w : ds.windows) {
      w.meta.source += offset;
      top = std::max(top, w.meta.source + 1);
    }
    offset = top;
    for (auto& w : ds.windows) out.windows.push_back(std::move(w));
  }
  return out;
}

inline nlohmann::ordered_json manifest(const config::ExperimentConfig& c, const dataset::Dataset& ds) {
  nlohmann::ordered_json m;
  m["name"] = c.name;
  m["seed"] = c.seed;
  m["seed_scheme"] = "record seed = derive(seed, level*1e6, index); split seed = derive(seed, split)";
  m["system"] = c.system_name();
  if (c.model) {
    nlohmann::ordered_json p;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, dynamics::Duffing1Params>) {
            p = {{"mass_kg", s.mass}, {"damping_Ns_per_m", s.damping}, {"k1_N_per_m", s.k1}, {"k3_N_per_m3", s.k3}};
          } else if constexpr (std::is_same_v<T, dynamics::Duffing2Params>) {
            p = {{"m1_kg", s.m1},         {"m2_kg", s.m2},         {"c1_Ns_per_m", s.c1},    {"c2_Ns_per_m", s.c2},
                 {"k11_N_per_m", s.k11}, {"k21_N_per_m", s.k21}, {"k13_N_per_m3", s.k13}, {"k23_N_per_m3", s.k23}};
          } else {
            p = {{"mass_kg", s.mass},         {"damping_Ns_per_m", s.damping}, {"ki_N_per_m", s.ki},
                 {"kn_N_per_m", s.kn},        {"k3_N_per_m3", s.k3},           {"xu_m", s.xu},
                 {"xm_m", s.xm},              {"xf_m", s.xf},                  {"bw_alpha", s.bw_alpha},
                 {"bw_beta_per_m", s.bw_beta}, {"bw_gamma_per_m", s.bw_gamma}, {"bw_n", s.bw_n},
                 {"ks_N_per_m", s.ks},        {"km_N_per_m", s.km},            {"yield_force_N", s.yield_force},
                 {"sma_alpha", s.sma_alpha},  {"sma_ys", s.sma_ys},            {"sma_a_tilde", s.sma_a_tilde},
                 {"sma_cs_per_m", s.sma_cs},  {"sma_ns", s.sma_ns}};
          }
        },
        *c.model);
    m["parameters"] = p;
    m["excitation"] = {{"amplitude_min_g", c.benchmark.amplitude.lo}, {"amplitude_max_g", c.benchmark.amplitude.hi}};
    m["simulation"] = {{"dt_s", c.benchmark.sim.dt_int},
                       {"rate_hz", c.benchmark.sim.output_rate},
                       {"blowup_bound", c.benchmark.sim.blowup_bound}};
  } else {
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : c.external->files) files.push_back({{"path", f.path.string()}, {"damage", f.damage}});
    m["data"] = {{"rate_hz", c.external->rate}, {"files", files}};
    if (c.external->band) m["data"]["band_hz"] = {c.external->band->first, c.external->band->second};
  }
  m["dataset"] = {{"window_len", c.benchmark.window_len},
                  {"noise_level", c.benchmark.noise_level},
                  {"levels", c.benchmark.levels},
                  {"baseline_records", c.benchmark.windows_per_level},
                  {"records_per_damaged_level", c.score_windows},
                  {"train_fraction", c.train_fraction}};
  std::size_t train = 0, val = 0, score = 0;
  for (const auto& w : ds.windows) {
    train += w.split == dataset::Split::train;
    val += w.split == dataset::Split::val;
    score += w.split == dataset::Split::score;
  }
  m["counts"] = {{"windows", ds.windows.size()}, {"train", train}, {"val", val}, {"score", score}};
  m["config_dir"] = c.base_dir.string();
  m["config_yaml"] = c.source;
  return m;
}

/// Rebuilds the exact configuration recorded in a manifest.
inline config::ExperimentConfig config_from_manifest(const nlohmann::ordered_json& m) {
  try {
    auto c = config::parse(m.at("config_yaml").get<std::string>(), m.at("config_dir").get<std::string>());
    c.seed = m.at("seed").get<std::uint64_t>();
    const auto& d = m.at("dataset");
    c.benchmark.levels = d.at("levels").get<std::vector<double>>();
    c.benchmark.windows_per_level = d.at("baseline_records").get<std::size_t>();
    c.score_windows = d.at("records_per_damaged_level").get<std::size_t>();
    c.train_fraction = d.at("train_fraction").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

inline config::ExperimentConfig config_from_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  try {
    return config_from_manifest(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
}

struct SimulateResult {
  fs::path dataset_path, manifest_path;
  std::size_t windows = 0;
};

inline SimulateResult cmd_simulate(const config::ExperimentConfig& c, bool force) {
  SimulateResult r{c.out_dir / "dataset.nlds", c.out_dir / "manifest.json"};
  detail::claim({r.dataset_path, r.manifest_path}, force);
  const auto ds = build_dataset(c);
  dataset::save(ds, r.dataset_path);
  detail::write_text(r.manifest_path, manifest(c, ds).dump(2) + "\n");
  r.windows = ds.windows.size();
  return r;
}

// ---------------------------------------------------------------------------
// train

enum class ModelKind { ae, gan };

inline ModelKind parse_kind(const std::string& s) {
  if (s == "ae") return ModelKind::ae;
  if (s == "gan") return ModelKind::gan;
  throw ConfigError("model kind must be ae or gan, got '" + s + "'");
}

inline std::string to_string(ModelKind k) { return k == ModelKind::ae ? "ae" : "gan"; }

inline dataset::Dataset load_dataset(const fs::path& path, std::size_t window_len) {
  if (!fs::exists(path)) throw IoError("dataset not found: " + path.string());
  auto ds = dataset::load(path);
  if (ds.window_len != window_len)
    throw DomainError("window-length mismatch: dataset " + path.string() + " has " + std::to_string(ds.window_len) +
                      ", config expects " + std::to_string(window_len));
  return ds;
}

struct TrainResult {
  fs::path model_path, history_path;
  std::size_t epochs = 0;
};

inline std::map<std::string, std::string> model_metadata(const config::ExperimentConfig& c, ModelKind k) {
  const std::size_t channels = k == ModelKind::ae ? c.ae.channels : c.gan.channels;
  return {{"kind", to_string(k)},
          {"system", c.system_name()},
          {"name", c.name},
          {"seed", std::to_string(c.seed)},
          {"window_len", std::to_string(c.benchmark.window_len)},
          {"channels", std::to_string(channels)},
          {"latent", std::to_string(k == ModelKind::ae ? c.ae.latent : c.gan.latent)}};
}

inline TrainResult cmd_train(const config::ExperimentConfig& c, ModelKind kind, const fs::path& data, bool force) {
  const std::string k = to_string(kind);
  TrainResult r{c.out_dir / (k + ".nlnn"), c.out_dir / (k + "_history.csv")};
  const auto ds = load_dataset(data, c.benchmark.window_len);
  detail::claim({r.model_path, r.history_path}, force);
  const auto train_w = ds.select(dataset::Split::train);
  if (train_w.empty()) throw DomainError("dataset " + data.string() + " has no training windows");
  std::ostringstream hist;
  if (kind == ModelKind::ae) {
    const auto val_w = ds.select(dataset::Split::val);
    if (val_w.empty()) throw DomainError("dataset " + data.string() + " has no validation windows");
    auto a = ae::build_ae(c.ae, c.seed);
    const auto rep = ae::train_ae(a, make_samples(train_w, c.ae.channels).inputs,
                                  make_samples(val_w, c.ae.channels).inputs, c.seed);
    hist << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < rep.train_loss.size(); ++e)
      hist << e + 1 << ',' << format_number(rep.train_loss[e]) << ',' << format_number(rep.val_loss[e]) << '\n';
    r.epochs = rep.train_loss.size();
    auto meta = model_metadata(c, kind);
    meta["best_epoch"] = std::to_string(rep.best_epoch);
    nn::save_model(r.model_path, {&a.encoder, &a.decoder}, meta);
  } else {
    auto g = gan::build_gan(c.gan, c.seed);
    const auto h = gan::train_gan(g, make_samples(train_w, c.gan.channels).inputs, c.seed);
    hist << "epoch,d_loss,g_loss,d_real,d_fake\n";
    for (std::size_t e = 0; e < h.d_loss.size(); ++e)
      hist << e + 1 << ',' << format_number(h.d_loss[e]) << ',' << format_number(h.g_loss[e]) << ','
           << format_number(h.d_real[e]) << ',' << format_number(h.d_fake[e]) << '\n';
    r.epochs = h.d_loss.size();
    nn::save_model(r.model_path, {&g.generator, &g.discriminator}, model_metadata(c, kind));
  }
  detail::write_text(r.history_path, hist.str());
  return r;
}

// ---------------------------------------------------------------------------
// detect

struct LoadedModel {
  ModelKind kind;
  std::size_t channels = 1, window_len = 0;
  std::optional<ae::AutoEncoder> autoencoder;
  std::optional<gan::Gan> gan;
};

inline LoadedModel load_trained(const fs::path& path, const config::ExperimentConfig& c) {
  if (!fs::exists(path)) throw IoError("model not found: " + path.string());
  auto file = nn::load_model(path);
  const auto it = file.metadata.find("kind");
  if (it == file.metadata.end()) throw FormatError("model file lacks a kind: " + path.string());
  LoadedModel m;
  m.kind = parse_kind(it->second);
  if (m.kind == ModelKind::ae) {
    ae::AutoEncoder a{c.ae, file.network("encoder"), file.network("decoder")};
    m.channels = a.encoder.input_shape().frames;
    m.window_len = a.encoder.input_shape().length;
    a.config.channels = m.channels;
    a.config.window_len = m.window_len;
    m.autoencoder = std::move(a);
  } else {
    gan::Gan g{c.gan, file.network("generator"), file.network("discriminator")};
    m.channels = g.discriminator.input_shape().frames;
    m.window_len = g.discriminator.input_shape().length;
    g.config.channels = m.channels;
    g.config.window_len = m.window_len;
    g.config.latent = g.generator.input_shape().length;
    m.gan = std::move(g);
  }
  return m;
}

/// Scores every non-training window. Window ids count samples within a
/// (level, DOF) group, so the DOFs of one record share an id.
inline std::vector<detector::ScoreRow> score_rows(LoadedModel& m, const std::vector<const dataset::Window*>& windows) {
  std::map<double, std::vector<const dataset::Window*>> by_level;
  for (const auto* w : windows)
    if (w->split != dataset::Split::train) by_level[w->meta.damage].push_back(w);
  std::vector<detector::ScoreRow> rows;
  for (const auto& [level, ws] : by_level) {
    const auto set = make_samples(ws, m.channels);
    std::vector<std::vector<double>> per;  // per[i][c]
    if (m.kind == ModelKind::ae) {
      per = ae::score_ae_channels(*m.autoencoder, set.inputs);
    } else {
      for (double p : gan::discriminate(*m.gan, set.inputs)) per.push_back(std::vector<double>(m.channels, p));
    }
    std::map<std::uint32_t, std::uint32_t> next_id;
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t ch = 0; ch < set.members[i].size(); ++ch) {
        const auto dof = set.members[i][ch]->meta.dof;
        const std::uint32_t id = m.channels == 1 ? next_id[dof]++ : static_cast<std::uint32_t>(i);
        rows.push_back({level, id, dof, per[i][m.channels == 1 ? 0 : ch]});
      }
    }
  }
  return rows;
}

inline svg::Plot detection_figure(const detector::DetectionReport& r, const std::string& title) {
  const bool ae_kind = r.kind == detector::Kind::ae;
  svg::Plot p;
  p.title = title;
  p.xlabel = "damage level (%)";
  p.ylabel = ae_kind ? "reconstruction MAE" : "discriminator output";
  double spacing = 5.0;
  for (std::size_t i = 1; i < r.levels.size(); ++i)
    spacing = std::min(spacing, detail::percent(r.levels[i] - r.levels[i - 1]));
  for (std::size_t d = 0; d < r.dofs; ++d) {
    svg::Series s;
    s.label = r.dofs > 1 ? "samples, DOF " + std::to_string(d + 1) : "samples";
    s.line = false;
    s.markers = true;
    s.opacity = 0.35;
    for (const auto& row : r.rows) {
      if (row.dof != d) continue;
      // deterministic spread around the level
      const double u = static_cast<double>((row.window_id * 2654435761u) % 1000u) / 1000.0 - 0.5;
      s.x.push_back(detail::percent(row.level) + 0.5 * spacing * u);
      s.y.push_back(row.score);
    }
    p.series.push_back(std::move(s));
  }
  svg::Series trend;
  trend.label = "level mean";
  trend.markers = true;
  trend.color = "#000000";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    trend.x.push_back(detail::percent(r.levels[i]));
    trend.y.push_back(r.means[i]);
  }
  p.series.push_back(std::move(trend));
  return p;
}

struct DetectResult {
  fs::path scatter_path, trend_path, dof_trend_path, figure_path;
  detector::DetectionReport report;
};

inline DetectResult cmd_detect(const config::ExperimentConfig& c, const fs::path& model_path,
                               const std::vector<fs::path>& data, bool force) {
  if (data.empty()) throw ConfigError("detect: at least one dataset is required");
  auto m = load_trained(model_path, c);
  const std::string k = to_string(m.kind);
  DetectResult r{c.out_dir / (k + "_scatter.csv"), c.out_dir / (k + "_trend.csv"), c.out_dir / (k + "_dof_trend.csv"),
                 c.out_dir / (k + "_detection.svg")};
  std::vector<dataset::Dataset> sets;
  for (const auto& p : data) sets.push_back(load_dataset(p, m.window_len));
  detail::claim({r.scatter_path, r.trend_path, r.dof_trend_path, r.figure_path}, force);
  std::vector<const dataset::Window*> windows;
  for (const auto& s : sets)
    for (const auto& w : s.windows) windows.push_back(&w);
  r.report = detector::build_report(score_rows(m, windows),
                                    m.kind == ModelKind::ae ? detector::Kind::ae : detector::Kind::gan);
  std::ostringstream scatter, trend, dof;
  detector::write_scatter_csv(r.report, scatter);
  detector::write_trend_csv(r.report, trend);
  detector::write_dof_trend_csv(r.report, dof);
  detail::write_text(r.scatter_path, scatter.str());
  detail::write_text(r.trend_path, trend.str());
  detail::write_text(r.dof_trend_path, dof.str());
  svg::write(svg::render(detection_figure(r.report, c.name + ": " + k + " damage scores")), r.figure_path);
  return r;
}

// ---------------------------------------------------------------------------
// frc

struct FrcCurve {
  double amplitude_g = 0.0, damage = 0.0;
  analysis::Direction direction = analysis::Direction::up;
  std::vector<analysis::FRCPoint> points;
};

inline std::vector<FrcCurve> run_frc(const config::ExperimentConfig& c) {
  if (!c.model) throw ConfigError("frc: requires a simulated system (system.model is external)");
  const auto grid = analysis::frequency_grid(c.frc.f_min, c.frc.f_max, c.frc.step);
  std::vector<FrcCurve> out;
  for (double a : c.frc.amplitudes_g)
    for (double d : c.frc.damages)
      for (auto dir : c.frc.directions) out.push_back({a, d, dir, analysis::frc_sweep(*c.model, a, grid, dir, d, c.frc.sweep)});
  return out;
}

inline void write_frc_csv(const std::vector<FrcCurve>& curves, std::ostream& os) {
  os << "amplitude_g,damage,direction,dof,frequency_hz,amplitude_m\n";
  for (const auto& cv : curves)
    for (const auto& p : cv.points)
      os << format_number(cv.amplitude_g) << ',' << format_number(cv.damage) << ',' << analysis::to_string(cv.direction)
         << ',' << p.dof << ',' << format_number(p.frequency) << ',' << format_number(p.amplitude) << '\n';
}

inline svg::Plot frc_figure(const std::vector<FrcCurve>& curves, const std::string& title) {
  svg::Plot p;
  p.title = title;
  p.xlabel = "frequency (Hz)";
  p.ylabel = "peak displacement (mm)";
  for (const auto& cv : curves) {
    std::map<std::size_t, svg::Series> by_dof;
    for (const auto& pt : cv.points) {
      auto& s = by_dof[pt.dof];
      s.x.push_back(pt.frequency);
      s.y.push_back(1e3 * pt.amplitude);
    }
    for (auto& [dof, s] : by_dof) {
      std::ostringstream label;
      label << "A=" << cv.amplitude_g << "g d=" << 100.0 * cv.damage << "% " << analysis::to_string(cv.direction);
      if (by_dof.size() > 1) label << " x" << dof + 1;
      s.label = label.str();
      if (cv.direction == analysis::Direction::up) {
        std::reverse(s.x.begin(), s.x.end());
        std::reverse(s.y.begin(), s.y.end());
      }
      p.series.push_back(std::move(s));
    }
  }
  return p;
}

struct FrcResult {
  fs::path csv_path, figure_path;
  std::vector<FrcCurve> curves;
};

inline FrcResult cmd_frc(const config::ExperimentConfig& c, bool force) {
  FrcResult r{c.out_dir / "frc.csv", c.out_dir / "frc.svg"};
  if (!c.model) throw ConfigError("frc: requires a simulated system (system.model is external)");
  analysis::frequency_grid(c.frc.f_min, c.frc.f_max, c.frc.step);
  detail::claim({r.csv_path, r.figure_path}, force);
  r.curves = run_frc(c);
  std::ostringstream csv;
  write_frc_csv(r.curves, csv);
  detail::write_text(r.csv_path, csv.str());
  svg::write(svg::render(frc_figure(r.curves, c.name + ": frequency response")), r.figure_path);
  return r;
}

// ---------------------------------------------------------------------------
// scalogram

struct ScalogramResult {
  fs::path csv_path, figure_path;
};

/// Scalogram of one stored window (normalized values, dataset rate).
inline ScalogramResult cmd_scalogram(const config::ExperimentConfig& c, const fs::path& data, std::size_t index,
                                     double f_min, double f_max, double f_step, bool force) {
  const auto ds = load_dataset(data, c.benchmark.window_len);
  if (index >= ds.windows.size())
    throw DomainError("window index " + std::to_string(index) + " out of range (" + std::to_string(ds.windows.size()) +
                      " windows)");
  const auto freqs = analysis::frequency_grid(f_min, f_max, f_step);
  const auto& w = ds.windows[index];
  const auto s = analysis::cwt_scalogram(TimeSeries{w.values, 1.0 / ds.rate}, freqs);
  ScalogramResult r{c.out_dir / "scalogram.csv", c.out_dir / "scalogram.svg"};
  detail::claim({r.csv_path, r.figure_path}, force);
  const auto mag = s.magnitude();
  std::ostringstream csv;
  csv << "frequency_hz,time_s,magnitude\n";
  for (std::size_t i = 0; i < freqs.size(); ++i)
    for (std::size_t t = 0; t < s.times.size(); ++t)
      csv << format_number(freqs[i]) << ',' << format_number(s.times[t]) << ',' << format_number(mag[i][t]) << '\n';
  detail::write_text(r.csv_path, csv.str());
  svg::Heatmap h;
  std::ostringstream title;
  title << c.name << ": scalogram, window " << index << ", damage " << 100.0 * w.meta.damage << "%";
  h.title = title.str();
  h.xlabel = "time (s)";
  h.ylabel = "frequency (Hz)";
  h.x = s.times;
  h.y = freqs;
  h.z = mag;
  svg::write(svg::render(h), r.figure_path);
  return r;
}

}  // namespace nldd::pipeline
