#pragma once

// The nldd command line. Kept in a header so tests can drive it in-process.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nldd/config.hpp"
#include "nldd/pipeline.hpp"

namespace nldd::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, numeric_error = 3, io_error = 4 };

/// Maps a library exception to the process exit code.
inline int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return config_error;
  if (dynamic_cast<const NumericError*>(&e)) return numeric_error;
  if (dynamic_cast<const IoError*>(&e)) return io_error;
  return failure;
}

inline std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, end - pos);
    out.push_back(units::parse(tok.find('%') == std::string::npos ? tok + " %" : tok,
                               units::Dimension::dimensionless, "--levels"));
    pos = end + 1;
  }
  return out;
}

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Damage detection in nonlinear dynamic systems", "nldd"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_windows, epochs;
  std::string levels;
  bool force = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (YAML)")->required();
    sub->add_option("--out", out_dir, "output directory (default: the config's output.dir)");
    sub->add_option("--seed", seed, "base seed override");
    sub->add_flag("--force", force, "overwrite existing outputs");
  };

  auto* simulate = app.add_subcommand("simulate", "build a dataset and its manifest");
  common(simulate);
  simulate->add_option("--n-windows", n_windows, "baseline record count override");
  simulate->add_option("--levels", levels, "damage levels in percent, e.g. 0,5,15,30");

  std::string kind, data;
  auto* train = app.add_subcommand("train", "train an ae or gan on a dataset");
  common(train);
  train->add_option("kind", kind, "ae or gan")->required()->check(CLI::IsMember({"ae", "gan"}));
  train->add_option("--data", data, "dataset file")->required();
  train->add_option("--epochs", epochs, "epoch count override");

  std::string model;
  std::vector<std::string> datasets;
  auto* detect = app.add_subcommand("detect", "score datasets with a trained model");
  common(detect);
  detect->add_option("--model", model, "model file")->required();
  detect->add_option("--data", datasets, "dataset file(s)")->required();

  auto* frc = app.add_subcommand("frc", "stepped-sine frequency response curves");
  common(frc);

  std::size_t window = 0;
  double f_lo = 1.0, f_hi = 40.0, f_step = 0.25;
  auto* scal = app.add_subcommand("scalogram", "Morlet scalogram of one stored window");
  common(scal);
  scal->add_option("--data", data, "dataset file")->required();
  scal->add_option("--window", window, "window index");
  scal->add_option("--f-min", f_lo, "lowest frequency, Hz");
  scal->add_option("--f-max", f_hi, "highest frequency, Hz");
  scal->add_option("--f-step", f_step, "frequency step, Hz");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    pipeline::Options opt;
    opt.out = out_dir;
    opt.force = force;
    opt.seed = seed;
    opt.n_windows = n_windows;
    opt.epochs = epochs;
    if (!levels.empty()) opt.levels = parse_levels(levels);
    const auto cfg = pipeline::apply(config::load(config_path), opt);

    if (*simulate) {
      const auto r = pipeline::cmd_simulate(cfg, force);
      out << "wrote " << r.dataset_path.string() << " (" << r.windows << " windows)\n"
          << "wrote " << r.manifest_path.string() << "\n";
    } else if (*train) {
      const auto r = pipeline::cmd_train(cfg, pipeline::parse_kind(kind), data, force);
      out << "wrote " << r.model_path.string() << "\nwrote " << r.history_path.string() << " (" << r.epochs
          << " epochs)\n";
    } else if (*detect) {
      std::vector<std::filesystem::path> paths(datasets.begin(), datasets.end());
      const auto r = pipeline::cmd_detect(cfg, model, paths, force);
      for (std::size_t i = 0; i < r.report.levels.size(); ++i)
        out << "level " << 100.0 * r.report.levels[i] << "%: mean " << r.report.means[i] << ", relative variation "
            << r.report.rel_variation[i] << "\n";
      out << "wrote " << r.scatter_path.string() << ", " << r.trend_path.string() << ", "
          << r.dof_trend_path.string() << ", " << r.figure_path.string() << "\n";
    } else if (*frc) {
      const auto r = pipeline::cmd_frc(cfg, force);
      for (const auto& cv : r.curves)
        out << "A=" << cv.amplitude_g << "g d=" << 100.0 * cv.damage << "% " << analysis::to_string(cv.direction)
            << ": peak " << analysis::peak_frequency(cv.points) << " Hz\n";
      out << "wrote " << r.csv_path.string() << ", " << r.figure_path.string() << "\n";
    } else if (*scal) {
      const auto r = pipeline::cmd_scalogram(cfg, data, window, f_lo, f_hi, f_step, force);
      out << "wrote " << r.csv_path.string() << ", " << r.figure_path.string() << "\n";
    }
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (model " << e.tag() << ", epoch " << e.epoch() << ")\n";
    return numeric_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return ok;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}

}  // namespace nldd::cli
