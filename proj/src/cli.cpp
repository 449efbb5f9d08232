/*
 * Copyright 2026 The M-GAM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mgam/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgam/augment.hpp"
#include "mgam/dataset.hpp"
#include "mgam/error.hpp"
#include "mgam/eval.hpp"
#include "mgam/model.hpp"
#include "mgam/solver.hpp"
#include "mgam/synth.hpp"
#include "mgam/theory.hpp"

namespace mgam::cli {
namespace {

using ojson = nlohmann::ordered_json;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Empty path or "-" means the command's output stream.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_lambda_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad lambda value '" + item + "'");
    }
  }
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "empty grid");
  return grid;
}

// Data input shared by most subcommands.
struct DataArgs {
  std::string data;
  std::string label = "label";
  std::string encoding;

  void add(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--data", data, "input CSV");
    if (required) opt->required();
    app->add_option("--label", label, "label column name")
        ->capture_default_str();
    app->add_option("--encoding", encoding, "missingness encoding JSON");
  }
  EncodingMap enc() const {
    return encoding.empty() ? EncodingMap{} : load_encoding_json(encoding);
  }
  Dataset load() const { return load_csv(data, label, enc()); }
};

// Pipeline settings: --config JSON first, then explicit flags on top.
struct PipelineArgs {
  std::string config;
  int quantiles = 8;
  bool no_indicators = false;
  bool no_interactions = false;
  bool overall = false;
  bool no_specific = false;
  bool no_dedup = false;
  std::size_t max_support = 100;
  int max_sweeps = 1000;
  CLI::App* app = nullptr;

  void add(CLI::App* a) {
    app = a;
    a->add_option("--config", config, "pipeline config JSON");
    a->add_option("--quantiles", quantiles, "thresholds per feature");
    a->add_flag("--no-indicators", no_indicators, "omit missingness indicators");
    a->add_flag("--no-interactions", no_interactions,
                "omit missingness interactions");
    a->add_flag("--overall", overall, "add any-reason columns");
    a->add_flag("--no-specific", no_specific, "omit per-reason columns");
    a->add_flag("--no-dedup", no_dedup, "keep duplicate columns");
    a->add_option("--max-support", max_support, "support size cap");
    a->add_option("--max-sweeps", max_sweeps, "sweep cap");
  }

  bool given(const char* name) const { return app->count(name) > 0; }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config.empty()) {
      try {
        const auto j = nlohmann::json::parse(read_text(config));
        for (const auto& [key, v] : j.items()) {
          if (key == "n_quantiles") cfg.augment.n_quantiles = v.get<int>();
          else if (key == "use_indicators") cfg.augment.use_indicators = v;
          else if (key == "use_interactions") cfg.augment.use_interactions = v;
          else if (key == "specific") cfg.augment.specific = v;
          else if (key == "overall") cfg.augment.overall = v;
          else if (key == "dedup") cfg.augment.dedup = v;
          else if (key == "max_support_size") cfg.fit.max_support_size = v;
          else if (key == "max_sweeps") cfg.fit.max_sweeps = v;
          else if (key == "tol") cfg.fit.tol = v;
          else if (key == "swap_search") cfg.fit.swap_search = v;
          else if (key == "refit_candidates") cfg.fit.refit_candidates = v;
          else
            throw Error(ErrorKind::kParse, "config: unknown key '" + key + "'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kParse, std::string("config: ") + e.what());
      }
    }
    if (given("--quantiles")) cfg.augment.n_quantiles = quantiles;
    if (no_indicators) cfg.augment.use_indicators = false;
    if (no_interactions) cfg.augment.use_interactions = false;
    if (overall) cfg.augment.overall = true;
    if (no_specific) cfg.augment.specific = false;
    if (no_dedup) cfg.augment.dedup = false;
    if (given("--max-support")) cfg.fit.max_support_size = max_support;
    if (given("--max-sweeps")) cfg.fit.max_sweeps = max_sweeps;
    cfg.augment.validate();
    return cfg;
  }
};

ojson metrics_json(const Model& model, const Dataset& ds,
                   const std::vector<double>& scores) {
  ojson j;
  j["rows"] = ds.n();
  j["accuracy"] = accuracy(scores, ds.labels());
  const auto pos = std::count(ds.labels().begin(), ds.labels().end(), 1);
  if (pos > 0 && static_cast<std::size_t>(pos) < ds.n()) {
    j["auc"] = auc(scores, ds.labels());
  } else {
    j["auc"] = nullptr;
  }
  j["sparsity"] = model.sparsity();
  j["sparsity_note"] = "nonzero coefficients, bias excluded";
  return j;
}

std::string binning_json(const BinningSpec& bins, const Dataset& ds) {
  ojson j;
  j["feature_names"] = ds.feature_names();
  j["thresholds"] = bins.thresholds;
  j["n_reasons"] = ds.n_reasons();
  j["overall_reason"] = ds.overall_reason();
  return j.dump(2) + "\n";
}

int cmd_augment(const DataArgs& data, const PipelineArgs& pipe,
                const std::string& out_path, const std::string& binning_path,
                std::ostream& out) {
  const auto cfg = pipe.resolve();
  const Dataset ds = data.load();
  const BinningSpec bins = compute_binning(ds, cfg.augment.n_quantiles);
  const auto x = build_augmented(ds, bins, cfg.augment);
  emit(out_path, x.to_csv(), out);
  if (!binning_path.empty()) emit(binning_path, binning_json(bins, ds), out);
  return kExitOk;
}

int cmd_fit(const DataArgs& data, const PipelineArgs& pipe, double lambda0,
            const std::string& model_path, const std::string& metrics_path,
            std::ostream& out, std::ostream& err) {
  auto cfg = pipe.resolve();
  const Dataset ds = data.load();
  const BinningSpec bins = compute_binning(ds, cfg.augment.n_quantiles);
  const auto x = build_augmented(ds, bins, cfg.augment);
  cfg.fit.lambda0 = lambda0;
  const FitResult res = fit(x, ds.labels(), cfg.fit);
  if (!res.warning.empty()) err << "warning: " << res.warning << "\n";
  const Model model = Model::from_params(res.model, x, bins, ds);
  emit(model_path, model.to_json(), out);
  if (!metrics_path.empty()) {
    auto j = metrics_json(model, ds, model.scores(ds));
    j["objective"] = res.objective;
    j["sweeps"] = res.sweeps;
    j["converged"] = res.converged;
    j["columns"] = x.cols();
    emit(metrics_path, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

int cmd_path(const DataArgs& data, const PipelineArgs& pipe,
             const std::string& grid_text, const std::string& test_path,
             const std::string& out_dir, const std::string& table_path,
             std::ostream& out) {
  const auto cfg = pipe.resolve();
  const auto grid = parse_grid(grid_text);
  const Dataset ds = data.load();
  std::optional<Dataset> test;
  if (!test_path.empty()) test = load_csv(test_path, data.label, data.enc());
  const auto models = fit_models(ds, grid, cfg);
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::string table = "index,lambda0,sparsity,train_accuracy";
  if (test) table += ",test_accuracy";
  table += "\n";
  for (std::size_t l = 0; l < models.size(); ++l) {
    const auto& m = models[l];
    if (!out_dir.empty()) {
      emit((std::filesystem::path(out_dir) /
            ("model_" + std::to_string(l) + ".json"))
               .string(),
           m.to_json(), out);
    }
    table += std::to_string(l) + "," + format_double(grid[l]) + "," +
             std::to_string(m.sparsity()) + "," +
             format_double(accuracy(m.scores(ds), ds.labels()));
    if (test) {
      table += "," + format_double(accuracy(m.scores(*test), test->labels()));
    }
    table += "\n";
  }
  emit(table_path, table, out);
  return kExitOk;
}

int cmd_cv(const DataArgs& data, const PipelineArgs& pipe,
           const std::string& grid_text, std::size_t folds,
           const std::string& metric, std::uint64_t seed,
           const std::string& report_path, const std::string& table_path,
           const std::string& model_path, std::ostream& out) {
  const auto cfg = pipe.resolve();
  const auto grid = parse_grid(grid_text);
  const Dataset ds = data.load();
  const auto report = cross_validate(ds, grid, folds, metric_from_name(metric),
                                     cfg, seed);
  emit(report_path, report.to_json(), out);
  if (!table_path.empty()) emit(table_path, report.to_text(), out);
  if (!model_path.empty()) {
    emit(model_path, fit_model(ds, report.best_lambda, cfg).to_json(), out);
  }
  return kExitOk;
}

int cmd_predict(const DataArgs& data, const std::string& model_path,
                const std::string& out_path, const std::string& metrics_path,
                std::ostream& out) {
  const Model model = Model::from_json(read_text(model_path));
  const Dataset ds = data.load();
  const auto scores = model.scores(ds);
  std::string csv = "row,score,label\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    csv += std::to_string(i) + "," + format_double(scores[i]) + "," +
           std::to_string(predict_label(scores[i])) + "\n";
  }
  emit(out_path, csv, out);
  if (!metrics_path.empty()) {
    emit(metrics_path, metrics_json(model, ds, scores).dump(2) + "\n", out);
  }
  return kExitOk;
}

int cmd_inject(const DataArgs& data, const std::string& spec_path,
               std::optional<std::uint64_t> seed, const std::string& out_path,
               const std::string& enc_out, std::ostream& out) {
  const EncodingMap enc = data.enc();
  const Dataset ds = load_csv(data.data, data.label, enc);
  MarSpec spec = parse_mar_spec_json(read_text(spec_path), ds);
  if (seed) spec.seed = *seed;
  const Dataset injected = inject_mar(ds, spec);
  const EncodingMap extended = extend_encoding(injected, enc);
  emit(out_path, format_csv(injected, data.label, extended), out);
  if (!enc_out.empty()) emit(enc_out, encoding_to_json(extended), out);
  return kExitOk;
}

int cmd_gen(std::size_t n, std::size_t d, std::uint64_t seed,
            const std::string& dgp, const std::string& label,
            const std::string& out_path, std::ostream& out) {
  const Dataset ds = gen_synthetic(n, d, seed, dgp);
  emit(out_path, format_csv(ds, label, EncodingMap{}), out);
  return kExitOk;
}

int cmd_shapes(const std::string& model_path, const std::string& out_path,
               const std::string& csv_path, std::ostream& out) {
  const Model model = Model::from_json(read_text(model_path));
  const ShapeSet shapes = export_shapes(model);
  emit(out_path, shapes.to_json(), out);
  if (!csv_path.empty()) emit(csv_path, shapes.to_csv(), out);
  return kExitOk;
}

int cmd_theory(std::uint64_t seed, std::size_t trials, std::ostream& out) {
  const auto report = theory::run_theory_checks(seed, trials);
  out << report.to_text();
  return report.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Sparse additive models with missingness-aware terms", "mgam"};
  app.require_subcommand(1);

  std::string out_path, binning_path, model_path, metrics_path, grid_text,
      test_path, out_dir, table_path, report_path, metric = "accuracy",
      spec_path, enc_out, csv_path, dgp = "sparse_additive";
  double lambda0 = 0.0;
  std::size_t folds = 5, n = 1000, d = 5, trials = 100;
  std::uint64_t seed = 0;

  DataArgs data;
  PipelineArgs pipe_augment, pipe_fit, pipe_path, pipe_cv;

  auto* augment = app.add_subcommand("augment", "write the augmented matrix");
  data.add(augment);
  pipe_augment.add(augment);
  augment->add_option("--out", out_path, "augmented CSV (default stdout)");
  augment->add_option("--binning-out", binning_path, "binning JSON");

  auto* fit_cmd = app.add_subcommand("fit", "fit one model");
  data.add(fit_cmd);
  pipe_fit.add(fit_cmd);
  fit_cmd->add_option("--lambda", lambda0, "l0 penalty")->required();
  fit_cmd->add_option("--out", model_path, "model JSON (default stdout)");
  fit_cmd->add_option("--metrics-out", metrics_path, "training metrics JSON");

  auto* path_cmd = app.add_subcommand("path", "fit a lambda path");
  data.add(path_cmd);
  pipe_path.add(path_cmd);
  path_cmd->add_option("--lambdas", grid_text, "comma separated grid");
  path_cmd->add_option("--test", test_path, "held-out CSV");
  path_cmd->add_option("--out-dir", out_dir, "directory for model JSONs");
  path_cmd->add_option("--table", table_path, "sparsity table CSV");

  auto* cv_cmd = app.add_subcommand("cv", "cross-validate lambda");
  data.add(cv_cmd);
  pipe_cv.add(cv_cmd);
  cv_cmd->add_option("--lambdas", grid_text, "comma separated grid");
  cv_cmd->add_option("--folds", folds, "number of folds")
      ->capture_default_str();
  cv_cmd->add_option("--metric", metric, "accuracy or auc")
      ->capture_default_str();
  cv_cmd->add_option("--seed", seed, "fold seed");
  cv_cmd->add_option("--report", report_path, "CV report JSON");
  cv_cmd->add_option("--table", table_path, "CV text table");
  cv_cmd->add_option("--model-out", model_path, "refit model JSON");

  auto* predict_cmd = app.add_subcommand("predict", "score a dataset");
  data.add(predict_cmd);
  predict_cmd->add_option("--model", model_path, "model JSON")->required();
  predict_cmd->add_option("--out", out_path, "scores CSV (default stdout)");
  predict_cmd->add_option("--metrics-out", metrics_path, "metrics JSON");

  std::uint64_t mar_seed = 0;
  auto* inject_cmd = app.add_subcommand("inject-mar", "inject MAR missingness");
  data.add(inject_cmd);
  inject_cmd->add_option("--spec", spec_path, "MAR spec JSON")->required();
  auto* mar_seed_opt =
      inject_cmd->add_option("--seed", mar_seed, "overrides the seed in the --spec file");
  inject_cmd->add_option("--out", out_path, "output CSV (default stdout)");
  inject_cmd->add_option("--encoding-out", enc_out, "extended encoding JSON");

  std::string gen_label = "label";
  auto* gen_cmd = app.add_subcommand("gen", "generate synthetic data");
  gen_cmd->add_option("--n", n, "rows")->capture_default_str();
  gen_cmd->add_option("--d", d, "features")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "seed");
  gen_cmd->add_option("--dgp", dgp, "generator")
      ->capture_default_str()
      ->check(CLI::IsMember(synthetic_generators()));
  gen_cmd->add_option("--label", gen_label, "label column name")
      ->capture_default_str();
  gen_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  auto* shapes_cmd = app.add_subcommand("shapes", "export shape functions");
  shapes_cmd->add_option("--model", model_path, "model JSON")->required();
  shapes_cmd->add_option("--out", out_path, "shape JSON (default stdout)");
  shapes_cmd->add_option("--csv", csv_path, "shape CSV");

  std::uint64_t theory_seed = 2024;
  auto* theory_cmd =
      app.add_subcommand("theory-check", "run the exact theory checks");
  theory_cmd->add_option("--seed", theory_seed, "imputer trial seed")
      ->capture_default_str();
  theory_cmd->add_option("--trials", trials, "imputer trials")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*augment) {
      return cmd_augment(data, pipe_augment, out_path, binning_path, out);
    }
    if (*fit_cmd) {
      return cmd_fit(data, pipe_fit, lambda0, model_path, metrics_path, out, err);
    }
    if (*path_cmd) {
      return cmd_path(data, pipe_path, grid_text, test_path, out_dir, table_path,
                      out);
    }
    if (*cv_cmd) {
      return cmd_cv(data, pipe_cv, grid_text, folds, metric, seed, report_path,
                    table_path, model_path, out);
    }
    if (*predict_cmd) {
      return cmd_predict(data, model_path, out_path, metrics_path, out);
    }
    if (*inject_cmd) {
      std::optional<std::uint64_t> s;
      if (mar_seed_opt->count() > 0) s = mar_seed;
      return cmd_inject(data, spec_path, s, out_path, enc_out, out);
    }
    if (*gen_cmd) {
      return cmd_gen(n, d, seed, dgp, gen_label, out_path, out);
    }
    if (*shapes_cmd) return cmd_shapes(model_path, out_path, csv_path, out);
    if (*theory_cmd) return cmd_theory(theory_seed, trials, out);
  } catch (const Error& e) {
    err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mgam::cli
