// Copyright 2026 The c3kit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "c3/c3dm.hpp"
#include "c3/cli.hpp"
#include "c3/error.hpp"
#include "c3/io_util.hpp"
#include "c3/pipeline.hpp"

namespace c3 {

using nlohmann::json;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kIo:
    case ErrorKind::kLocked: return kExitIo;
  }
  return kExitData;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  const std::string& source = {}) {
  json j = {{"error", kind}, {"message", message}};
  if (!source.empty()) j["source"] = source;
  err << j.dump() << '\n';
}

void report_warning(std::ostream& err, const std::string& message) { err << json{{"warning", message}}.dump() << '\n'; }

std::string fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string store;
};

struct PipelineFlags {
  std::string manifest;
  std::string out;
  std::string dataset;
  bool strict = false;
};

PipelineConfig resolve_config(const GlobalOptions& g, const PipelineFlags& f) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.dataset.empty()) c.dataset = parse_dataset_id(f.dataset);
  if (f.strict) c.strict = true;
  if (c.threads < 1) fail(ErrorKind::kInvalidArgument, "--threads must be >= 1");
  c.effective_rules();
  return c;
}

int cmd_gengt(const GlobalOptions& g, const PipelineFlags& f, bool no_log, std::ostream& out, std::ostream& err) {
  const PipelineConfig config = resolve_config(g, f);
  std::optional<ExperimentStore> store;
  if (!no_log) {
    const std::filesystem::path dir = g.store.empty() ? config.output_dir / "expdb" : std::filesystem::path(g.store);
    store.emplace(open_store(dir));
    for (const auto& note : store->recovery_notes()) report_warning(err, note);
  }
  const auto result = run_gengt(config, store ? &*store : nullptr);
  for (const auto& w : result.warnings) report_warning(err, w);

  out << std::left << std::setw(24) << "image_id" << std::right << std::setw(8) << "points" << std::setw(14) << "count"
      << std::setw(12) << "map" << "  flags\n";
  for (const auto& img : result.images) {
    std::string flags;
    for (const auto& fl : img.flags) flags += (flags.empty() ? "" : ",") + fl;
    out << std::left << std::setw(24) << img.image_id << std::right << std::setw(8) << img.points << std::setw(14)
        << fixed(img.map_count, 4) << std::setw(12)
        << (std::to_string(img.map.height) + "x" + std::to_string(img.map.width)) << "  " << flags << '\n';
  }
  out << result.images.size() << " density maps written to " << config.output_dir.string() << '\n';
  if (result.run_id) out << "run " << *result.run_id << '\n';
  return kExitOk;
}

int cmd_preprocess(const GlobalOptions& g, const PipelineFlags& f, const PreprocessOptions& opts, std::ostream& out,
                   std::ostream& err) {
  const PipelineConfig config = resolve_config(g, f);
  const auto result = run_preprocess(config, opts);
  int code = kExitOk;
  for (const auto& fail_item : result.failures) {
    report_error(err, to_string(fail_item.kind), fail_item.message, fail_item.source);
    code = std::max(code, exit_code(fail_item.kind));
  }
  out << result.outputs.size() << " images preprocessed, " << result.failures.size() << " failed; manifest "
      << (config.output_dir / "manifest.json").string() << '\n';
  return code;
}

int cmd_eval(const GlobalOptions& g, const std::string& pred, const std::string& gt, bool quality, const std::string& out_dir,
             int downsampled, const std::vector<std::string>& flags, std::ostream& out) {
  EvalOptions opts;
  opts.with_quality = quality;
  opts.threads = g.threads.value_or(1);
  opts.flags = flags;
  if (downsampled > 1) opts.flags.push_back("downsampled_targets:" + std::to_string(downsampled));
  const auto report = evaluate_run(pred, gt, opts);
  out << format_table(report);
  if (!out_dir.empty()) {
    const std::filesystem::path dir = out_dir;
    write_file_atomic(dir / "eval_report.json", to_json(report).dump(2) + "\n");
    write_file_atomic(dir / "eval_per_image.csv", format_csv(report));
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path, const std::string& png, std::ostream& out) {
  const DensityMap map = read_c3dm(path);
  const MapStats s = inspect_map(map);
  out << std::left << std::setw(13) << "file" << path << '\n'
      << std::setw(13) << "dims" << s.shape.height << " x " << s.shape.width << '\n'
      << std::setw(13) << "norm_factor" << s.norm_factor << '\n'
      << std::setw(13) << "sum" << fixed(s.sum) << '\n'
      << std::setw(13) << "count" << fixed(s.count) << '\n'
      << std::setw(13) << "min" << fixed(s.min, 9) << '\n'
      << std::setw(13) << "max" << fixed(s.max, 9) << '\n';
  if (!png.empty()) {
    write_heatmap_png(map, png);
    out << std::setw(13) << "heatmap" << png << '\n';
  }
  return kExitOk;
}

int cmd_log(const GlobalOptions& g, const std::string& dataset, const std::string& run_id, const std::string& since,
            bool best, bool epochs, std::ostream& out, std::ostream& err) {
  if (g.store.empty()) fail(ErrorKind::kInvalidArgument, "log: --store <dir> is required");
  StoreOptions so;
  so.read_only = true;
  const auto store = open_store(g.store, so);
  for (const auto& note : store.recovery_notes()) report_warning(err, note);
  QueryFilter filter;
  if (!dataset.empty()) filter.dataset = parse_dataset_id(dataset);
  if (!run_id.empty()) filter.run_id = run_id;
  if (!since.empty()) filter.since = since;
  const auto rows = store.query(filter);

  if (best) {
    out << std::left << std::setw(28) << "run_id" << std::setw(8) << "dataset" << std::right << std::setw(12)
        << "best_epoch" << std::setw(12) << "best_mae" << std::setw(12) << "mse@best" << '\n';
    for (const auto& r : rows) {
      out << std::left << std::setw(28) << r.run.run_id << std::setw(8) << to_string(r.run.dataset) << std::right;
      if (r.best.has_value()) {
        out << std::setw(12) << r.best.best_epoch << std::setw(12) << fixed(r.best.best_mae, 3) << std::setw(12)
            << fixed(r.best.best_mse_at_best_mae, 3) << '\n';
      } else {
        out << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(12) << "-" << '\n';
      }
    }
  } else {
    out << std::left << std::setw(28) << "run_id" << std::setw(26) << "created_at" << std::setw(8) << "dataset"
        << std::right << std::setw(7) << "epochs" << "  " << std::left << std::setw(14) << "config" << "notes\n";
    for (const auto& r : rows) {
      out << std::left << std::setw(28) << r.run.run_id << std::setw(26) << r.run.created_at << std::setw(8)
          << to_string(r.run.dataset) << std::right << std::setw(7) << r.epochs << "  " << std::left << std::setw(14)
          << r.run.config_hash.substr(0, 12) << r.run.notes << '\n';
    }
  }
  if (epochs) {
    for (const auto& r : rows) {
      out << "\nrun " << r.run.run_id << '\n'
          << std::right << std::setw(8) << "epoch" << std::setw(12) << "train_loss" << std::setw(12) << "val_mae"
          << std::setw(12) << "val_mse" << std::setw(12) << "wall_s" << '\n';
      for (const auto& e : store.epochs(r.run.run_id)) {
        out << std::setw(8) << e.epoch << std::setw(12) << (e.train_loss ? fixed(*e.train_loss, 4) : "-")
            << std::setw(12) << fixed(e.val_mae, 3) << std::setw(12) << fixed(e.val_mse, 3) << std::setw(12)
            << fixed(e.wall_time_s, 1) << '\n';
      }
    }
  }
  out << rows.size() << " run(s)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"crowd-counting ground truth, preprocessing, evaluation and run logging"};
  app.name("c3kit");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "pipeline config JSON");
  std::uint64_t seed = 0;
  int threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (recorded in the run config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--store", g.store, "experiment store directory");

  PipelineFlags pf;
  auto add_pipeline_flags = [&pf](CLI::App* sub) {
    sub->add_option("--manifest", pf.manifest, "input manifest JSON");
    sub->add_option("--out", pf.out, "output directory");
    sub->add_option("--dataset", pf.dataset, "UCF50, SHT_A, SHT_B, WE, QNRF, GCC or CUSTOM");
    sub->add_flag("--strict", pf.strict, "reject out-of-bounds points instead of clamping");
  };

  auto* gengt = app.add_subcommand("gengt", "render density-map ground truth");
  add_pipeline_flags(gengt);
  bool no_log = false;
  gengt->add_flag("--no-log", no_log, "do not record the run in the experiment store");

  auto* prep = app.add_subcommand("preprocess", "resize images and annotations to the dataset rule");
  add_pipeline_flags(prep);
  PreprocessOptions popts;
  std::string strategy = "crop_to_min";
  prep->add_option("--batch-size", popts.batch_size, "write batch_plans.json for groups of this size");
  prep->add_option("--batch-strategy", strategy, "crop_to_min or pad_to_max");

  auto* eval = app.add_subcommand("eval", "score predicted maps against ground truth");
  std::string pred_dir, gt_dir, eval_out;
  bool quality = false;
  int downsampled = 1;
  std::vector<std::string> extra_flags;
  eval->add_option("pred_dir", pred_dir, "directory of predicted .c3dm maps")->required();
  eval->add_option("gt_dir", gt_dir, "directory of ground-truth .c3dm maps")->required();
  eval->add_flag("--quality", quality, "also compute PSNR and SSIM");
  eval->add_option("--out", eval_out, "write eval_report.json and eval_per_image.csv here");
  eval->add_option("--downsampled-targets", downsampled, "targets were block-summed by this factor");
  eval->add_option("--flag", extra_flags, "extra provenance note for the report");

  auto* inspect = app.add_subcommand("inspect", "summarize a .c3dm file");
  std::string inspect_path, png;
  inspect->add_option("path", inspect_path, ".c3dm file")->required();
  inspect->add_option("--png", png, "export a peak-normalized heat map");

  auto* log = app.add_subcommand("log", "list recorded runs");
  std::string log_dataset, log_run, log_since;
  bool log_best = false, log_epochs = false;
  log->add_option("--dataset", log_dataset, "only runs on this dataset");
  log->add_option("--run-id", log_run, "only this run");
  log->add_option("--since", log_since, "only runs created at or after this RFC 3339 time");
  log->add_flag("--best", log_best, "show each run's best epoch");
  log->add_flag("--epochs", log_epochs, "list every recorded epoch");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  if (threads_opt->count() > 0) g.threads = threads;

  try {
    if (gengt->parsed()) return cmd_gengt(g, pf, no_log, out, err);
    if (prep->parsed()) {
      popts.batch_strategy = parse_batch_strategy(strategy);
      return cmd_preprocess(g, pf, popts, out, err);
    }
    if (eval->parsed()) return cmd_eval(g, pred_dir, gt_dir, quality, eval_out, downsampled, extra_flags, out);
    if (inspect->parsed()) return cmd_inspect(inspect_path, png, out);
    if (log->parsed()) return cmd_log(g, log_dataset, log_run, log_since, log_best, log_epochs, out, err);
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace c3
