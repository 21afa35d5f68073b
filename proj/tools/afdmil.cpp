// Command-line front end: gen, train, eval, ablate, heatmap, gradcheck.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "afdmil/data/dataset_io.hpp"
#include "afdmil/data/synth.hpp"
#include "afdmil/metrics/export.hpp"
#include "afdmil/model/model_grad_check.hpp"
#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"
#include "afdmil/training/checkpoint.hpp"
#include "afdmil/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace afdmil;

namespace {

struct ModelFlags {
  int k = 8;
  std::string mode = "max-p";
  std::string fusion = "gated";
  bool no_global_loss = false;
  bool no_attention_channel = false;
  bool no_distill = false;

  ForwardOptions options() const {
    ForwardOptions o;
    o.distill = {k, parse_distill_mode(mode)};
    o.fusion = parse_fusion_backend(fusion);
    o.global_loss = !no_global_loss;
    o.attention_channel = !no_attention_channel;
    o.feature_distillation = !no_distill;
    o.distill.validate();
    return o;
  }
};

struct SplitFlags {
  double test_fraction = 1.0 / 3.0;
  std::uint64_t split_seed = 0;
  std::string part = "train";
};

struct TrainFlags {
  int epochs = 50;
  double lr = 1e-4;
  double weight_decay = 1e-5;
  double validation_fraction = 0.2;
  int h1 = 256;
  int h2 = 128;
  int d = 128;
};

struct Common {
  std::uint64_t seed = 0;
  std::string out = "out";
  double threshold = kDefaultThreshold;
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--k", m.k, "instances distilled per channel")->capture_default_str();
  app->add_option("--mode", m.mode, "distillation mode")
      ->check(CLI::IsMember({"max-p", "max-pn"}))
      ->capture_default_str();
  app->add_option("--fusion", m.fusion, "fusion backend")
      ->check(CLI::IsMember({"gated", "mean"}))
      ->capture_default_str();
  app->add_flag("--no-global-loss", m.no_global_loss, "sum the three losses instead");
  app->add_flag("--no-attention-channel", m.no_attention_channel, "drop the attention channel");
  app->add_flag("--no-distill", m.no_distill, "no distillation: fuse the whole bag");
}

void add_split_flags(CLI::App* app, SplitFlags& s, const std::string& default_part) {
  s.part = default_part;
  app->add_option("--test-fraction", s.test_fraction, "held-out fraction per label")
      ->capture_default_str();
  app->add_option("--split-seed", s.split_seed, "seed of the train/test split")->capture_default_str();
  app->add_option("--split", s.part, "part of the dataset to use")
      ->check(CLI::IsMember({"train", "test", "all"}))
      ->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& t) {
  app->add_option("--epochs", t.epochs)->capture_default_str();
  app->add_option("--lr", t.lr)->capture_default_str();
  app->add_option("--weight-decay", t.weight_decay)->capture_default_str();
  app->add_option("--validation-fraction", t.validation_fraction)->capture_default_str();
  app->add_option("--h1", t.h1)->capture_default_str();
  app->add_option("--h2", t.h2)->capture_default_str();
  app->add_option("--d", t.d)->capture_default_str();
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--threshold", c.threshold, "decision threshold")->capture_default_str();
}

Dataset select_part(const Dataset& all, const SplitFlags& s) {
  if (s.part == "all") {
    return all;
  }
  auto [train, test] = split(all, s.test_fraction, s.split_seed);
  return s.part == "train" ? train : test;
}

TrainConfig train_config(const TrainFlags& t, const ModelFlags& m, const Common& c) {
  TrainConfig cfg;
  cfg.adam.lr = t.lr;
  cfg.adam.weight_decay = t.weight_decay;
  cfg.epochs = t.epochs;
  cfg.seed = c.seed;
  cfg.forward = m.options();
  cfg.dims = {0, t.h1, t.h2, t.d};
  cfg.validation_fraction = t.validation_fraction;
  cfg.threshold = c.threshold;
  cfg.validate();
  return cfg;
}

// Only the subcommand that ran, as a section the --config loader accepts.
void write_resolved(const CLI::App& app, const fs::path& dir) {
  const std::string text = fmt::format("# rng {}\n[{}]\n{}", Rng::kAlgorithm, app.get_name(),
                                       app.config_to_str(true, false));
  bytes::write_file(dir / "config.toml", text);
}

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

constexpr const char* kMetricsHeader =
    "split,bags,threshold,acc,auc,recall,precision,tp,fp,tn,fn,distill_precision_ch1,distill_precision_ch2";

std::string metrics_row(const std::string& part, const MetricsReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", part, r.total(), r.threshold, r.acc,
                     opt(r.auc), r.recall, r.precision, r.tp, r.fp, r.tn, r.fn,
                     opt(r.distill_precision_ch1), opt(r.distill_precision_ch2));
}

int run_gen(const CLI::App& root, SynthConfig cfg, const std::string& kind, const Common& c) {
  cfg.kind = parse_synth_kind(kind);
  const SynthDataset s = generate(cfg, c.seed);
  const fs::path manifest = save_dataset(s.dataset, c.out, &s.provenance);
  write_resolved(root, c.out);
  std::cout << manifest.string() << "\n";
  return 0;
}

int run_train(const CLI::App& root, const std::string& data, const SplitFlags& s, const TrainFlags& t,
              const ModelFlags& m, const Common& c) {
  const TrainConfig cfg = train_config(t, m, c);
  const Dataset part = select_part(load_dataset(data), s);
  const TrainResult r = train(part, cfg);
  fs::create_directories(c.out);
  save_checkpoint({r.model, cfg, r.selected_epoch, r.history[r.selected_epoch].validation,
                   std::string(Rng::kAlgorithm)},
                  fs::path(c.out) / "model.ckpt");
  bytes::write_file(fs::path(c.out) / "history.csv", format_history(r.history, r.selected_epoch));
  write_resolved(root, c.out);
  spdlog::info("trained on {} bags ({} held for validation), selected epoch {}", r.train_bags,
               r.validation_bags, r.selected_epoch);
  std::cout << (fs::path(c.out) / "model.ckpt").string() << "\n";
  return 0;
}

int run_eval(const CLI::App& root, const std::string& ckpt, const std::string& data, const SplitFlags& s,
             const Common& c) {
  const Dataset all = load_dataset(data);
  const Checkpoint ck = load_checkpoint(ckpt, all.dim);
  const MetricsReport r = evaluate(ck.model, select_part(all, s), ck.config.forward, c.threshold);
  const std::string text = fmt::format("{}\n{}\n", kMetricsHeader, metrics_row(s.part, r));
  fs::create_directories(c.out);
  bytes::write_file(fs::path(c.out) / "metrics.csv", text);
  write_resolved(root, c.out);
  std::cout << text;
  return 0;
}

struct Cell {
  int k = 0;
  AblationRow row = AblationRow::Full;
  std::uint64_t seed = 0;
  MetricsReport report;
};

int run_ablate(const CLI::App& root, const std::string& data, const SplitFlags& s, const TrainFlags& t,
               const ModelFlags& m, const Common& c, const std::vector<int>& ks, int jobs) {
  const Dataset all = load_dataset(data);
  auto [train_part, test_part] = split(all, s.test_fraction, s.split_seed);
  const Rng master(c.seed);
  std::vector<Cell> cells;
  for (int k : ks) {
    for (AblationRow row : {AblationRow::Plain, AblationRow::InstanceDistill, AblationRow::DualDistill,
                            AblationRow::Full}) {
      Cell cell{k, row, master.stream("ablate-cell", cells.size()).seed(), {}};
      cells.push_back(cell);
    }
  }
  const ModelFlags base = m;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::string> failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      try {
        ModelFlags mf = base;
        mf.k = cell.k;
        Common cc = c;
        cc.seed = cell.seed;
        TrainConfig cfg = train_config(t, mf, cc);
        cfg.forward = ablation_options(cell.row, cfg.forward.distill, cfg.forward.fusion);
        const TrainResult r = train(train_part, cfg);
        cell.report = evaluate(r.model, test_part, cfg.forward, c.threshold);
        spdlog::info("cell k={} row={} auc={}", cell.k, to_string(cell.row), opt(cell.report.auc));
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        failure = fmt::format("cell k={} row={}: {}", cell.k, to_string(cell.row), e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, jobs); ++j) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (failure) {
    throw Error(*failure);
  }
  std::string text = "k,row,seed,acc,auc,recall,precision,distill_precision_ch1,distill_precision_ch2\n";
  for (const Cell& cell : cells) {
    const MetricsReport& r = cell.report;
    text += fmt::format("{},{},{},{},{},{},{},{},{}\n", cell.k, to_string(cell.row), cell.seed, r.acc,
                        opt(r.auc), r.recall, r.precision, opt(r.distill_precision_ch1),
                        opt(r.distill_precision_ch2));
  }
  fs::create_directories(c.out);
  bytes::write_file(fs::path(c.out) / "ablation.csv", text);
  write_resolved(root, c.out);
  std::cout << text;
  return 0;
}

int run_heatmap(const CLI::App& root, const std::string& ckpt, const std::string& data,
                const std::string& bag_id, const Common& c) {
  const Dataset all = load_dataset(data);
  const auto it = std::find_if(all.bags.begin(), all.bags.end(),
                               [&](const Bag& b) { return b.id == bag_id; });
  if (it == all.bags.end()) {
    std::string ids;
    for (const Bag& b : all.bags) {
      ids += (ids.empty() ? "" : " ") + b.id;
    }
    throw ConfigError(fmt::format("unknown bag '{}'; available: {}", bag_id, ids));
  }
  const Checkpoint ck = load_checkpoint(ckpt, all.dim);
  const ForwardTrace trace = forward_bag(ck.model, it->features, it->label, ck.config.forward);
  const fs::path out(c.out);
  const auto r = export_instance_scores(trace, *it, out / (bag_id + "_scores.csv"),
                                        it->coords ? std::optional(out / (bag_id + ".pgm")) : std::nullopt);
  write_resolved(root, out);
  std::cout << (out / (bag_id + "_scores.csv")).string() << "\n";
  if (r.raster_written) {
    std::cout << (out / (bag_id + ".pgm")).string() << "\n";
  }
  return 0;
}

int run_gradcheck(const GradCheckCase& base, double eps, double tolerance) {
  bool ok = true;
  for (DistillMode mode : {DistillMode::MaxPositive, DistillMode::MaxPositiveNegative}) {
    GradCheckCase gc = base;
    gc.mode = mode;
    const GradCheckResult r = check_random_case(gc, eps);
    const bool pass = r.max_rel_error < tolerance;
    ok = ok && pass;
    std::cout << fmt::format("{} {}: max relative error {:.3e} over {} entries; worst {}[{}] analytic {:.6e} numeric {:.6e}\n",
                             pass ? "ok  " : "FAIL", to_string(mode), r.max_rel_error, r.checked,
                             r.worst_param, r.worst_index, r.worst_analytic, r.worst_numeric);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-channel feature distillation for multiple-instance learning"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  Common common;
  ModelFlags model;
  TrainFlags tf;

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  SynthConfig synth;
  std::string kind = "binary";
  gen->add_option("--kind", kind)->check(CLI::IsMember({"binary", "subtype"}))->capture_default_str();
  gen->add_option("--bags-per-class", synth.bags_per_class)->capture_default_str();
  gen->add_option("--k-min", synth.k_min)->capture_default_str();
  gen->add_option("--k-max", synth.k_max)->capture_default_str();
  gen->add_option("--dim", synth.dim)->capture_default_str();
  gen->add_option("--witness-rate", synth.witness_rate)->capture_default_str();
  gen->add_option("--min-witnesses", synth.min_witnesses)->capture_default_str();
  gen->add_option("--separation", synth.separation)->capture_default_str();
  gen->add_option("--sigma", synth.sigma)->capture_default_str();
  add_common(gen, common);

  std::string data;
  std::string ckpt;

  auto* tr = app.add_subcommand("train", "train a model and write a checkpoint");
  tr->add_option("--data", data, "dataset manifest")->required();
  SplitFlags train_split;
  add_split_flags(tr, train_split, "train");
  add_train_flags(tr, tf);
  add_model_flags(tr, model);
  add_common(tr, common);

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  ev->add_option("--checkpoint", ckpt)->required();
  ev->add_option("--data", data)->required();
  SplitFlags eval_split;
  add_split_flags(ev, eval_split, "test");
  add_common(ev, common);

  auto* ab = app.add_subcommand("ablate", "sweep k and the component toggles");
  std::vector<int> ks{2, 4, 8, 16, 32, 64};
  int jobs = 1;
  ab->add_option("--data", data)->required();
  ab->add_option("--ks", ks, "k values")->delimiter(',')->capture_default_str();
  ab->add_option("--jobs", jobs, "parallel cells")->capture_default_str();
  SplitFlags ablate_split;
  add_split_flags(ab, ablate_split, "train");
  add_train_flags(ab, tf);
  add_model_flags(ab, model);
  add_common(ab, common);

  auto* hm = app.add_subcommand("heatmap", "per-instance scores and raster for one bag");
  std::string bag_id;
  hm->add_option("--checkpoint", ckpt)->required();
  hm->add_option("--data", data)->required();
  hm->add_option("--bag", bag_id)->required();
  add_common(hm, common);

  auto* gc = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  GradCheckCase gcase;
  double eps = 1e-5;
  double tolerance = 1e-4;
  int width = 8;
  gc->add_option("--width", width, "n = h1 = h2 = d")->capture_default_str();
  gc->add_option("--bag-size", gcase.bag_size)->capture_default_str();
  gc->add_option("--k", gcase.k)->capture_default_str();
  gc->add_option("--seed", gcase.seed)->capture_default_str();
  gc->add_option("--eps", eps)->capture_default_str();
  gc->add_option("--tolerance", tolerance)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*gen) return run_gen(*gen, synth, kind, common);
    if (*tr) return run_train(*tr, data, train_split, tf, model, common);
    if (*ev) return run_eval(*ev, ckpt, data, eval_split, common);
    if (*ab) return run_ablate(*ab, data, ablate_split, tf, model, common, ks, jobs);
    if (*hm) return run_heatmap(*hm, ckpt, data, bag_id, common);
    if (*gc) {
      gcase.dims = {width, width, width, width};
      return run_gradcheck(gcase, eps, tolerance);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
