// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.
//
//   acceptance            all criteria
//   acceptance 1 2 10     a subset
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "afdmil/data/feature_file.hpp"
#include "afdmil/data/synth.hpp"
#include "afdmil/metrics/metrics.hpp"
#include "afdmil/model/forward.hpp"
#include "afdmil/model/model_grad_check.hpp"
#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/training/checkpoint.hpp"
#include "afdmil/training/trainer.hpp"
#include "oracle/roc.hpp"
#include "support.hpp"

using namespace afdmil;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Training protocol shared by the benchmark criteria. Pinned here; the
// dataset itself is the default SynthConfig.
struct Protocol {
  ModelDims dims{32, 16, 16, 16};
  double lr = 1e-3;
  double weight_decay = 3.0;
  int epochs = 40;
  double test_fraction = 1.0 / 3.0;
  int k = 8;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

const Protocol kProtocol;

struct RunResult {
  double test_auc = 0.0;
  MetricsReport report;
  AfdModel model;
  Dataset test;
  ForwardOptions options;
  double seconds = 0.0;
};

std::string key_of(SynthKind kind, AblationRow row, int k, DistillMode mode, std::uint64_t seed) {
  return fmt::format("{}/{}/{}/{}/{}", to_string(kind), to_string(row), k, to_string(mode), seed);
}

// Benchmark runs are shared between criteria within one process.
const RunResult& benchmark_run(SynthKind kind, AblationRow row, int k, DistillMode mode, std::uint64_t seed) {
  static std::map<std::string, RunResult> cache;
  const std::string key = key_of(kind, row, k, mode, seed);
  if (auto it = cache.find(key); it != cache.end()) {
    return it->second;
  }
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.kind = kind;
  const SynthDataset data = generate(sc, seed);
  auto [train_part, test_part] = split(data.dataset, kProtocol.test_fraction, seed);

  TrainConfig tc;
  tc.dims = kProtocol.dims;
  tc.adam.lr = kProtocol.lr;
  tc.adam.weight_decay = kProtocol.weight_decay;
  tc.epochs = kProtocol.epochs;
  tc.seed = seed;
  tc.forward = ablation_options(row, {k, mode}, FusionBackend::Gated);
  TrainResult tr = train(train_part, tc);
  MetricsReport report = evaluate(tr.model, test_part, tc.forward);
  RunResult r{report.auc.value_or(0.0), report, std::move(tr.model), std::move(test_part), tc.forward,
              seconds_since(t0)};
  std::cout << fmt::format("  run {}: test auc {:.4f} ({:.1f} s)\n", key, r.test_auc, r.seconds);
  return cache.emplace(key, std::move(r)).first->second;
}

double mean_auc(SynthKind kind, AblationRow row, int k, DistillMode mode) {
  double sum = 0.0;
  for (auto s : kProtocol.seeds) {
    sum += benchmark_run(kind, row, k, mode, s).test_auc;
  }
  return sum / static_cast<double>(kProtocol.seeds.size());
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  for (DistillMode mode : {DistillMode::MaxPositive, DistillMode::MaxPositiveNegative}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      GradCheckCase c;
      c.mode = mode;
      c.seed = seed;
      const GradCheckResult r = check_random_case(c);
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        where = fmt::format("{} seed {} {}[{}]", to_string(mode), seed, r.worst_param, r.worst_index);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 30.0,
          fmt::format("20 random models, max relative error {:.2e} at {} (< 1e-4), {:.1f} s (< 30 s)", worst, where, t)};
}

Outcome forward_oracle() {
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  int mismatched_selections = 0;
  for (int c = 0; c < 100; ++c) {
    const auto row = static_cast<AblationRow>(c % 4);
    const bool pn = (c / 4) % 2 == 1;
    const bool gated = (c / 8) % 3 != 0;
    const int k = pn ? 2 * static_cast<int>(1 + gen() % 4) : static_cast<int>(1 + gen() % 8);
    const Index bag = static_cast<Index>(1 + gen() % 20);
    const int label = static_cast<int>(gen() % 2);
    const ModelDims dims{6, 5, 4, 3};
    const AfdModel m = testing::random_model(1000 + static_cast<std::uint64_t>(c), dims);
    const Matrix x = testing::random_matrix(gen, bag, 6);
    const ForwardOptions o = ablation_options(
        row, {k, pn ? DistillMode::MaxPositiveNegative : DistillMode::MaxPositive},
        gated ? FusionBackend::Gated : FusionBackend::Mean);
    const ForwardTrace t = forward_bag(m, x, label, o);
    oracle::Options oo{k, pn, gated, o.feature_distillation, o.attention_channel, o.global_loss};
    const oracle::Result r = oracle::forward(testing::to_oracle(m.params()), testing::to_oracle(x), label, oo);

    auto diff = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    auto diff_all = [&](const std::vector<double>& a, const std::vector<double>& b) {
      if (a.size() != b.size()) {
        worst = INFINITY;
        return;
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        diff(a[i], b[i]);
      }
    };
    diff_all(t.instance_probs, r.probs);
    diff_all(t.attention_weights, r.alpha);
    diff(t.attention_branch_prob, r.branch);
    diff(t.final_prob, r.final_prob);
    diff(t.loss1, r.l1);
    diff(t.loss2, r.l2);
    diff(t.loss3, r.l3);
    diff(t.total_loss, r.total);
    if (std::vector<int>(t.channel1_indices.begin(), t.channel1_indices.end()) != r.ch1 ||
        std::vector<int>(t.channel2_indices.begin(), t.channel2_indices.end()) != r.ch2) {
      ++mismatched_selections;
    }
  }
  return {worst <= 1e-9 && mismatched_selections == 0,
          fmt::format("100 cases, max abs difference {:.2e} (<= 1e-9), {} selection mismatches", worst,
                      mismatched_selections)};
}

Outcome auc_oracle() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    const double grid = trial % 3 == 0 ? 0.0 : static_cast<double>(2 + gen() % 8);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = grid > 0 ? std::floor(u(gen) * grid) / grid : u(gen);
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(auc(s, y) - oracle::trapezoid_auc(s, y)));
  }
  const double hand = auc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{1, 0, 1, 0});
  return {worst <= 1e-12 && hand == 0.75,
          fmt::format("1000 inputs, max |pairwise - trapezoid| {:.2e} (<= 1e-12); hand case {}", worst, hand)};
}

Outcome global_loss_algebra() {
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int l = -20; l <= 20; ++l) {
        const long double l1 = i * 0.25L, l2 = j * 0.15L, l3 = l * 0.2L;
        const long double expect = (l1 + l2) * std::exp(-std::fabs(l3)) + l3;
        const double got = global_loss(static_cast<double>(l1), static_cast<double>(l2), static_cast<double>(l3));
        worst = std::max(worst, static_cast<double>(std::fabs(got - expect)));
        ++points;
      }
    }
  }
  const bool zero = global_loss(0, 0, 0) == 0.0;
  const double anchor = global_loss(0.5, 0.5, std::log(2.0));
  const bool half = std::abs(anchor - (0.5 + std::log(2.0))) <= 1e-12;
  return {worst <= 1e-12 && zero && half,
          fmt::format("grid of {} points, max error {:.2e} (<= 1e-12); (0,0,0) -> {}; (0.5,0.5,ln2) -> {:.15f}",
                      points, worst, global_loss(0, 0, 0), anchor)};
}

Outcome synthetic_benchmark() {
  std::vector<double> full, plain, fd;
  double slowest = 0.0;
  for (auto s : kProtocol.seeds) {
    const auto& r = benchmark_run(SynthKind::Binary, AblationRow::Full, kProtocol.k, DistillMode::MaxPositive, s);
    full.push_back(r.test_auc);
    slowest = std::max(slowest, r.seconds);
    plain.push_back(benchmark_run(SynthKind::Binary, AblationRow::Plain, kProtocol.k, DistillMode::MaxPositive, s).test_auc);
    fd.push_back(benchmark_run(SynthKind::Binary, AblationRow::InstanceDistill, kProtocol.k, DistillMode::MaxPositive, s).test_auc);
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  const bool each = std::all_of(full.begin(), full.end(), [](double a) { return a >= 0.95; });
  // Both toggles off, read either as no distillation at all or as
  // instance-channel distillation without the global loss.
  const bool beats = mean(full) > mean(plain) && mean(full) > mean(fd);
  return {each && beats && slowest < 300.0,
          fmt::format("full AUC per seed {:.4f} {:.4f} {:.4f} (each >= 0.95); mean {:.4f} vs plain {:.4f}, "
                      "instance-only {:.4f} (strictly greater); slowest run {:.0f} s (< 300 s)",
                      full[0], full[1], full[2], mean(full), mean(plain), mean(fd), slowest)};
}

Outcome ablation_trend() {
  const double full = mean_auc(SynthKind::Binary, AblationRow::Full, kProtocol.k, DistillMode::MaxPositive);
  bool ok = true;
  std::string rows;
  for (AblationRow row : {AblationRow::Plain, AblationRow::InstanceDistill, AblationRow::DualDistill}) {
    const double other = mean_auc(SynthKind::Binary, row, kProtocol.k, DistillMode::MaxPositive);
    ok = ok && full >= other - 0.01;
    rows += fmt::format(" {} {:.4f};", to_string(row), other);
  }
  return {ok, fmt::format("full {:.4f} vs{} need full >= each - 0.01", full, rows)};
}

Outcome mode_task_interaction() {
  const double pn = mean_auc(SynthKind::Subtype, AblationRow::Full, kProtocol.k, DistillMode::MaxPositiveNegative);
  const double p = mean_auc(SynthKind::Subtype, AblationRow::Full, kProtocol.k, DistillMode::MaxPositive);
  return {pn >= p - 0.01 && pn >= 0.90,
          fmt::format("subtype mean AUC max-pn {:.4f}, max-p {:.4f} (need pn >= p - 0.01 and pn >= 0.90)", pn, p)};
}

Outcome distillation_quality() {
  std::string per_seed;
  bool ok = true;
  for (auto s : kProtocol.seeds) {
    const auto& r = benchmark_run(SynthKind::Binary, AblationRow::Full, kProtocol.k, DistillMode::MaxPositive, s);
    double sum = 0.0;
    int bags = 0;
    for (const Bag& bag : r.test.bags) {
      if (bag.label != 1 || std::count(bag.latent->begin(), bag.latent->end(), 1) < 8) {
        continue;
      }
      const ForwardTrace t = forward_bag(r.model, bag.features, bag.label, r.options);
      sum += selection_precision(t.channel2_indices, *bag.latent);
      ++bags;
    }
    const double p = bags > 0 ? sum / bags : 0.0;
    ok = ok && bags > 0 && p >= 0.6;
    per_seed += fmt::format(" seed {}: {:.4f} over {} bags;", s, p, bags);
  }
  return {ok, fmt::format("channel-2 precision@8 on positive test bags with >= 8 witnesses:{} need >= 0.6", per_seed)};
}

Outcome k_sweep() {
  std::map<int, double> m;
  for (int k : {2, 8, 32}) {
    m[k] = mean_auc(SynthKind::Binary, AblationRow::Full, k, DistillMode::MaxPositive);
  }
  return {m[8] >= m[2], fmt::format("mean AUC k=2 {:.4f}, k=8 {:.4f}, k=32 {:.4f} (need k=8 >= k=2)", m[2], m[8], m[32])};
}

Outcome determinism_persistence() {
  const auto dir = testing::scratch_dir("acceptance_persist");
  SynthConfig sc;
  sc.bags_per_class = 20;
  sc.k_min = 10;
  sc.k_max = 30;
  sc.dim = 8;
  const Dataset ds = gen_binary(sc, 5).dataset;
  TrainConfig tc;
  tc.dims = {8, 8, 8, 8};
  tc.epochs = 3;
  tc.seed = 5;
  tc.adam.lr = 1e-3;
  tc.forward.distill = {4, DistillMode::MaxPositive};
  const TrainResult a = train(ds, tc);
  const TrainResult b = train(ds, tc);
  bytes::write_file(dir / "a.csv", format_history(a.history, a.selected_epoch));
  bytes::write_file(dir / "b.csv", format_history(b.history, b.selected_epoch));
  const bool history_same = bytes::read_file(dir / "a.csv") == bytes::read_file(dir / "b.csv");

  save_checkpoint({a.model, tc, a.selected_epoch, std::nullopt, std::string(Rng::kAlgorithm)}, dir / "m.ckpt");
  const Checkpoint back = load_checkpoint(dir / "m.ckpt", Index{8});
  bool forward_same = true;
  for (const Bag& bag : ds.bags) {
    const ForwardTrace x = forward_bag(a.model, bag.features, bag.label, tc.forward);
    const ForwardTrace y = forward_bag(back.model, bag.features, bag.label, tc.forward);
    forward_same = forward_same && x.final_prob == y.final_prob && x.total_loss == y.total_loss &&
                   x.instance_probs == y.instance_probs && x.attention_weights == y.attention_weights;
  }

  bool features_same = true;
  for (const Bag& bag : ds.bags) {
    write_features(bag.features, dir / "f.afdf");
    const std::string bytes1 = bytes::read_file(dir / "f.afdf");
    const Matrix back_f = read_features(dir / "f.afdf");
    features_same = features_same && back_f == bag.features.cast<float>().cast<double>() &&
                    encode_features(back_f) == bytes1;
  }
  return {history_same && forward_same && features_same,
          fmt::format("history byte-identical: {}; checkpoint forward exact: {}; feature files bit-exact: {}",
                      history_same, forward_same, features_same)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> all{
      {1, "gradient correctness", gradient_correctness},
      {2, "forward-path oracle", forward_oracle},
      {3, "AUC oracle", auc_oracle},
      {4, "global loss algebra", global_loss_algebra},
      {5, "synthetic benchmark", synthetic_benchmark},
      {6, "ablation trend", ablation_trend},
      {7, "mode x task interaction", mode_task_interaction},
      {8, "distillation quality", distillation_quality},
      {9, "k-sweep shape", k_sweep},
      {10, "determinism and persistence", determinism_persistence},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    wanted.insert(std::atoi(argv[i]));
  }
  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) {
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += o.pass ? 0 : 1;
    std::cout << fmt::format("{} criterion {} ({}): {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail)
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
