// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bench.hpp"
#include "delta_scope/bounds.hpp"
#include "delta_scope/libsvm_io.hpp"
#include "delta_scope/loocv.hpp"
#include "support/oracle.hpp"

using namespace delta_scope;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// One randomized update problem with its exact post-update optimum.
struct Case {
  SparseDataset base;
  UpdatePlan plan;
  SparseDataset updated;
  SparseDataset test;
  double lambda = 0.0;
  LossKind kind = LossKind::Logistic;
  TrainedModel old;
  std::vector<double> exact_new;
};

std::vector<Case> make_cases(std::size_t count, double& build_seconds) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> n_dist(50, 500), d_dist(2, 50), k_dist(1, 10);
  const double lambdas[] = {0.01, 0.1, 1.0};
  std::vector<Case> cases;
  for (std::size_t c = 0; c < count; ++c) {
    Case cs;
    const std::size_t n = n_dist(rng), d = d_dist(rng), k = k_dist(rng);
    const std::size_t n_added = std::uniform_int_distribution<std::size_t>(0, k)(rng);
    cs.lambda = lambdas[c % 3];
    cs.kind = (c / 3) % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    cs.base = oracle::random_dataset(rng, n, d);
    const auto pool = oracle::random_dataset(rng, 10, d);
    cs.test = oracle::random_dataset(rng, 20, d);
    cs.plan = make_random_update(rng(), cs.base, k - n_added, pool, n_added);
    cs.updated = apply_update(cs.base, cs.plan);
    SolverOptions tight;
    tight.tol = 1e-12;
    cs.old = train(cs.base, cs.lambda, cs.kind, tight).model;
    cs.exact_new = oracle::to_std(oracle::newton_solve(cs.updated, cs.lambda, cs.kind).beta);
    cases.push_back(std::move(cs));
  }
  build_seconds = seconds_since(start);
  return cases;
}

// Every eta used on a case: the coordinate axes, the test rows, and y_h x_h
// for a few rows of the updated training set.
void for_each_eta(const Case& cs, const std::function<void(const std::vector<double>&)>& fn) {
  const std::size_t d = cs.base.dim();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    fn(e);
  }
  for (std::size_t i = 0; i < cs.test.size(); ++i) fn(to_dense(cs.test.row(i), d));
  for (std::size_t i = 0; i < cs.updated.size(); i += std::max<std::size_t>(1, cs.updated.size() / 5)) {
    auto v = to_dense(cs.updated.row(i), d);
    for (auto& x : v) x *= cs.updated.label(i);
    fn(v);
  }
}

Outcome sandwich(const std::vector<Case>& cases, double build_seconds) {
  const auto start = Clock::now();
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t checks = 0;
  for (const auto& cs : cases) {
    const auto ball = old_optimum_ball(cs.old, compute_delta_s(cs.old, cs.base, cs.plan));
    for_each_eta(cs, [&](const std::vector<double>& eta) {
      const auto b = score_bounds(ball, eta);
      const double s = dot(std::span<const double>(eta), cs.exact_new);
      worst = std::max({worst, b.lower - s, s - b.upper});
      ++checks;
    });
  }
  const double total = build_seconds + seconds_since(start);
  const bool ok = worst <= 1e-7 && total < 120.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt("%zu cases, %zu scores, max violation %.3g (limit 1e-7), %.1f s (limit 120 s)", cases.size(), checks,
              std::max(worst, 0.0), total)};
}

Outcome gap_identities(const std::vector<Case>& cases) {
  double worst1 = 0.0, worst2 = 0.0;
  for (const auto& cs : cases) {
    const auto ball = old_optimum_ball(cs.old, compute_delta_s(cs.old, cs.base, cs.plan));
    std::vector<double> g(cs.base.dim());
    objective_and_gradient(cs.updated, cs.old.beta, cs.lambda, cs.kind, g);
    const double g_norm = norm(std::span<const double>(g));
    const auto gball = gradient_ball(cs.old.beta, g, cs.lambda);
    for_each_eta(cs, [&](const std::vector<double>& eta) {
      const double eta_norm = norm(std::span<const double>(eta));
      const auto b1 = score_bounds(ball, eta);
      const double want1 = 2.0 * eta_norm * ball.radius;
      worst1 = std::max(worst1, std::abs(b1.width() - want1) / std::max(want1, 1e-300));
      const auto b2 = score_bounds(gball, eta);
      const double want2 = eta_norm * g_norm / cs.lambda;
      worst2 = std::max(worst2, std::abs(b2.width() - want2) / std::max(want2, 1e-300));
    });
  }
  const bool ok = worst1 <= 1e-10 && worst2 <= 1e-10;
  return {ok ? Status::Pass : Status::Fail,
          fmt("max relative error: old-optimum ball %.3g, gradient ball %.3g (limit 1e-10)", worst1, worst2)};
}

Outcome trajectory(const std::vector<Case>& cases) {
  double worst = -std::numeric_limits<double>::infinity();
  double worst_final = 0.0;
  std::size_t iterates = 0;
  const std::size_t solves = std::min<std::size_t>(50, cases.size());
  for (std::size_t c = 0; c < solves; ++c) {
    const auto& cs = cases[c];
    SolverOptions opts;
    opts.tol = 1e-8;
    auto hook = [&](std::span<const double> beta, std::span<const double> grad) {
      const auto ball = gradient_ball(beta, grad, cs.lambda);
      double sq = 0.0;
      for (std::size_t j = 0; j < beta.size(); ++j) sq += (cs.exact_new[j] - ball.center[j]) * (cs.exact_new[j] - ball.center[j]);
      worst = std::max(worst, std::sqrt(sq) - ball.radius);
      ++iterates;
      return false;
    };
    const auto res = incremental_train(cs.old, cs.updated, opts, hook);
    std::vector<double> g(cs.base.dim());
    objective_and_gradient(cs.updated, res.model.beta, cs.lambda, cs.kind, g);
    hook(res.model.beta, g);
    const auto ball = gradient_ball(res.model.beta, g, cs.lambda);
    for (std::size_t i = 0; i < cs.test.size(); ++i) {
      const auto b = score_bounds(ball, cs.test.row(i));
      const double limit = b.eta_norm * opts.tol / cs.lambda;
      worst_final = std::max(worst_final, b.width() / limit);
    }
  }
  const bool ok = worst <= 1e-8 && worst_final <= 1.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt("%zu solves, %zu iterates, max distance beyond radius %.3g (limit 1e-8), final gap / (|eta| tol / "
              "lambda) max %.3g (limit 1)",
              solves, iterates, std::max(worst, 0.0), worst_final)};
}

Outcome box_dominance(const std::vector<Case>& cases) {
  double worst_box = 0.0, worst_width = 0.0;
  for (const auto& cs : cases) {
    const auto ball = old_optimum_ball(cs.old, compute_delta_s(cs.old, cs.base, cs.plan));
    const auto coef = coefficient_bounds(ball);
    for (const auto& c : coef) worst_width = std::max(worst_width, std::abs(c.width() - coef.front().width()));
    for_each_eta(cs, [&](const std::vector<double>& eta) {
      const auto tight = score_bounds(ball, eta);
      const auto box = naive_score_bounds(coef, eta);
      const double scale = 1.0 + std::abs(tight.lower) + std::abs(tight.upper);
      worst_box = std::max({worst_box, (box.lower - tight.lower) / scale, (tight.lower - tight.upper) / scale,
                            (tight.upper - box.upper) / scale});
    });
  }
  const bool ok = worst_box <= 1e-12 && worst_width <= 1e-12;
  return {ok ? Status::Pass : Status::Fail,
          fmt("max ordering violation %.3g, max width spread %.3g (limit 1e-12)", worst_box, worst_width)};
}

Outcome gradient_fd() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  std::size_t probes = 0;
  for (auto kind : {LossKind::Logistic, LossKind::L2Hinge}) {
    for (int p = 0; p < 100; ++p) {
      const std::size_t d = 2 + p % 15;
      const auto ds = oracle::random_dataset(rng, 30 + p, d);
      const double lambda = std::ldexp(1.0, -(p % 8));
      std::vector<double> beta(d);
      for (auto& b : beta) b = 0.5 * g(rng);
      std::vector<double> grad(d);
      objective_and_gradient(ds, beta, lambda, kind, grad);
      double err = 0.0, ref = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(beta[j]));
        auto plus = beta, minus = beta;
        plus[j] += h;
        minus[j] -= h;
        const double fd = (objective(ds, plus, lambda, kind) - objective(ds, minus, lambda, kind)) / (2.0 * h);
        err += (fd - grad[j]) * (fd - grad[j]);
        ref += grad[j] * grad[j];
      }
      worst = std::max(worst, std::sqrt(err) / std::max(std::sqrt(ref), 1e-8));
      ++probes;
    }
  }
  return {worst < 1e-5 ? Status::Pass : Status::Fail,
          fmt("%zu probes over both losses, max relative error %.3g (limit 1e-5)", probes, worst)};
}

Outcome loocv_exactness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::size_t> n_dist(50, 200), d_dist(2, 60);
  const double lambdas[] = {0.01, 0.1, 1.0};
  std::size_t mismatches = 0, excluded = 0, folds = 0;
  for (int p = 0; p < 20; ++p) {
    const auto ds = oracle::random_dataset(rng, n_dist(rng), d_dist(rng));
    const auto kind = p % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    LoocvOptions opts;
    opts.full_solver.tol = 1e-11;
    opts.fold_solver.tol = 1e-10;
    opts.mode = LoocvMode::Exact;
    const auto full = train(ds, lambdas[p % 3], kind, opts.full_solver).model;
    const auto exact = run_loocv(full, ds, opts);
    opts.mode = LoocvMode::Op1;
    const auto op1 = run_loocv(full, ds, opts);
    opts.mode = LoocvMode::Op2;
    const auto op2 = run_loocv(full, ds, opts);
    std::size_t err_exact = 0, err_op1 = 0, err_op2 = 0;
    for (std::size_t h = 0; h < ds.size(); ++h) {
      if (std::abs(exact.folds[h].solved_margin) < 1e-7) {
        ++excluded;
        continue;
      }
      ++folds;
      err_exact += !exact.folds[h].correct;
      err_op1 += !op1.folds[h].correct;
      err_op2 += !op2.folds[h].correct;
      mismatches += op1.folds[h].correct != exact.folds[h].correct;
      mismatches += op2.folds[h].correct != exact.folds[h].correct;
    }
    mismatches += (err_op1 != err_exact) + (err_op2 != err_exact);
  }
  const double seconds = seconds_since(start);
  const bool ok = mismatches == 0 && seconds < 300.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt("20 problems, %zu folds compared, %zu near-zero folds excluded, %zu mismatches, %.1f s (limit 300 s)",
              folds, excluded, mismatches, seconds)};
}

double median_bound_time(const SparseDataset& base, const SparseDataset& pool, const SparseDataset& test,
                         const TrainedModel& model) {
  std::vector<double> times;
  for (std::uint64_t rep = 0; rep < 401; ++rep) {
    const auto plan = make_random_update(rep, base, 5, pool, 5);
    const auto t = Clock::now();
    const auto ball = old_optimum_ball(model, compute_delta_s(model, base, plan));
    double sink = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) sink += score_bounds(ball, test.row(i)).upper;
    times.push_back(seconds_since(t));
    if (!std::isfinite(sink)) std::abort();
  }
  std::nth_element(times.begin(), times.begin() + 200, times.end());
  return times[200];
}

Outcome complexity() {
  const std::size_t d = 50;
  const auto pool = make_synthetic(9, 100, d, 1.0);
  const auto test = make_synthetic(10, 100, d, 1.0);
  double t[2];
  const std::size_t sizes[2] = {10000, 100000};
  for (int s = 0; s < 2; ++s) {
    const auto base = make_synthetic(8, sizes[s], d, 1.0);
    SolverOptions opts;
    opts.tol = 1e-8;
    const auto model = train(base, 0.01, LossKind::Logistic, opts).model;
    t[s] = median_bound_time(base, pool, test, model);
  }
  const double ratio = t[1] / t[0];
  return {ratio < 2.0 ? Status::Pass : Status::Fail,
          fmt("median ball + 100 score bounds with n_A+n_R = 10: %.3g s at n=1e4, %.3g s at n=1e5, ratio %.3f "
              "(limit 2)",
              t[0], t[1], ratio)};
}

Outcome op2_efficiency() {
  const auto ds = make_synthetic(208, 208, 60, 2.0);
  const auto grid = log2_lambda_grid(-10, 0);
  std::string detail;
  bool ok = true;
  for (auto kind : {LossKind::Logistic, LossKind::L2Hinge}) {
    std::size_t iters[3] = {0, 0, 0};
    const LoocvMode modes[3] = {LoocvMode::Exact, LoocvMode::Op1, LoocvMode::Op2};
    for (int m = 0; m < 3; ++m) {
      ModelSelectOptions opts;
      opts.loocv.mode = modes[m];
      for (const auto& cell : model_select(ds, grid, kind, opts).cells) iters[m] += cell.result.solver_iterations;
    }
    ok = ok && iters[2] <= iters[1] && iters[1] <= iters[0];
    detail += fmt("%s exact %zu, op1 %zu, op2 %zu; ", std::string(to_string(kind)).c_str(), iters[0], iters[1],
                  iters[2]);
  }
  detail += "11-cell grid 2^-10..2^0, 208x60";
  return {ok ? Status::Pass : Status::Fail, detail};
}

Outcome a9a_reproduction() {
  std::filesystem::path dir = DELTA_SCOPE_SOURCE_DIR "/data/a9a";
  if (const char* env = std::getenv("DELTA_SCOPE_A9A_DIR"); env && *env) dir = env;
  if (!std::filesystem::exists(dir / "a9a") || !std::filesystem::exists(dir / "a9a.t")) {
    return {Status::Skip, "a9a and a9a.t not found in " + dir.string() + " (set DELTA_SCOPE_A9A_DIR)"};
  }
  const auto train_set = read_libsvm_file(dir / "a9a", {.dim = 123, .add_bias = false});
  const auto test_set = read_libsvm_file(dir / "a9a.t", {.dim = 123, .add_bias = false});
  cli::BenchConfig cfg;
  cfg.dataset_name = "a9a";
  cfg.lambdas = {0.01};
  cfg.points = {0.0001};
  cfg.repeats = 30;
  cfg.retrain = false;
  cfg.timing_repetitions = 1;
  cfg.seed = 1;
  cfg.solver.tol = 1e-10;
  const auto rows = cli::run_bench(train_set, test_set, cfg);
  double fraction = 0.0, tightness = 0.0;
  for (const auto& r : rows) {
    fraction += r.fraction_determined;
    tightness += r.tightness;
  }
  fraction /= static_cast<double>(rows.size());
  tightness /= static_cast<double>(rows.size());
  const bool ok = std::abs(fraction - 0.996345) <= 0.05 && tightness <= 3.0 * 5.68e-3 && tightness >= 5.68e-3 / 3.0;
  return {ok ? Status::Pass : Status::Fail,
          fmt("mean fraction determined %.6f (target 0.996345 +- 0.05), mean tightness %.3g (target 5.68e-03 within "
              "x3)",
              fraction, tightness)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const Outcome& o) {
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::printf("[%s] %s: %s\n", tag, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.status == Status::Fail;
  };

  double build_seconds = 0.0;
  const auto cases = make_cases(200, build_seconds);
  report("sandwich soundness", sandwich(cases, build_seconds));
  report("gap identities", gap_identities(cases));
  report("gradient-ball trajectory", trajectory(cases));
  report("loocv exactness", loocv_exactness());
  report("bound cost independent of n", complexity());
  report("box dominance and width uniformity", box_dominance(cases));
  report("objective gradient vs finite differences", gradient_fd());
  report("a9a reproduction", a9a_reproduction());
  report("op2 efficiency", op2_efficiency());
  return failures == 0 ? 0 : 1;
}
