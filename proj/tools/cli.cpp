#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "bench.hpp"
#include "delta_scope/bounds.hpp"
#include "delta_scope/libsvm_io.hpp"
#include "delta_scope/loocv.hpp"
#include "delta_scope/model_io.hpp"
#include "report.hpp"

namespace delta_scope::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kLosses = {"logistic", "l2hinge"};
const std::vector<std::string> kFormats = {"json", "csv"};

struct Common {
  std::vector<std::string> args;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

void emit(const Common& io, const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    *io.out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

void flush_warnings(const Common& io, const Report& report) {
  for (const auto& w : report.warnings()) *io.err << "warning: " << w << "\n";
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw Error("not a number: '" + std::string(text) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "2^k" or a plain decimal.
double parse_grid_value(std::string_view text) {
  text = trim(text);
  if (text.starts_with("2^")) {
    const double e = parse_number(text.substr(2));
    if (e != std::floor(e)) throw Error("grid exponent must be an integer: '" + std::string(text) + "'");
    return std::ldexp(1.0, static_cast<int>(e));
  }
  return parse_number(text);
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> values;
  const auto dots = text.find("..");
  if (dots != std::string_view::npos) {
    const auto lo_text = trim(text.substr(0, dots));
    const auto hi_text = trim(text.substr(dots + 2));
    if (!lo_text.starts_with("2^") || !hi_text.starts_with("2^")) {
      throw Error("range grids must look like 2^a..2^b");
    }
    const double lo = parse_number(lo_text.substr(2));
    const double hi = parse_number(hi_text.substr(2));
    if (lo != std::floor(lo) || hi != std::floor(hi) || lo > hi) throw Error("invalid grid range '" + std::string(text) + "'");
    for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) values.push_back(std::ldexp(1.0, e));
    return values;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    values.push_back(parse_grid_value(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return values;
}

std::vector<std::size_t> read_index_file(const fs::path& path) {
  const auto text = read_file(path);
  std::vector<std::size_t> out;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(path.string(), ParseError(line_no, "expected a nonnegative row index, got '" + std::string(s) + "'"));
    }
    out.push_back(v);
  }
  return out;
}

unsigned resolve_threads(unsigned requested) {
  unsigned threads = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DELTA_SCOPE_THREADS"); cap && *cap) {
    unsigned limit = 0;
    const std::string_view s(cap);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), limit);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || limit == 0) {
      throw Error("DELTA_SCOPE_THREADS must be a positive integer, got '" + std::string(s) + "'");
    }
    threads = std::min(threads, limit);
  }
  return threads;
}

namespace {

Json update_json(const UpdateStats& stats) {
  return {{"n_old", stats.n_old},
          {"n_new", stats.n_new},
          {"n_added", stats.n_added},
          {"n_removed", stats.n_removed}};
}

Json bounds_json(const ScoreBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

void check_residual(const TrainedModel& model, Report& report) {
  if (model.grad_residual > kExactResidualThreshold) {
    std::ostringstream msg;
    msg << "model gradient residual " << model.grad_residual << " exceeds " << kExactResidualThreshold
        << "; the bounds assume the stored model is an exact optimum";
    report.warn(msg.str());
  }
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::size_t d = 5;
  double separation = 1.0;
  std::string out;
};

void cmd_gen(const Common& io, const GenArgs& a) {
  const auto ds = make_synthetic(a.seed, a.n, a.d, a.separation);
  const auto text = to_libsvm_string(ds);
  if (a.out.empty()) {
    *io.out << text;
    return;
  }
  write_file_atomic(a.out, text);
  Report report("gen", io.args);
  report.set_seed(a.seed);
  report.results() = {{"path", a.out}, {"n", ds.size()}, {"d", ds.dim()}, {"separation", a.separation},
                      {"sha256", sha256_file(a.out)}};
  *io.out << report.dump();
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string loss = "logistic";
  double lambda = 0.0;
  std::string out;
  std::string report;
  double tol = 1e-8;
  bool add_bias = false;
};

void cmd_train(const Common& io, const TrainArgs& a) {
  Report report("train", io.args);
  const auto ds = read_libsvm_file(a.data, {.dim = std::nullopt, .add_bias = a.add_bias});
  report.add_input("data", a.data);
  SolverOptions opts;
  opts.tol = a.tol;
  auto res = train(ds, a.lambda, parse_loss_kind(a.loss), opts);
  res.model.has_bias = a.add_bias;
  save_model(a.out, res.model);
  check_residual(res.model, report);
  report.results() = {{"model", a.out},
                      {"model_sha256", sha256_file(a.out)},
                      {"loss", a.loss},
                      {"lambda", a.lambda},
                      {"n_train", res.model.n_train},
                      {"dim", res.model.dim()},
                      {"has_bias", a.add_bias},
                      {"solve",
                       {{"iterations", res.report.iterations},
                        {"final_grad_norm", res.report.final_grad_norm},
                        {"tol", a.tol},
                        {"wall_time", res.report.wall_time}}}};
  flush_warnings(io, report);
  emit(io, report.dump(), a.report);
}

// ---- sensitivity -----------------------------------------------------------

struct SensitivityArgs {
  std::string model;
  std::string data;
  std::string add;
  std::string remove;
  std::string test;
  std::string out;
  std::string format = "json";
};

ParseOptions options_for(const TrainedModel& model) {
  if (model.has_bias && model.dim() == 0) throw Error("model has a bias feature but zero dimension");
  return {.dim = model.dim() - (model.has_bias ? 1 : 0), .add_bias = model.has_bias};
}

struct LoadedUpdate {
  TrainedModel model;
  SparseDataset base;
  UpdatePlan plan;
};

LoadedUpdate load_update(const SensitivityArgs& a, Report& report) {
  LoadedUpdate u;
  u.model = load_model(a.model);
  report.add_input("model", a.model);
  const auto opts = options_for(u.model);
  u.base = SparseDataset(u.model.dim());
  if (!a.data.empty()) {
    u.base = read_libsvm_file(a.data, opts);
    report.add_input("data", a.data);
    if (u.base.size() != u.model.n_train) {
      throw Error("training data has " + std::to_string(u.base.size()) + " rows but the model was trained on " +
                  std::to_string(u.model.n_train));
    }
  }
  if (!a.add.empty()) {
    const auto added = read_libsvm_file(a.add, opts);
    report.add_input("additions", a.add);
    for (std::size_t i = 0; i < added.size(); ++i) u.plan.added.push_back(added.instance(i));
  }
  if (!a.remove.empty()) {
    u.plan.removed = read_index_file(a.remove);
    report.add_input("removals", a.remove);
    if (!u.plan.removed.empty() && a.data.empty()) throw Error("removals need the training data (--data)");
  }
  u.plan.validate(u.base);
  return u;
}

void cmd_coef(const Common& io, const SensitivityArgs& a) {
  Report report("coef-sensitivity", io.args);
  const auto u = load_update(a, report);
  const auto stats = compute_delta_s(u.model, u.base, u.plan);
  check_residual(u.model, report);
  const auto ball = old_optimum_ball(u.model, stats);
  const auto coef = coefficient_bounds(ball);
  const double inf = std::numeric_limits<double>::infinity();

  if (a.format == "csv") {
    std::string text = csv_row({"index", "lower", "upper", "width"});
    for (std::size_t j = 0; j < coef.size(); ++j) {
      text += csv_row({std::to_string(j), csv_number(coef[j].lower()), csv_number(coef[j].upper()),
                       csv_number(coef[j].width())});
    }
    flush_warnings(io, report);
    emit(io, text, a.out);
    return;
  }
  Json intervals = Json::array();
  for (std::size_t j = 0; j < coef.size(); ++j) {
    intervals.push_back({{"index", j}, {"lower", coef[j].lower()}, {"upper", coef[j].upper()}});
  }
  report.results() = {{"update", update_json(stats)},
                      {"old_model_exact", stats.old_model_exact},
                      {"radius", ball.radius},
                      {"width", 2.0 * ball.radius},
                      {"norm_change",
                       {{"l1", norm_change_bound(u.model, coef, 1.0)},
                        {"l2", norm_change_bound(u.model, coef, 2.0)},
                        {"linf", norm_change_bound(u.model, coef, inf)}}},
                      {"coefficients", intervals}};
  flush_warnings(io, report);
  emit(io, report.dump(), a.out);
}

void cmd_label(const Common& io, const SensitivityArgs& a) {
  Report report("label-sensitivity", io.args);
  const auto u = load_update(a, report);
  const auto test = read_libsvm_file(a.test, options_for(u.model));
  report.add_input("test", a.test);
  const auto stats = compute_delta_s(u.model, u.base, u.plan);
  check_residual(u.model, report);
  const auto ball = old_optimum_ball(u.model, stats);

  std::vector<LabelDecision> decisions;
  std::size_t plus = 0, minus = 0, unknown = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    decisions.push_back(classify_with_bounds(ball, test.row(i)));
    switch (decisions.back().label) {
      case Label::Plus: ++plus; break;
      case Label::Minus: ++minus; break;
      case Label::Unknown: ++unknown; break;
    }
  }
  const double fraction =
      test.empty() ? 1.0 : static_cast<double>(plus + minus) / static_cast<double>(test.size());

  if (a.format == "csv") {
    std::string text = csv_row({"index", "lower", "upper", "decision"});
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      const auto& b = decisions[i].bounds;
      text += csv_row({std::to_string(i), csv_number(b.lower), csv_number(b.upper),
                       std::string(to_string(decisions[i].label))});
    }
    flush_warnings(io, report);
    emit(io, text, a.out);
    return;
  }
  Json instances = Json::array();
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    auto j = bounds_json(decisions[i].bounds);
    j["index"] = i;
    j["label"] = to_string(decisions[i].label);
    instances.push_back(std::move(j));
  }
  report.results() = {{"update", update_json(stats)},
                      {"old_model_exact", stats.old_model_exact},
                      {"radius", ball.radius},
                      {"n_test", test.size()},
                      {"fraction_determined", fraction},
                      {"counts", {{"plus", plus}, {"minus", minus}, {"unknown", unknown}}},
                      {"instances", instances}};
  flush_warnings(io, report);
  emit(io, report.dump(), a.out);
}

// ---- loocv -----------------------------------------------------------------

struct LoocvArgs {
  std::string data;
  std::string loss = "logistic";
  std::optional<double> lambda;
  std::string grid;
  std::string gamma_grid;
  std::size_t rbf_centers = 100;
  std::string mode = "op1";
  bool order_trick = false;
  bool prune_trick = false;
  unsigned threads = 0;
  double tol = 1e-8;
  bool add_bias = false;
  std::uint64_t seed = 0;
  bool folds = false;
  std::string out;
  std::string format = "json";
};

Json loocv_json(const LoocvResult& r, bool with_folds) {
  Json j = {{"n", r.n},
            {"error_rate", r.error_rate},
            {"error_lower", r.error_lower},
            {"error_upper", r.error_upper},
            {"screen_lower", r.screen_lower},
            {"screen_upper", r.screen_upper},
            {"pruned", r.pruned},
            {"solves_performed", r.solves_performed},
            {"solver_iterations", r.solver_iterations},
            {"full_solver_iterations", r.full_solver_iterations},
            {"timing", {{"bound_time", r.bound_time}, {"solve_time", r.solve_time}, {"wall_time", r.wall_time}}}};
  if (with_folds) {
    Json folds = Json::array();
    for (const auto& f : r.folds) {
      Json fj = {{"index", f.index},
                 {"decision", to_string(f.decision)},
                 {"correct", f.correct},
                 {"bounds", bounds_json(f.bounds)},
                 {"solver_iterations", f.solver_iterations}};
      if (std::isfinite(f.solved_margin)) fj["solved_margin"] = f.solved_margin;
      folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
  }
  return j;
}

void cmd_loocv(const Common& io, const LoocvArgs& a) {
  Report report("loocv", io.args);
  const auto ds = read_libsvm_file(a.data, {.dim = std::nullopt, .add_bias = a.add_bias});
  report.add_input("data", a.data);
  report.set_seed(a.seed);
  if (a.lambda.has_value() == !a.grid.empty()) throw Error("give exactly one of --lambda and --grid");

  ModelSelectOptions opts;
  opts.loocv.mode = parse_loocv_mode(a.mode);
  opts.loocv.order_trick = a.order_trick;
  opts.loocv.threads = resolve_threads(a.threads);
  opts.loocv.fold_solver.tol = a.tol;
  opts.prune_trick = a.prune_trick;
  opts.rbf_centers = a.rbf_centers;
  opts.seed = a.seed;
  const auto kind = parse_loss_kind(a.loss);

  const std::vector<double> lambdas = a.lambda ? std::vector<double>{*a.lambda} : parse_grid(a.grid);
  std::vector<std::optional<double>> gammas = {std::nullopt};
  if (!a.gamma_grid.empty()) {
    gammas.clear();
    for (double g : parse_grid(a.gamma_grid)) gammas.emplace_back(g);
  }
  std::vector<GridCell> grid;
  for (const auto& g : gammas) {
    for (double l : lambdas) {
      if (!(l > 0.0)) throw Error("lambda values must be positive");
      if (g && !(*g > 0.0)) throw Error("gamma values must be positive");
      grid.push_back({l, g});
    }
  }
  const auto sel = model_select(ds, grid, kind, opts);

  if (a.format == "csv") {
    std::string text = csv_row({"lambda", "gamma", "error_rate", "error_lower", "error_upper", "pruned",
                                "solves_performed", "solver_iterations", "bound_time", "solve_time", "wall_time",
                                "selected"});
    for (std::size_t c = 0; c < sel.cells.size(); ++c) {
      const auto& cell = sel.cells[c];
      const auto& r = cell.result;
      text += csv_row({csv_number(cell.cell.lambda),
                       cell.cell.rbf_gamma ? csv_number(*cell.cell.rbf_gamma) : std::string(),
                       csv_number(r.error_rate), csv_number(r.error_lower), csv_number(r.error_upper),
                       r.pruned ? "true" : "false", std::to_string(r.solves_performed),
                       std::to_string(r.solver_iterations), csv_number(r.bound_time), csv_number(r.solve_time),
                       csv_number(r.wall_time), c == sel.best_index ? "true" : "false"});
    }
    flush_warnings(io, report);
    emit(io, text, a.out);
    return;
  }

  Json cells = Json::array();
  std::size_t iterations = 0;
  double wall = 0.0;
  for (const auto& cell : sel.cells) {
    Json cj = {{"lambda", cell.cell.lambda}};
    cj["gamma"] = cell.cell.rbf_gamma ? Json(*cell.cell.rbf_gamma) : Json(nullptr);
    cj["result"] = loocv_json(cell.result, a.folds);
    cells.push_back(std::move(cj));
    iterations += cell.result.solver_iterations;
    wall += cell.result.wall_time;
  }
  Json selected = {{"index", sel.best_index}, {"lambda", sel.best().lambda}};
  selected["gamma"] = sel.best().rbf_gamma ? Json(*sel.best().rbf_gamma) : Json(nullptr);
  selected["error_rate"] = sel.cells[sel.best_index].result.error_rate;
  report.results() = {{"loss", a.loss},
                      {"mode", a.mode},
                      {"order_trick", a.order_trick},
                      {"prune_trick", a.prune_trick},
                      {"threads", opts.loocv.threads},
                      {"n_cells", sel.cells.size()},
                      {"selected", selected},
                      {"total_solver_iterations", iterations},
                      {"total_wall_time", wall},
                      {"cells", cells}};
  flush_warnings(io, report);
  emit(io, report.dump(), a.out);
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string data;
  std::string test;
  std::string name;
  std::size_t n = 10000;
  std::size_t d = 20;
  double separation = 1.0;
  std::size_t test_n = 1000;
  std::string lambda = "0.01";
  std::string loss = "logistic";
  std::string sweep = "update-fraction";
  std::string points;
  double fixed_update = 0.001;
  std::size_t repeats = 30;
  std::size_t timing_reps = 5;
  bool no_retrain = false;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  bool add_bias = false;
  std::string out;
  std::string format = "csv";
};

void cmd_bench(const Common& io, const BenchArgs& a) {
  Report report("bench", io.args);
  report.set_seed(a.seed);
  if (!a.data.empty() && a.test.empty()) throw Error("--data needs a matching --test file");
  SparseDataset train_set, test_set;
  BenchConfig cfg;
  if (a.data.empty()) {
    train_set = make_synthetic(a.seed, a.n, a.d, a.separation);
    test_set = make_synthetic(a.seed + 1, a.test_n, a.d, a.separation);
    if (a.add_bias) {
      train_set = with_bias(train_set);
      test_set = with_bias(test_set);
    }
    cfg.dataset_name = a.name.empty() ? "synthetic" : a.name;
  } else {
    train_set = read_libsvm_file(a.data, {.dim = std::nullopt, .add_bias = false});
    test_set = read_libsvm_file(a.test, {.dim = train_set.dim(), .add_bias = a.add_bias});
    if (a.add_bias) train_set = with_bias(train_set);
    report.add_input("data", a.data);
    report.add_input("test", a.test);
    cfg.dataset_name = a.name.empty() ? fs::path(a.data).stem().string() : a.name;
  }
  cfg.lambdas = parse_grid(a.lambda);
  for (double l : cfg.lambdas) {
    if (!(l > 0.0)) throw Error("lambda values must be positive");
  }
  cfg.kind = parse_loss_kind(a.loss);
  cfg.sweep = a.sweep == "n-old" ? Sweep::OldFraction : Sweep::UpdateFraction;
  if (!a.points.empty()) {
    cfg.points = parse_grid(a.points);
  } else if (cfg.sweep == Sweep::UpdateFraction) {
    cfg.points = {0.0001, 0.0002, 0.0005, 0.001, 0.002, 0.005, 0.01};
  } else {
    cfg.points = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
  }
  for (double p : cfg.points) {
    if (!(p > 0.0 && p <= 1.0)) throw Error("sweep points must lie in (0, 1]");
  }
  cfg.fixed_update_fraction = a.fixed_update;
  cfg.repeats = a.repeats;
  cfg.timing_repetitions = a.timing_reps;
  cfg.retrain = !a.no_retrain;
  cfg.seed = a.seed;
  cfg.solver.tol = a.tol;

  const auto rows = run_bench(train_set, test_set, cfg);
  if (a.format == "csv") {
    std::string text = bench_csv_header();
    for (const auto& row : rows) text += bench_csv_line(row);
    emit(io, text, a.out);
    return;
  }
  Json jrows = Json::array();
  for (const auto& row : rows) {
    Json j = {{"dataset", row.dataset},
              {"lambda", row.lambda},
              {"sweep", to_string(row.sweep)},
              {"update_fraction", row.update_fraction},
              {"old_fraction", row.old_fraction},
              {"n_old", row.n_old},
              {"n_added", row.n_added},
              {"n_removed", row.n_removed},
              {"repeat", row.repeat},
              {"tightness", row.tightness},
              {"fraction_determined", row.fraction_determined},
              {"bound_time", row.bound_time}};
    j["retrain_time"] = row.retrain_time ? Json(*row.retrain_time) : Json(nullptr);
    jrows.push_back(std::move(j));
  }
  report.results() = {{"dataset", cfg.dataset_name},
                      {"n_train", train_set.size()},
                      {"n_test", test_set.size()},
                      {"dim", train_set.dim()},
                      {"rows", jrows}};
  emit(io, report.dump(), a.out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on retrained L2-regularized linear classifiers without retraining", "delta-scope"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "delta-scope 1.0.0");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a seeded two-cluster synthetic dataset in libsvm format");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--n", gen.n, "Number of instances")->check(CLI::PositiveNumber);
  g->add_option("--d", gen.d, "Number of features")->check(CLI::PositiveNumber);
  g->add_option("--separation", gen.separation, "Distance between the class means")->check(CLI::NonNegativeNumber);
  g->add_option("--out", gen.out, "Output file (default: stdout)");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model and save it as JSON");
  t->add_option("--data", tr.data, "Training data (libsvm)")->required();
  t->add_option("--loss", tr.loss, "Loss function")->check(CLI::IsMember(kLosses));
  t->add_option("--lambda", tr.lambda, "Regularization strength")->required()->check(CLI::PositiveNumber);
  t->add_option("--out", tr.out, "Model file to write")->required();
  t->add_option("--report", tr.report, "Report file (default: stdout)");
  t->add_option("--tol", tr.tol, "Gradient-norm tolerance")->check(CLI::PositiveNumber);
  t->add_flag("--add-bias", tr.add_bias, "Append a constant-1 feature");

  SensitivityArgs coef;
  auto* c = app.add_subcommand("coef-sensitivity", "Intervals on every coefficient of the updated model");
  SensitivityArgs label;
  auto* l = app.add_subcommand("label-sensitivity", "Which test labels are fixed by the update bounds");
  for (auto [sub, sa] : {std::pair{c, &coef}, std::pair{l, &label}}) {
    sub->add_option("--model", sa->model, "Model file from `train`")->required();
    sub->add_option("--data", sa->data, "Training data the model was fitted on (needed for removals)");
    sub->add_option("--add", sa->add, "Instances to add (libsvm)");
    sub->add_option("--remove", sa->remove, "Row indices to remove, one 0-based index per line");
    sub->add_option("--out", sa->out, "Output file (default: stdout)");
    sub->add_option("--format", sa->format, "Output format")->check(CLI::IsMember(kFormats));
  }
  l->add_option("--test", label.test, "Test instances (libsvm)")->required();

  LoocvArgs lo;
  auto* v = app.add_subcommand("loocv", "Leave-one-out error, optionally over a model-selection grid");
  v->add_option("--data", lo.data, "Training data (libsvm)")->required();
  v->add_option("--loss", lo.loss, "Loss function")->check(CLI::IsMember(kLosses));
  v->add_option("--lambda", lo.lambda, "Single regularization strength")->check(CLI::PositiveNumber);
  v->add_option("--grid", lo.grid, "Lambda grid: 2^a..2^b or a comma-separated list");
  v->add_option("--gamma-grid", lo.gamma_grid, "RBF gamma grid; enables the random-centre RBF features");
  v->add_option("--rbf-centers", lo.rbf_centers, "Number of RBF centres")->check(CLI::PositiveNumber);
  v->add_option("--mode", lo.mode, "exact, op1 (bounds first) or op2 (bounds plus early stop)")
      ->check(CLI::IsMember({"exact", "op1", "op2"}));
  v->add_flag("--order-trick", lo.order_trick, "Solve undecided folds in ascending margin-bound order");
  v->add_flag("--prune-trick", lo.prune_trick, "Abandon grid cells that cannot beat the incumbent");
  v->add_option("--threads", lo.threads, "Worker threads (0: all cores, capped by DELTA_SCOPE_THREADS)");
  v->add_option("--tol", lo.tol, "Fold solver tolerance")->check(CLI::PositiveNumber);
  v->add_flag("--add-bias", lo.add_bias, "Append a constant-1 feature");
  v->add_option("--seed", lo.seed, "Seed for RBF centre sampling");
  v->add_flag("--folds", lo.folds, "Include per-fold outcomes in the JSON report");
  v->add_option("--out", lo.out, "Output file (default: stdout)");
  v->add_option("--format", lo.format, "Output format")->check(CLI::IsMember(kFormats));

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Tightness and timing table over seeded random updates");
  b->add_option("--data", be.data, "Training data (libsvm); synthetic data is used when omitted");
  b->add_option("--test", be.test, "Test data (libsvm) for the label-decision rate");
  b->add_option("--name", be.name, "Dataset name written in each row");
  b->add_option("--n", be.n, "Synthetic training size")->check(CLI::PositiveNumber);
  b->add_option("--d", be.d, "Synthetic feature count")->check(CLI::PositiveNumber);
  b->add_option("--separation", be.separation, "Synthetic class separation")->check(CLI::NonNegativeNumber);
  b->add_option("--test-n", be.test_n, "Synthetic test size")->check(CLI::PositiveNumber);
  b->add_option("--lambda", be.lambda, "Lambda value(s): a number, a list, or 2^a..2^b");
  b->add_option("--loss", be.loss, "Loss function")->check(CLI::IsMember(kLosses));
  b->add_option("--sweep", be.sweep, "update-fraction or n-old")->check(CLI::IsMember({"update-fraction", "n-old"}));
  b->add_option("--points", be.points, "Sweep points as fractions (comma-separated)");
  b->add_option("--update-size", be.fixed_update, "Update size for the n-old sweep, as a fraction of n_train")
      ->check(CLI::Range(0.0, 1.0));
  b->add_option("--repeats", be.repeats, "Seeded repeats per sweep point")->check(CLI::PositiveNumber);
  b->add_option("--timing-reps", be.timing_reps, "Repetitions per bound timing (median is kept)")
      ->check(CLI::PositiveNumber);
  b->add_flag("--no-retrain", be.no_retrain, "Skip the exact retrain and leave retrain_time empty");
  b->add_option("--seed", be.seed, "Random seed");
  b->add_option("--tol", be.tol, "Solver tolerance for old and retrained models")->check(CLI::PositiveNumber);
  b->add_flag("--add-bias", be.add_bias, "Append a constant-1 feature");
  b->add_option("--out", be.out, "Output file (default: stdout)");
  b->add_option("--format", be.format, "Output format")->check(CLI::IsMember(kFormats));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const Common io{args, &out, &err};
  try {
    if (g->parsed()) cmd_gen(io, gen);
    if (t->parsed()) cmd_train(io, tr);
    if (c->parsed()) cmd_coef(io, coef);
    if (l->parsed()) cmd_label(io, label);
    if (v->parsed()) cmd_loocv(io, lo);
    if (b->parsed()) cmd_bench(io, be);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace delta_scope::cli
