// Command-line front end: instance generation, solving, exact recovery,
// certification, and the benchmark harness.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fisher/fisher.hpp"

namespace fs = std::filesystem;
using namespace fisher;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

Dist parse_dist(const std::string& s) {
  if (s == "uniform") return Dist::Uniform01;
  if (s == "integer") return Dist::IntegerUniform;
  if (s == "exponential" || s == "exp") return Dist::Exponential;
  if (s == "lognormal") return Dist::LogNormal;
  throw Error(ErrorCode::BadInput, "unknown distribution: " + s);
}

json gen_spec_to_json(const GenSpec& spec) {
  return json{{"kind", kind_name(spec.kind)}, {"n", spec.n},
              {"m", spec.m},                  {"dist", dist_name(spec.dist)},
              {"integer_max", spec.integer_max}, {"seed", spec.seed}};
}

struct BenchRow {
  std::string algo;
  std::string instance;
  double epsilon;
  std::int64_t iterations;
  double wall_time;
  double final_gap;
  bool certified;
};

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::BadInput, "cannot write " + path);
  out << "algo,instance,epsilon,iterations,wall_time,final_gap,certified\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%lld,%.6f,%.17g,%d\n", r.algo.c_str(),
                  r.instance.c_str(), r.epsilon, (long long)r.iterations, r.wall_time,
                  r.final_gap, int(r.certified));
    out << buf;
  }
}

int cmd_gen(const GenSpec& spec, const std::string& ratings, const std::string& out_path) {
  json doc;
  if (!ratings.empty()) {
    MarketInstance inst = load_ratings_csv(ratings, spec.kind);
    doc = instance_to_json(inst);
    doc["source"] = json{{"ratings_csv", ratings}};
  } else {
    MarketInstance inst = generate(spec);
    doc = instance_to_json(inst);
    doc["gen"] = gen_spec_to_json(spec);
  }
  if (out_path.empty())
    std::cout << doc.dump(2) << "\n";
  else
    write_json(out_path, doc);
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& algo, double eps,
              const std::string& trace_path, bool strict, bool continuation,
              std::int64_t max_iters) {
  MarketInstance inst = read_instance(instance_path);
  PriceBounds bounds = price_bounds(inst);
  json out{{"algo", algo}, {"epsilon", eps}, {"instance", instance_path}};

  if (algo == "apm") {
    ApmParams params = apm_params(inst, bounds, eps, strict);
    if (max_iters > 0) params.max_iters = max_iters;
    SolveReport rep =
        continuation
            ? apm_solve_continuation(inst, bounds, eps, strict, std::nullopt,
                                     !trace_path.empty())
            : apm_solve(inst, params, std::nullopt, !trace_path.empty());
    std::vector<double> x = approx_allocation(inst, params, rep.mu, rep.weights);
    json alloc = json::array();
    for (int i = 0; i < inst.buyers(); ++i) {
      json row = json::array();
      for (int j = 0; j < inst.goods(); ++j) row.push_back(x[std::size_t(i) * inst.goods() + j]);
      alloc.push_back(std::move(row));
    }
    out["prices"] = rep.prices;
    out["mu"] = rep.mu;
    out["iterations"] = rep.iterations;
    out["final_grad_norm"] = rep.final_grad_norm;
    out["f_value"] = rep.f_value;
    out["success"] = !rep.max_iters_hit;
    out["allocation"] = std::move(alloc);
    if (!trace_path.empty()) write_trace_csv(trace_path, rep.trace);
  } else if (algo == "tat" || algo == "pr") {
    // Baselines stop on the objective gap, so certify F* first.
    ExactResult ref = adaptive_solve(inst);
    if (!ref.certified)
      throw Error(ErrorCode::NotCertified, "could not certify a reference optimum");
    const double f_star = eval_F(inst, ref.mu_star);
    GapRunReport rep;
    if (algo == "tat") {
      BaselineConfig cfg = tatonnement_config();
      if (max_iters > 0) cfg.max_iters = max_iters;
      rep = tatonnement_solve(inst, bounds, cfg, eps, f_star, !trace_path.empty());
    } else {
      BaselineConfig cfg = proportional_response_config();
      if (max_iters > 0) cfg.max_iters = max_iters;
      rep = proportional_response_solve(inst, cfg, eps, f_star, !trace_path.empty());
    }
    std::vector<double> prices(inst.goods());
    for (int j = 0; j < inst.goods(); ++j) prices[j] = std::exp(rep.mu[j]);
    out["prices"] = prices;
    out["mu"] = rep.mu;
    out["iterations"] = rep.iterations;
    out["final_gap"] = rep.final_gap;
    out["f_star_reference"] = f_star;
    out["success"] = rep.reached;
    if (!trace_path.empty()) write_trace_csv(trace_path, rep.trace);
  } else {
    throw Error(ErrorCode::BadInput, "unknown algorithm: " + algo);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_exact(const std::string& instance_path, double theta, const std::string& inner,
              const std::string& out_path) {
  MarketInstance inst = read_instance(instance_path);
  AdaptiveConfig cfg;
  cfg.theta = theta;
  if (inner == "tat") cfg.inner = InnerSolver::Tatonnement;
  ExactResult res = adaptive_solve(inst, cfg);
  json doc = exact_result_to_json(inst, res);
  doc["instance"] = instance_path;
  if (out_path.empty())
    std::cout << doc.dump(2) << "\n";
  else {
    write_json(out_path, doc);
    std::cout << json{{"certified", res.certified}, {"out", out_path}}.dump() << "\n";
  }
  return res.certified ? 0 : 2;
}

int cmd_certify(const std::string& instance_path, const std::string& prices_path, double tol) {
  MarketInstance inst = read_instance(instance_path);
  std::ifstream in(prices_path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open prices file: " + prices_path);
  json pdoc = json::parse(in);
  std::vector<double> prices;
  if (pdoc.is_array())
    prices = pdoc.get<std::vector<double>>();
  else if (pdoc.contains("prices"))
    prices = pdoc.at("prices").get<std::vector<double>>();
  else
    throw Error(ErrorCode::BadInput, "prices file must be an array or contain \"prices\"");
  if (int(prices.size()) != inst.goods())
    throw Error(ErrorCode::DimensionMismatch, "price vector length does not match goods");
  std::vector<double> mu(prices.size());
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (!(prices[j] > 0.0))
      throw Error(ErrorCode::BadInput, "prices must be strictly positive");
    mu[j] = std::log(prices[j]);
  }
  Certificate cert = test_optimality(inst, mu, tol);
  json doc = certificate_to_json(cert);
  doc["certified"] = cert.optimal;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& dir, const std::string& algos_csv, double eps,
              const std::string& out_path, const std::string& trace_dir) {
  std::vector<std::string> algos;
  {
    std::stringstream ss(algos_csv);
    std::string a;
    while (std::getline(ss, a, ','))
      if (!a.empty()) algos.push_back(a);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::BadInput, "no .json instances in " + dir);

  auto run_cell = [&](const std::string& file) {
    std::vector<BenchRow> rows;
    MarketInstance inst = read_instance(file);
    PriceBounds bounds = price_bounds(inst);
    const std::string name = fs::path(file).filename().string();

    double t0 = now_seconds();
    ExactResult ref = adaptive_solve(inst);
    double t_ref = now_seconds() - t0;
    const double f_star = eval_F(inst, ref.mu_star);
    rows.push_back({"adaptive_apm", name, ref.epsilon_last, ref.inner_iterations_total, t_ref,
                    0.0, ref.certified});

    const bool tracing = !trace_dir.empty();
    std::int64_t apm_iters = 0;
    for (const auto& algo : algos) {
      GapRunReport rep;
      double start = now_seconds();
      if (algo == "apm") {
        rep = apm_gap_solve(inst, bounds, eps, f_star, 50'000'000, tracing);
        apm_iters = rep.iterations;
      } else if (algo == "tat") {
        BaselineConfig cfg = tatonnement_config();
        if (apm_iters > 0) cfg.max_iters = std::max<std::int64_t>(120 * apm_iters, 200'000);
        rep = tatonnement_solve(inst, bounds, cfg, eps, f_star, tracing);
      } else if (algo == "pr") {
        BaselineConfig cfg = proportional_response_config();
        if (apm_iters > 0) cfg.max_iters = std::max<std::int64_t>(120 * apm_iters, 200'000);
        rep = proportional_response_solve(inst, cfg, eps, f_star, tracing);
      } else {
        throw Error(ErrorCode::BadInput, "unknown algorithm in --algos: " + algo);
      }
      double wall = now_seconds() - start;
      rows.push_back({algo, name, eps, rep.iterations, wall, rep.final_gap, rep.reached});
      if (tracing) {
        fs::create_directories(trace_dir);
        std::string tp = (fs::path(trace_dir) / (fs::path(name).stem().string() + "_" + algo +
                                                 ".csv")).string();
        write_trace_csv(tp, rep.trace);
      }
    }
    return rows;
  };

  // instance cells are independent; outputs collected in order
  std::vector<std::future<std::vector<BenchRow>>> futures;
  futures.reserve(files.size());
  for (const auto& f : files)
    futures.push_back(std::async(std::launch::async | std::launch::deferred, run_cell, f));
  std::vector<BenchRow> all;
  for (auto& fut : futures) {
    auto rows = fut.get();
    all.insert(all.end(), rows.begin(), rows.end());
  }
  write_bench_csv(out_path, all);
  std::cout << json{{"instances", files.size()}, {"rows", all.size()}, {"out", out_path}}.dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competitive-equilibrium solver for linear and quasi-linear Fisher markets"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a market instance file");
  std::string g_kind = "linear", g_dist = "uniform", g_out, g_ratings;
  GenSpec spec;
  gen->add_option("--kind", g_kind, "linear|quasilinear")->capture_default_str();
  gen->add_option("--n", spec.n, "number of buyers")->capture_default_str();
  gen->add_option("--m", spec.m, "number of goods")->capture_default_str();
  gen->add_option("--dist", g_dist,
                  "uniform (U[0,1]) | integer (1..kmax uniform) | exponential (rate 1) | "
                  "lognormal (LN(0,1))")
      ->capture_default_str();
  gen->add_option("--kmax", spec.integer_max, "upper value for integer dist")
      ->capture_default_str();
  gen->add_option("--seed", spec.seed, "64-bit seed")->capture_default_str();
  gen->add_option("--from-ratings", g_ratings,
                  "build the instance from a buyer_id,item_id,rating CSV instead of sampling");
  gen->add_option("--out", g_out, "output instance file (stdout if omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance with a single algorithm");
  std::string s_instance, s_algo = "apm", s_trace;
  double s_eps = 1e-4;
  bool s_strict = false;
  bool s_continuation = false;
  std::int64_t s_max_iters = 0;
  solve->add_option("--instance", s_instance, "instance JSON file")->required();
  solve->add_option("--algo", s_algo, "apm|tat|pr")->capture_default_str();
  solve->add_option("--eps", s_eps, "target accuracy (objective gap for tat/pr)")
      ->capture_default_str();
  solve->add_option("--trace", s_trace, "write per-iteration trace CSV here");
  solve->add_flag("--strict", s_strict, "enforce the strict epsilon range");
  solve->add_flag("--continuation", s_continuation,
                  "apm only: warm-started re-solves with decreasing smoothing");
  solve->add_option("--max-iters", s_max_iters, "override the iteration cap");

  // exact
  auto* exact = app.add_subcommand("exact", "Compute a certified exact equilibrium");
  std::string e_instance, e_inner = "apm", e_out;
  double e_theta = 0.25;
  exact->add_option("--instance", e_instance, "instance JSON file")->required();
  exact->add_option("--theta", e_theta, "accuracy decay per outer round")->capture_default_str();
  exact->add_option("--inner", e_inner, "inner solver: apm|tat")->capture_default_str();
  exact->add_option("--out", e_out, "write the result JSON here (stdout if omitted)");

  // certify
  auto* certify = app.add_subcommand("certify", "Test optimality of candidate prices");
  std::string c_instance, c_prices;
  double c_tol = 1e-8;
  certify->add_option("--instance", c_instance, "instance JSON file")->required();
  certify->add_option("--prices", c_prices, "JSON price vector or {\"prices\": [...]}")
      ->required();
  certify->add_option("--tol", c_tol, "feasibility tolerance")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Iteration-count comparison over an instance set");
  std::string b_dir, b_algos = "apm,tat,pr", b_out = "results.csv", b_trace_dir;
  double b_eps = 1e-4;
  bench->add_option("--instances", b_dir, "directory of instance JSON files")->required();
  bench->add_option("--algos", b_algos, "comma-separated: apm,tat,pr")->capture_default_str();
  bench->add_option("--eps", b_eps, "objective-gap target")->capture_default_str();
  bench->add_option("--out", b_out, "results CSV path")->capture_default_str();
  bench->add_option("--trace-dir", b_trace_dir, "write per-run trace CSVs into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.kind = parse_kind(g_kind);
      spec.dist = parse_dist(g_dist);
      return cmd_gen(spec, g_ratings, g_out);
    }
    if (solve->parsed())
      return cmd_solve(s_instance, s_algo, s_eps, s_trace, s_strict, s_continuation,
                       s_max_iters);
    if (exact->parsed()) return cmd_exact(e_instance, e_theta, e_inner, e_out);
    if (certify->parsed()) return cmd_certify(c_instance, c_prices, c_tol);
    if (bench->parsed()) return cmd_bench(b_dir, b_algos, b_eps, b_out, b_trace_dir);
  } catch (const Error& e) {
    std::cout << json{{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}
