#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fisher/objective.hpp"

namespace fisher {

// Parameters of the accelerated price-adjustment method.  Strict mode
// enforces the epsilon range under which the stopping rule certifies the
// target accuracy directly; relaxed mode admits any epsilon through the
// alternate delta choice.
struct ApmParams {
  double epsilon = 0.0;
  SmoothedObjective smooth;
  double mu_lower = 0.0;
  double mu_upper = 0.0;
  double box_lo = 0.0;  // mu_lower - eta
  double box_hi = 0.0;  // mu_upper + eta
  double stop_threshold = 0.0;
  std::int64_t max_iters = 0;  // 0: derive from the iteration-count estimate
  bool strict = false;
};

inline ApmParams apm_params(const MarketInstance& inst, const PriceBounds& bounds,
                            double epsilon, bool strict = false, double eta = 1.0) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must be positive");
  const double sigma_box = std::exp(bounds.mu_lower - eta) * eta * eta;
  if (strict && epsilon > sigma_box)
    throw Error(ErrorCode::EpsilonOutOfRange,
                "strict mode requires epsilon <= exp(mu_lower - eta) * eta^2");
  const double log_m1 = std::log(double(inst.goods()) + 1.0);
  const double denom = 2.0 * log_m1 * inst.budget_total();
  const double delta = strict ? epsilon / denom : std::min(epsilon, sigma_box) / denom;

  ApmParams p;
  p.epsilon = epsilon;
  p.smooth = make_smoothed(inst, bounds, delta, eta);
  p.mu_lower = bounds.mu_lower;
  p.mu_upper = bounds.mu_upper;
  p.box_lo = bounds.mu_lower - eta;
  p.box_hi = bounds.mu_upper + eta;
  p.stop_threshold = std::min(p.smooth.sigma * epsilon, std::sqrt(p.smooth.sigma * epsilon));
  p.strict = strict;
  return p;
}

struct ApmState {
  std::int64_t t = 0;
  std::vector<double> mu;
  std::vector<double> y;
  double last_grad_norm = kInf;
};

// One iteration: gradient step at y with stepsize 1/L clamped to the relaxed
// box, then momentum extrapolation with coefficient (1-sqrt(q))/(1+sqrt(q)).
inline void apm_step(const MarketInstance& inst, const ApmParams& params, ApmState& state,
                     std::vector<double>& grad_scratch) {
  const int m = inst.goods();
  grad_F_delta(inst, params.smooth, state.y, grad_scratch);
  const double inv_L = 1.0 / params.smooth.L;
  const double sq = std::sqrt(params.smooth.q);
  const double momentum = (1.0 - sq) / (1.0 + sq);
  for (int j = 0; j < m; ++j) {
    double next = state.y[j] - inv_L * grad_scratch[j];
    next = std::max(params.box_lo, std::min(next, params.box_hi));
    if (!std::isfinite(next))
      throw Error(ErrorCode::NonFiniteIterate, "non-finite iterate in gradient step");
    double prev = state.mu[j];
    state.mu[j] = next;
    state.y[j] = next + momentum * (next - prev);
  }
  ++state.t;
}

inline void apm_step(const MarketInstance& inst, const ApmParams& params, ApmState& state) {
  std::vector<double> scratch;
  apm_step(inst, params, state, scratch);
}

struct TracePoint {
  std::int64_t t;
  double f;
  double grad_norm;
};

struct SolveReport {
  std::vector<double> mu;
  std::vector<double> prices;
  std::int64_t iterations = 0;
  double final_grad_norm = 0.0;
  double f_value = 0.0;
  bool max_iters_hit = false;
  std::vector<TracePoint> trace;
  DemandWeights weights;  // at the output point, for allocation extraction
};

namespace detail {

// Iteration-count estimate from the convergence analysis, with c1 taken as
// F_delta(mu0) minus a crude box lower bound and a safety factor of 10.
inline std::int64_t default_max_iters(const MarketInstance& inst, const ApmParams& p,
                                      const std::vector<double>& mu0) {
  double lb = inst.goods() * std::exp(p.box_lo);
  for (int i = 0; i < inst.buyers(); ++i) {
    double zmax = inst.quasi_linear() ? 0.0 : -kInf;
    for (int j = 0; j < inst.goods(); ++j)
      if (inst.value(i, j) > 0.0)
        zmax = std::max(zmax, inst.log_value(i, j) - p.box_hi);
    lb += inst.budget(i) * zmax;
  }
  const double c1 = std::max(eval_F_delta(inst, p.smooth, mu0) - lb, 1e-6);
  const double s = p.smooth.sigma, e = p.epsilon;
  const double target = std::min(s * s * e * e, s * e);
  const double ratio = std::max(c1 * 2.0 * p.smooth.L / (p.smooth.delta * target), 2.0);
  const double iters = 10.0 * std::ceil(std::log(ratio) / std::sqrt(p.smooth.q));
  return std::int64_t(std::min(iters, 4.0e9));
}

inline bool record_trace(std::int64_t t) { return t <= 100000 || t % 10 == 0; }

}  // namespace detail

// Run until ||grad F_delta(mu^t)|| falls below the stopping threshold (then
// F(mu) - F* <= epsilon) or the iteration cap is hit.
inline SolveReport apm_solve(const MarketInstance& inst, const ApmParams& params,
                             std::optional<std::vector<double>> mu0 = std::nullopt,
                             bool with_trace = false) {
  const int m = inst.goods();
  ApmState state;
  state.mu = mu0 ? project_box(std::move(*mu0), params.mu_lower, params.mu_upper)
                 : std::vector<double>(m, 0.5 * (params.mu_lower + params.mu_upper));
  state.y = state.mu;

  const std::int64_t cap =
      params.max_iters > 0 ? params.max_iters : detail::default_max_iters(inst, params, state.mu);

  SolveReport rep;
  std::vector<double> grad, scratch;
  for (;;) {
    grad_F_delta(inst, params.smooth, state.mu, grad);
    state.last_grad_norm = norm2(grad);
    if (with_trace && detail::record_trace(state.t))
      rep.trace.push_back({state.t, eval_F(inst, state.mu), state.last_grad_norm});
    if (state.last_grad_norm <= params.stop_threshold) break;
    if (state.t >= cap) {
      rep.max_iters_hit = true;
      break;
    }
    apm_step(inst, params, state, scratch);
  }

  rep.mu = state.mu;
  rep.prices.resize(m);
  for (int j = 0; j < m; ++j) rep.prices[j] = std::exp(state.mu[j]);
  rep.iterations = state.t;
  rep.final_grad_norm = state.last_grad_norm;
  rep.f_value = eval_F(inst, state.mu);
  grad_F_delta(inst, params.smooth, state.mu, grad, &rep.weights);
  return rep;
}

// Approximate CE allocation from the final demand weights: x_ij = d_ij / p_j.
// Requires a stopped run and epsilon <= log(m+1)*||B||_1.
inline std::vector<double> approx_allocation(const MarketInstance& inst, const ApmParams& params,
                                             const std::vector<double>& mu_out,
                                             const DemandWeights& weights) {
  if (params.epsilon > std::log(double(inst.goods()) + 1.0) * inst.budget_total())
    throw Error(ErrorCode::EpsilonOutOfRange,
                "allocation extraction requires epsilon <= log(m+1)*||B||_1");
  const int n = inst.buyers();
  const int m = inst.goods();
  std::vector<double> x(std::size_t(n) * m);
  for (int j = 0; j < m; ++j) {
    const double p = std::exp(mu_out[j]);
    for (int i = 0; i < n; ++i) x[std::size_t(i) * m + j] = weights.at(i, j) / p;
  }
  return x;
}

// Continuation mode: delta decreases stage by stage from a coarse start down
// to the value matching epsilon; each stage is a warm-started re-solve run to
// its own stopping criterion.  The final stage is exactly the single-delta
// configuration, so the output carries the same accuracy certificate; whether
// the staged path is cheaper depends on the instance.
inline SolveReport apm_solve_continuation(const MarketInstance& inst, const PriceBounds& bounds,
                                          double epsilon, bool strict = false,
                                          std::optional<std::vector<double>> mu0 = std::nullopt,
                                          bool with_trace = false) {
  const ApmParams final_params = apm_params(inst, bounds, epsilon, strict);
  const double denom = 2.0 * std::log(double(inst.goods()) + 1.0) * inst.budget_total();

  ApmState state;
  state.mu = mu0 ? project_box(std::move(*mu0), bounds.mu_lower, bounds.mu_upper)
                 : std::vector<double>(inst.goods(),
                                       0.5 * (bounds.mu_lower + bounds.mu_upper));
  state.y = state.mu;

  SolveReport rep;
  std::vector<double> grad, scratch;
  double delta = std::max(0.02, final_params.smooth.delta);
  for (;;) {
    const bool last = delta <= final_params.smooth.delta;
    ApmParams stage = final_params;
    if (!last) {
      stage.epsilon = delta * denom;
      stage.smooth = make_smoothed(inst, bounds, delta, final_params.smooth.eta);
      stage.stop_threshold = std::min(stage.smooth.sigma * stage.epsilon,
                                      std::sqrt(stage.smooth.sigma * stage.epsilon));
    }
    state.y = state.mu;
    const std::int64_t budget =
        last ? (final_params.max_iters > 0
                    ? final_params.max_iters
                    : detail::default_max_iters(inst, stage, state.mu))
             : std::int64_t(6.0 / std::sqrt(stage.smooth.q)) + 200;
    std::int64_t used = 0;
    for (;;) {
      grad_F_delta(inst, stage.smooth, state.mu, grad);
      state.last_grad_norm = norm2(grad);
      if (with_trace && detail::record_trace(rep.iterations))
        rep.trace.push_back({rep.iterations, eval_F(inst, state.mu), state.last_grad_norm});
      if (state.last_grad_norm <= stage.stop_threshold) break;
      if (used >= budget) {
        if (last) rep.max_iters_hit = true;
        break;
      }
      apm_step(inst, stage, state, scratch);
      ++used;
      ++rep.iterations;
    }
    if (last) break;
    delta = std::max(delta / 2.0, final_params.smooth.delta);
  }

  rep.mu = state.mu;
  rep.prices.resize(inst.goods());
  for (int j = 0; j < inst.goods(); ++j) rep.prices[j] = std::exp(state.mu[j]);
  rep.final_grad_norm = state.last_grad_norm;
  rep.f_value = eval_F(inst, state.mu);
  grad_F_delta(inst, final_params.smooth, state.mu, grad, &rep.weights);
  return rep;
}

// Benchmark-style run measured by the objective gap against a reference
// optimum: delta is cut stage by stage from a coarse start down to the
// value matching eps, each stage warm-started (the experimental protocol).
// Iterations accumulate across stages.
struct GapRunReport {
  std::int64_t iterations = 0;
  double final_gap = kInf;
  bool reached = false;
  std::vector<TracePoint> trace;
  std::vector<double> mu;
};

inline GapRunReport apm_gap_solve(const MarketInstance& inst, const PriceBounds& bounds,
                                  double eps, double f_star, std::int64_t max_iters,
                                  bool with_trace = false,
                                  std::optional<std::vector<double>> mu0 = std::nullopt) {
  const double eta = 1.0;
  const double log_m1 = std::log(double(inst.goods()) + 1.0);
  const double denom = 2.0 * log_m1 * inst.budget_total();
  const double delta_final = eps / denom;
  double delta = std::max(0.02, delta_final);

  GapRunReport rep;
  ApmState state;
  state.mu.assign(inst.goods(), 0.5 * (bounds.mu_lower + bounds.mu_upper));
  if (mu0) state.mu = project_box(std::move(*mu0), bounds.mu_lower, bounds.mu_upper);
  state.y = state.mu;

  std::vector<double> grad, scratch;
  for (;;) {
    ApmParams stage;
    stage.epsilon = delta * denom;
    stage.smooth = make_smoothed(inst, bounds, delta, eta);
    stage.box_lo = bounds.mu_lower - eta;
    stage.box_hi = bounds.mu_upper + eta;
    stage.stop_threshold = std::min(stage.smooth.sigma * stage.epsilon,
                                    std::sqrt(stage.smooth.sigma * stage.epsilon));
    state.y = state.mu;  // each stage is a fresh warm-started solve
    const std::int64_t stage_budget = std::int64_t(6.0 / std::sqrt(stage.smooth.q)) + 200;

    for (std::int64_t s = 0; s < stage_budget; ++s) {
      const double gap = eval_F(inst, state.mu) - f_star;
      rep.final_gap = gap;
      grad_F_delta(inst, stage.smooth, state.mu, grad);
      const double gnorm = norm2(grad);
      if (with_trace && detail::record_trace(rep.iterations))
        rep.trace.push_back({rep.iterations, gap + f_star, gnorm});
      if (gap <= eps) {
        rep.reached = true;
        rep.mu = state.mu;
        return rep;
      }
      if (rep.iterations >= max_iters) {
        rep.mu = state.mu;
        return rep;
      }
      // the stage ends at its own criterion or once the gap nears the
      // smoothing floor; the next stage restarts at a quarter of delta
      if ((gnorm <= stage.stop_threshold || gap <= 10.0 * delta) && delta > delta_final)
        break;
      apm_step(inst, stage, state, scratch);
      ++rep.iterations;
    }
    if (delta > delta_final)
      delta = std::max(delta / 4.0, delta_final);
  }
}

}  // namespace fisher
