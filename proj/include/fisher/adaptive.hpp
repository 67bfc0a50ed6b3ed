#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fisher/apm.hpp"
#include "fisher/baselines.hpp"
#include "fisher/certify.hpp"
#include "fisher/recovery.hpp"

namespace fisher {

enum class InnerSolver { Apm, Tatonnement };

struct AdaptiveConfig {
  double theta = 0.25;        // accuracy schedule eps_k = theta^k
  int max_outer = 60;
  InnerSolver inner = InnerSolver::Apm;
  double certify_tol = 1e-8;
  double eta = 1.0;
  // Modulus used in the recovery radius sqrt(2*eps_k/sigma); zero selects
  // exp(mu_lower - eta).  With the tatonnement inner solver this stands in
  // for the quadratic-growth modulus, which has no formula here.
  double sigma = 0.0;
  bool strict = false;  // clamp eps_1 to the strict APM epsilon cap
  // Theory mode runs each inner solve at the smoothing matched to eps_k
  // until its stopping criterion fires, which prices the full convergence
  // bound.  The default instead shrinks delta in step with the recovery
  // radius and budgets each round; the certificate remains the arbiter.
  bool theory_inner = false;
  std::int64_t round_budget_cap = 6'000'000;
  double budget_factor = 4.0;       // round budget ~ budget_factor / sqrt(q)
  double delta_radius_ratio = 0.02; // round smoothing ~ ratio * recovery radius
  double tat_stepsize = 1e-4;
};

struct ExactResult {
  bool certified = false;
  std::vector<double> mu_star;
  std::vector<double> prices;
  std::vector<double> allocation;  // n x m, empty unless certified
  Certificate certificate;
  int outer_iterations = 0;
  std::int64_t inner_iterations_total = 0;
  double delta_star_observed = 0.0;
  double sigma_used = 0.0;
  double epsilon_last = 0.0;
};

// Outer-round bound of the finite-step convergence guarantee.
inline int k_bound(double sigma, double delta_star, double theta) {
  const double arg = std::sqrt(sigma) * delta_star / 6.0;
  const double k = 2.0 * std::log(arg) / std::log(theta);
  if (!(k > 1.0)) return 1;
  return int(std::min(std::ceil(k), 1e9));
}

namespace detail {

// Budgeted inner APM round: iterate until the stopping criterion for the
// round's own smoothing fires or the budget runs out.  Returns iterations.
inline std::int64_t run_inner_apm(const MarketInstance& inst, const ApmParams& params,
                                  std::vector<double>& mu, std::int64_t budget) {
  ApmState state;
  state.mu = mu;
  state.y = mu;
  std::vector<double> grad, scratch;
  std::int64_t used = 0;
  for (;;) {
    grad_F_delta(inst, params.smooth, state.mu, grad);
    if (norm2(grad) <= params.stop_threshold) break;
    if (used >= budget) break;
    apm_step(inst, params, state, scratch);
    ++used;
  }
  mu = state.mu;
  return used;
}

inline std::int64_t run_inner_tatonnement(const MarketInstance& inst, const PriceBounds& bounds,
                                          double stepsize, std::vector<double>& mu,
                                          std::int64_t budget) {
  const int m = inst.goods();
  const double lo = bounds.p_lower * std::exp(-1.0);
  const double hi = bounds.p_upper * std::exp(1.0);
  std::vector<double> p(m);
  for (int j = 0; j < m; ++j) p[j] = std::max(lo, std::min(std::exp(mu[j]), hi));
  for (std::int64_t t = 0; t < budget; ++t) {
    for (int j = 0; j < m; ++j) mu[j] = std::log(p[j]);
    std::vector<double> g = subgrad_F(inst, mu);
    for (int j = 0; j < m; ++j)
      p[j] = std::max(lo, std::min(p[j] - stepsize * g[j], hi));
  }
  for (int j = 0; j < m; ++j) mu[j] = std::log(p[j]);
  return budget;
}

}  // namespace detail

// Adaptive loop: solve to accuracy eps_k = theta^k warm-started, attempt
// recovery at radius sqrt(2*eps_k/sigma), certify any recovered point, stop
// on a passing certificate.
inline ExactResult adaptive_solve(const MarketInstance& inst, const AdaptiveConfig& config = {}) {
  const PriceBounds bounds = price_bounds(inst);
  const double eta = config.eta;
  const double sigma = config.sigma > 0.0 ? config.sigma : std::exp(bounds.mu_lower - eta);
  const double log_m1 = std::log(double(inst.goods()) + 1.0);
  const double denom = 2.0 * log_m1 * inst.budget_total();
  const double strict_cap = std::exp(bounds.mu_lower - eta) * eta * eta;

  double eps1 = config.theta;
  if (config.strict) eps1 = std::min(config.theta, strict_cap);

  ExactResult res;
  res.sigma_used = sigma;

  std::vector<double> mu(inst.goods(), 0.5 * (bounds.mu_lower + bounds.mu_upper));
  double eps_k = eps1;
  for (int k = 1; k <= config.max_outer; ++k, eps_k *= config.theta) {
    const double radius_k = std::sqrt(2.0 * eps_k / sigma);
    std::int64_t used;
    if (config.inner == InnerSolver::Apm) {
      ApmParams params;
      if (config.theory_inner) {
        params = apm_params(inst, bounds, eps_k, config.strict, eta);
      } else {
        // smoothing tracks the recovery radius: the bias it induces stays a
        // small fraction of what the round must resolve, while the stepsize
        // (1/L) stays large enough to move; shrinking it every round keeps
        // the iterate from stalling behind the radius schedule
        const double delta = radius_k * config.delta_radius_ratio;
        params.epsilon = delta * denom;
        params.smooth = make_smoothed(inst, bounds, delta, eta);
        params.box_lo = bounds.mu_lower - eta;
        params.box_hi = bounds.mu_upper + eta;
        params.stop_threshold = std::min(params.smooth.sigma * params.epsilon,
                                         std::sqrt(params.smooth.sigma * params.epsilon));
      }
      std::int64_t budget =
          config.theory_inner
              ? std::int64_t(4e18)
              : std::min<std::int64_t>(
                    config.round_budget_cap,
                    std::int64_t(config.budget_factor / std::sqrt(params.smooth.q)) + 2000);
      mu = project_box(std::move(mu), bounds.mu_lower, bounds.mu_upper);
      used = detail::run_inner_apm(inst, params, mu, budget);
    } else {
      const double step = config.tat_stepsize * std::pow(config.theta, 0.5 * (k - 1));
      std::int64_t budget = std::min<std::int64_t>(config.round_budget_cap,
                                                   20000 + 4000 * std::int64_t(k));
      used = detail::run_inner_tatonnement(inst, bounds, step, mu, budget);
    }
    res.inner_iterations_total += used;
    res.outer_iterations = k;
    res.epsilon_last = eps_k;

    RecoveryResult rec = recover(inst, mu, radius_k);
    if (!rec.recovered) continue;
    Certificate cert = test_optimality(inst, rec.mu, config.certify_tol);
    if (!cert.optimal) continue;

    res.certified = true;
    res.mu_star = rec.mu;
    res.prices.resize(inst.goods());
    for (int j = 0; j < inst.goods(); ++j) res.prices[j] = std::exp(rec.mu[j]);
    res.allocation = exact_allocation(inst, cert, rec.mu);
    res.certificate = std::move(cert);
    res.delta_star_observed = gap_Delta(inst, rec.mu);
    return res;
  }

  // Not converged: return the best approximate point, flagged.
  res.mu_star = mu;
  res.prices.resize(inst.goods());
  for (int j = 0; j < inst.goods(); ++j) res.prices[j] = std::exp(mu[j]);
  res.delta_star_observed = gap_Delta(inst, mu);
  return res;
}

}  // namespace fisher
