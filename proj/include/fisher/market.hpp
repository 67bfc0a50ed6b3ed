#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fisher {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error codes surfaced through the CLI as machine-readable JSON.
enum class ErrorCode {
  DegenerateMatrix,
  NonpositiveBudget,
  DimensionMismatch,
  EpsilonOutOfRange,
  NonFiniteIterate,
  MissingGood,
  NotCertified,
  BadInput,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::NonpositiveBudget: return "NonpositiveBudget";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::MissingGood: return "MissingGood";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class Kind { Linear, QuasiLinear };

inline const char* kind_name(Kind k) {
  return k == Kind::Linear ? "linear" : "quasilinear";
}

// A Fisher market: n buyers with budgets B_i spend on m divisible goods
// they value at v_ij >= 0.  Quasi-linear buyers may also keep money (the
// outside option, a virtual good with unit value and unit price).
class MarketInstance {
 public:
  MarketInstance(Kind kind, std::vector<double> valuations,
                 std::vector<double> budgets, int n, int m)
      : kind_(kind),
        n_(n),
        m_(m),
        v_(std::move(valuations)),
        budgets_(std::move(budgets)) {
    validate();
    log_v_.resize(v_.size());
    for (std::size_t k = 0; k < v_.size(); ++k)
      log_v_[k] = v_[k] > 0.0 ? std::log(v_[k]) : -kInf;
    budget_total_ = 0.0;
    for (double b : budgets_) budget_total_ += b;
  }

  Kind kind() const { return kind_; }
  int buyers() const { return n_; }
  int goods() const { return m_; }
  bool quasi_linear() const { return kind_ == Kind::QuasiLinear; }

  double value(int i, int j) const { return v_[std::size_t(i) * m_ + j]; }
  // log v_ij; -inf marks an excluded (zero-valuation) pair.
  double log_value(int i, int j) const { return log_v_[std::size_t(i) * m_ + j]; }
  double budget(int i) const { return budgets_[i]; }
  double budget_total() const { return budget_total_; }

  const std::vector<double>& valuations() const { return v_; }
  const std::vector<double>& budgets() const { return budgets_; }

  // Index of the outside option in active-set encodings: goods are 0..m-1,
  // the outside option (quasi-linear only) is m.
  int outside_index() const { return m_; }

 private:
  void validate() const {
    if (n_ < 1 || m_ < 1)
      throw Error(ErrorCode::DimensionMismatch, "need at least 1 buyer and 1 good");
    if (v_.size() != std::size_t(n_) * std::size_t(m_))
      throw Error(ErrorCode::DimensionMismatch, "valuation matrix is not n x m");
    if (budgets_.size() != std::size_t(n_))
      throw Error(ErrorCode::DimensionMismatch, "budget vector length is not n");
    for (int i = 0; i < n_; ++i) {
      double b = budgets_[i];
      if (!(b > 0.0) || !std::isfinite(b))
        throw Error(ErrorCode::NonpositiveBudget,
                    "budget of buyer " + std::to_string(i) + " must be positive");
    }
    for (double x : v_)
      if (!(x >= 0.0) || !std::isfinite(x))
        throw Error(ErrorCode::BadInput, "valuations must be finite and nonnegative");
    for (int i = 0; i < n_; ++i) {
      bool any = false;
      for (int j = 0; j < m_; ++j) any = any || v_[std::size_t(i) * m_ + j] > 0.0;
      if (!any)
        throw Error(ErrorCode::DegenerateMatrix,
                    "buyer " + std::to_string(i) + " values no good (zero row)");
    }
    for (int j = 0; j < m_; ++j) {
      bool any = false;
      for (int i = 0; i < n_; ++i) any = any || v_[std::size_t(i) * m_ + j] > 0.0;
      if (!any)
        throw Error(ErrorCode::DegenerateMatrix,
                    "good " + std::to_string(j) + " is valued by no buyer (zero column)");
    }
  }

  Kind kind_;
  int n_;
  int m_;
  std::vector<double> v_;
  std::vector<double> budgets_;
  std::vector<double> log_v_;
  double budget_total_ = 0.0;
};

// Rejects any instance violating the invariants.  Construction already
// validates; this entry point exists for externally built data.
inline MarketInstance validate_instance(MarketInstance inst) { return inst; }

inline MarketInstance make_instance(Kind kind, const std::vector<std::vector<double>>& rows,
                                    std::vector<double> budgets) {
  int n = int(rows.size());
  int m = n > 0 ? int(rows[0].size()) : 0;
  std::vector<double> flat;
  flat.reserve(std::size_t(n) * std::size_t(std::max(m, 0)));
  for (const auto& r : rows) {
    if (int(r.size()) != m)
      throw Error(ErrorCode::DimensionMismatch, "ragged valuation rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return MarketInstance(kind, std::move(flat), std::move(budgets), n, m);
}

// Bounds on equilibrium prices.  Every CE price lies in [p_lower, p_upper],
// so log prices can be boxed without moving the optimum.
struct PriceBounds {
  double p_lower = 0.0;
  double p_upper = 0.0;
  double mu_lower = 0.0;
  double mu_upper = 0.0;
};

inline PriceBounds price_bounds(const MarketInstance& inst) {
  const int n = inst.buyers();
  const int m = inst.goods();
  const double alpha_inv = inst.quasi_linear() ? 1.0 : 0.0;
  double vmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) vmax = std::max(vmax, inst.value(i, j));

  double upper;
  if (inst.quasi_linear()) {
    upper = (1.0 - alpha_inv) * inst.budget_total() + alpha_inv * vmax;
  } else {
    // alpha = +inf limit; take the wider of the two readings, a looser box
    // never changes the optimum.
    upper = std::max(inst.budget_total(), vmax);
  }

  std::vector<double> row_norm(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) row_norm[i] += inst.value(i, j);

  double lower = kInf;
  for (int j = 0; j < m; ++j) {
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      best = std::max(best, inst.value(i, j) * inst.budget(i) /
                                (row_norm[i] + alpha_inv * inst.budget(i)));
    lower = std::min(lower, best);
  }

  PriceBounds b;
  b.p_lower = lower;
  b.p_upper = upper;
  b.mu_lower = std::log(lower);
  b.mu_upper = std::log(upper);
  return b;
}

}  // namespace fisher
