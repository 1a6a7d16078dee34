#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "statlab/ensemble.hpp"

namespace statlab {

/// One ensemble-level estimate.
struct EstimateReport {
  std::string statistic;
  double value = 0.0;
  /// Standard error of `value`; never negative.
  double std_error = 0.0;
  /// Accepted replicas.
  std::uint64_t trials = 0;
  std::string params;
  std::uint64_t seed = 0;
  /// Fraction of attempted replicas rejected for frontier contact or budget exhaustion.
  double rejected_fraction = 0.0;
  /// Walk length, kernel horizon or ball radius the value refers to.
  std::uint32_t horizon = 0;
  /// Named auxiliary numbers (means of both sides of a transport identity, say).
  std::map<std::string, double> extras;
};

/// Two-sided check of ½ℓ² ≤ h ≤ ℓv. Each side passes when its slack is ≥ −3σ, with σ
/// propagated to first order from the three standard errors treated as independent.
struct InequalityReport {
  EstimateReport ell;
  EstimateReport h;
  EstimateReport v;
  double lower_slack = 0.0;
  double upper_slack = 0.0;
  double lower_sigma = 0.0;
  double upper_sigma = 0.0;
  bool lower_pass = false;
  bool upper_pass = false;
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint32_t threads = 1;
};

/// Evaluates f(0..count-1), possibly on several threads. Results are stored by index, so the
/// output does not depend on the thread count.
template <class T>
std::vector<T> parallel_map(std::size_t count, std::uint32_t threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Stream of trial t under root seed s: Stream(s).split(t).
[[nodiscard]] Stream trial_stream(std::uint64_t seed, std::uint64_t trial);

/// Mean of d(x_0, x_n)/n over independent (graph, walk) replicas. Replicas whose walk could
/// not be grown, or whose growth ran out of budget, are rejected.
[[nodiscard]] EstimateReport drift_estimate(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                            const RunOptions& opts);

/// Mean of H_n(root)/n, computed from the exact n-step law of each replica.
[[nodiscard]] EstimateReport entropy_estimate(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                              const RunOptions& opts);

/// Mean of (X_n − X_0)/n over independent perimeter paths of the peeling chain, each
/// conditioned on X staying at least 2. Requires a peeling ensemble.
[[nodiscard]] EstimateReport peeling_drift_estimate(const EnsembleConfig& config, std::uint32_t n,
                                                    std::uint64_t trials, const RunOptions& opts);

/// Estimates of ℓ, h and v from one set of replicas at a common horizon n, all exact per replica:
///   kernel_drift   Σ_z p^n(root,z) d(root,z) / n
///   entropy_increment  H_n(root) − H_{n−1}(root)
///   entropy_average    H_n(root) / n
///   growth         log|B_n(root)| / n
/// Every kernel evaluated is checked against the Carne-Varopoulos bound (AssertionError when
/// the margin is negative) and I_1^{n−1} ≥ I_1^n is checked on every replica.
struct HorizonEstimates {
  EstimateReport kernel_drift;
  EstimateReport entropy_increment;
  EstimateReport entropy_average;
  EstimateReport growth;
  double min_cv_margin = 0.0;
};
[[nodiscard]] HorizonEstimates horizon_estimates(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                                 const RunOptions& opts);

/// Mean of log|B_r(root)|/r at r = r_max. With `degree_biased` the root law is reweighted to
/// the degree-biased one, otherwise to the unimodular one; weights are self-normalized.
[[nodiscard]] EstimateReport growth_estimate(const EnsembleConfig& config, std::uint32_t r_max, std::uint64_t trials,
                                             const RunOptions& opts, bool degree_biased = false);

/// Least-squares slope of log|B_r| against log r over r in [r_max/2, r_max], per replica,
/// averaged. `extras` holds mean log|B_r| for every r as `log_ball_<r>`.
[[nodiscard]] EstimateReport growth_exponent_estimate(const EnsembleConfig& config, std::uint32_t r_max,
                                                      std::uint64_t trials, const RunOptions& opts);

/// E[deg(root)|S_r|] / E[|S_r|] under the ensemble's own root law, with delta-method stderr.
/// `extras["mean_degree"]` holds E[deg(root)].
[[nodiscard]] EstimateReport degree_sphere_correlation(const EnsembleConfig& config, std::uint32_t r,
                                                       std::uint64_t trials, const RunOptions& opts);

/// Test functions for the mass-transport diagnostic:
///   adjacent         F(x,y) = 1{x ~ y}
///   adjacent_degree  F(x,y) = 1{x ~ y} deg(y)
///   parent           F(x,y) = 1{y is the parent of x}, tree ensembles rooted at an edge only
enum class TransportFunction { adjacent, adjacent_degree, parent };
[[nodiscard]] TransportFunction parse_transport_function(const std::string& name);
[[nodiscard]] const char* transport_function_name(TransportFunction f) noexcept;

/// Estimates E Σ_y F(x,y) and E Σ_y F(y,x) under the unimodular root law (degree-biased
/// replicas are reweighted by 1/deg(root)). `value` is their difference, `extras` holds
/// `send` and `receive`, and `std_error` is the delta-method error of the difference.
[[nodiscard]] EstimateReport mass_transport_check(const EnsembleConfig& config, TransportFunction f,
                                                  std::uint64_t trials, const RunOptions& opts);

/// Throws UsageError unless the three reports share a parameter echo.
[[nodiscard]] InequalityReport inequality_report(const EstimateReport& ell, const EstimateReport& h,
                                                 const EstimateReport& v);

void write_report_json(std::ostream& out, const EstimateReport& r);
void write_reports_json(std::ostream& out, const std::vector<EstimateReport>& rs);
void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& rs);
void write_inequality_json(std::ostream& out, const InequalityReport& r);
void write_inequality_csv(std::ostream& out, const InequalityReport& r);
/// Reads one report. From an array, takes the first entry whose statistic is listed in
/// `preferred` (earlier names win), else the first entry.
[[nodiscard]] EstimateReport read_report_json(std::istream& in, const std::vector<std::string>& preferred = {});

}  // namespace statlab
