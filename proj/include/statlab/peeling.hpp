#pragma once

#include <cstdint>
#include <vector>

#include "statlab/rng.hpp"

namespace statlab {

inline constexpr double kappa_critical = 2.0 / 27.0;

/// Root of α²(1−α) = 2κ in [2/3, 1), by bisection to 1e-12 (tighter in practice).
[[nodiscard]] double alpha_from_kappa(double kappa);

/// Counts T(m, n) of triangulations of an m-gon with n internal vertices, multiple edges
/// allowed and loops forbidden, from the root-edge peeling recursion
///   T(2,0) = 1,  T(m,n) = T(m+1,n−1) + Σ_{i=2}^{m−1} Σ_{j=0}^{n} T(i,j) T(m−i+1,n−j),
/// stored weighted: entry (m, n) holds T(m,n) κ^n.
class BoltzmannTable {
 public:
  /// Rows m = 2..max_perimeter, columns n = 0..max_internal.
  BoltzmannTable(double kappa, std::uint32_t max_perimeter, std::uint32_t max_internal);

  [[nodiscard]] double kappa() const noexcept { return kappa_; }
  [[nodiscard]] std::uint32_t max_perimeter() const noexcept { return max_perimeter_; }
  [[nodiscard]] std::uint32_t max_internal() const noexcept { return max_internal_; }
  /// T(m,n) κ^n.
  [[nodiscard]] double weight(std::uint32_t m, std::uint32_t n) const;
  /// Z_m = Σ_n T(m,n) κ^n, truncated at max_internal.
  [[nodiscard]] double z(std::uint32_t m) const;

 private:
  double kappa_;
  std::uint32_t max_perimeter_;
  std::uint32_t max_internal_;
  std::uint32_t rows_;
  std::vector<double> w_;  // row-major, rows m = 0..rows_-1
};

/// Parameters of the perimeter/volume chain.
struct PeelingParams {
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  /// z_table[i] = Z_i for i >= 2; entries 0 and 1 unused.
  std::vector<double> z_table;
  /// Internal-vertex laws of Boltzmann triangulations of an m-gon, as CDFs over k:
  /// volume_cdf[m][k] = Σ_{j<=k} T(m,j) κ^j / Z_m.
  std::vector<std::vector<double>> volume_cdf;
  /// Cumulative q_{−1}, q_{−2}, ...
  std::vector<double> down_cdf;
  /// 1 − (q_1 + Σ q_{−i}) as computed from the truncated table.
  double truncation_error = 0.0;

  /// q_{−i} = 2 β^i Z_{i+1}, or 0 past the table.
  [[nodiscard]] double q_down(std::uint32_t i) const;
  [[nodiscard]] std::uint32_t max_down() const noexcept {
    return z_table.size() < 2 ? 0 : static_cast<std::uint32_t>(z_table.size() - 2);
  }

  /// Exact P(ΔY = k) under the increment law.
  [[nodiscard]] double volume_increment_probability(std::uint32_t k) const;

  /// Checks 2κ = α²(1−α) within 1e-10, β = κ/α within 1e-12 and |truncation_error| <= 1e-8.
  void validate() const;
};

/// Builds parameters with an enumerated table; grows the table until q_{−i} < 1e-10 past its
/// end and the normalization error is below 1e-10, or throws UsageError if limits are hit.
[[nodiscard]] PeelingParams make_peeling_params(double kappa);
/// Builds parameters from an explicit table of size max_perimeter + 1.
[[nodiscard]] PeelingParams make_peeling_params(double kappa, const BoltzmannTable& table);

struct ChainPath {
  std::vector<std::int64_t> perimeter;
  std::vector<std::int64_t> volume;
  /// Accepted paths over attempted paths.
  double acceptance_rate = 1.0;
  std::uint64_t attempts = 0;
};

/// One increment (ΔX, ΔY).
struct ChainStep {
  std::int64_t dx;
  std::int64_t dy;
};
[[nodiscard]] ChainStep sample_chain_step(const PeelingParams& params, Stream& rng);

/// Samples (X_n, Y_n) from X_0 = Y_0 = 2 conditioned on X_i >= 2 for i <= steps, by restarting
/// on violation. Throws BudgetError after `max_attempts` rejected attempts.
[[nodiscard]] ChainPath sample_perimeter_volume_chain(const PeelingParams& params, std::uint64_t steps, Stream& rng,
                                                      std::uint64_t max_attempts = 1'000'000);

}  // namespace statlab
