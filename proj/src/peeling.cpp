#include "statlab/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "statlab/errors.hpp"

namespace statlab {

double alpha_from_kappa(double kappa) {
  if (!(kappa > 0.0) || kappa > kappa_critical * (1.0 + 1e-15)) {
    throw UsageError("kappa must lie in (0, 2/27]");
  }
  // a²(1−a) − 2κ = d − (a − 2/3)²(a + 1/3) with d = 4/27 − 2κ. The factored form keeps the
  // double root at κ = 2/27 resolvable; g(a) = (a − 2/3)²(a + 1/3) increases on [2/3, 1].
  const double d = 4.0 / 27.0 - 2.0 * kappa;
  double lo = 2.0 / 3.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double e = mid - 2.0 / 3.0;
    if (e * e * (mid + 1.0 / 3.0) < d) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoltzmannTable::BoltzmannTable(double kappa, std::uint32_t max_perimeter, std::uint32_t max_internal)
    : kappa_(kappa),
      max_perimeter_(max_perimeter),
      max_internal_(max_internal),
      rows_(max_perimeter + max_internal + 2),
      w_(static_cast<std::size_t>(rows_) * (max_internal + 1), 0.0) {
  if (max_perimeter < 2) throw UsageError("table needs perimeter >= 2");
  const std::size_t cols = max_internal + 1;
  auto at = [&](std::uint32_t m, std::uint32_t n) -> double& { return w_[m * cols + n]; };
  at(2, 0) = 1.0;
  // T(m, n) uses T(m+1, n−1) and same-n entries of smaller perimeter, so sweep n outer, m ascending.
  for (std::uint32_t n = 0; n <= max_internal; ++n) {
    for (std::uint32_t m = 2; m + n < rows_; ++m) {
      if (m == 2 && n == 0) continue;
      double s = n >= 1 ? kappa * at(m + 1, n - 1) : 0.0;
      for (std::uint32_t i = 2; i < m; ++i) {
        const std::uint32_t r = m - i + 1;
        for (std::uint32_t j = 0; j <= n; ++j) s += at(i, j) * at(r, n - j);
      }
      at(m, n) = s;
    }
  }
}

double BoltzmannTable::weight(std::uint32_t m, std::uint32_t n) const {
  if (m < 2 || m > max_perimeter_ || n > max_internal_) throw UsageError("Boltzmann table index out of range");
  return w_[static_cast<std::size_t>(m) * (max_internal_ + 1) + n];
}

double BoltzmannTable::z(std::uint32_t m) const {
  double s = 0.0;
  for (std::uint32_t n = 0; n <= max_internal_; ++n) s += weight(m, n);
  return s;
}

double PeelingParams::q_down(std::uint32_t i) const {
  if (i == 0 || i > max_down()) return 0.0;
  return 2.0 * std::pow(beta, i) * z_table[i + 1];
}

double PeelingParams::volume_increment_probability(std::uint32_t k) const {
  double p = k == 1 ? alpha : 0.0;
  for (std::uint32_t i = 1; i <= max_down(); ++i) {
    const auto& cdf = volume_cdf[i + 1];
    if (k >= cdf.size()) continue;
    p += q_down(i) * (cdf[k] - (k == 0 ? 0.0 : cdf[k - 1]));
  }
  return p;
}

void PeelingParams::validate() const {
  if (std::fabs(alpha * alpha * (1.0 - alpha) - 2.0 * kappa) > 1e-10) throw UsageError("alpha does not solve the cubic");
  if (std::fabs(beta - kappa / alpha) > 1e-12) throw UsageError("beta must equal kappa/alpha");
  if (std::fabs(truncation_error) > 1e-8) {
    throw UsageError("increment law normalization off by " + std::to_string(truncation_error));
  }
}

PeelingParams make_peeling_params(double kappa, const BoltzmannTable& table) {
  PeelingParams p;
  p.kappa = kappa;
  p.alpha = alpha_from_kappa(kappa);
  p.beta = kappa / p.alpha;
  const auto M = table.max_perimeter();
  p.z_table.assign(M + 1, 0.0);
  p.volume_cdf.assign(M + 1, {});
  for (std::uint32_t m = 2; m <= M; ++m) {
    p.z_table[m] = table.z(m);
    auto& cdf = p.volume_cdf[m];
    double run = 0.0;
    for (std::uint32_t n = 0; n <= table.max_internal(); ++n) {
      run += table.weight(m, n) / p.z_table[m];
      cdf.push_back(run);
    }
  }
  double total = p.alpha;
  for (std::uint32_t i = 1; i <= p.max_down(); ++i) {
    total += p.q_down(i);
    p.down_cdf.push_back(total - p.alpha);
  }
  p.truncation_error = 1.0 - total;
  return p;
}

PeelingParams make_peeling_params(double kappa) {
  const double alpha = alpha_from_kappa(kappa);
  const double beta = kappa / alpha;
  std::uint32_t M = 40;
  std::uint32_t N = 80;
  for (;;) {
    const BoltzmannTable table(kappa, M, N);
    auto p = make_peeling_params(kappa, table);
    const bool wide_enough = 2.0 * std::pow(beta, M) * table.z(M) < 1e-10;
    if (wide_enough && std::fabs(p.truncation_error) < 1e-10) return p;
    if (N >= 320) {
      throw UsageError("Boltzmann table insufficient for kappa = " + std::to_string(kappa) +
                       " (normalization error " + std::to_string(p.truncation_error) + ")");
    }
    M = M * 3 / 2;
    N *= 2;
  }
}

ChainStep sample_chain_step(const PeelingParams& params, Stream& rng) {
  const double total = params.alpha + (params.down_cdf.empty() ? 0.0 : params.down_cdf.back());
  const double u = rng.uniform() * total;
  if (u < params.alpha) return {1, 1};
  const auto it = std::upper_bound(params.down_cdf.begin(), params.down_cdf.end(), u - params.alpha);
  const auto i = static_cast<std::uint32_t>(
      std::min<std::ptrdiff_t>(it - params.down_cdf.begin(), static_cast<std::ptrdiff_t>(params.down_cdf.size()) - 1) +
      1);
  const auto& cdf = params.volume_cdf[i + 1];
  const double v = rng.uniform() * cdf.back();
  const auto k = std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), v) - cdf.begin(),
                                          static_cast<std::ptrdiff_t>(cdf.size()) - 1);
  return {-static_cast<std::int64_t>(i), static_cast<std::int64_t>(k)};
}

ChainPath sample_perimeter_volume_chain(const PeelingParams& params, std::uint64_t steps, Stream& rng,
                                        std::uint64_t max_attempts) {
  ChainPath path;
  for (;;) {
    if (path.attempts >= max_attempts) {
      throw BudgetError("perimeter chain rejected " + std::to_string(max_attempts) + " attempts");
    }
    ++path.attempts;
    path.perimeter.assign(1, 2);
    path.volume.assign(1, 2);
    bool ok = true;
    for (std::uint64_t t = 0; t < steps; ++t) {
      const auto s = sample_chain_step(params, rng);
      const auto x = path.perimeter.back() + s.dx;
      if (x < 2) {
        ok = false;
        break;
      }
      path.perimeter.push_back(x);
      path.volume.push_back(path.volume.back() + s.dy);
    }
    if (ok) break;
  }
  path.acceptance_rate = 1.0 / static_cast<double>(path.attempts);
  return path;
}

}  // namespace statlab
