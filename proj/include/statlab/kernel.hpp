#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "statlab/graph.hpp"

namespace statlab {

/// Finitely supported probability vector over vertex ids.
///
/// Entries are kept sorted by vertex id; entries below `prune_threshold` are dropped.
class SparseDistribution {
 public:
  static constexpr double prune_threshold = 1e-300;

  SparseDistribution() = default;
  explicit SparseDistribution(Eigen::SparseVector<double> values) : values_(std::move(values)) {}

  static SparseDistribution point_mass(VertexId x, std::size_t dimension);

  [[nodiscard]] double operator[](VertexId v) const;
  [[nodiscard]] double total_mass() const { return values_.sum(); }
  [[nodiscard]] std::size_t support_size() const { return static_cast<std::size_t>(values_.nonZeros()); }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(values_.size()); }

  template <class F>
  void for_each(F&& f) const {
    for (Eigen::SparseVector<double>::InnerIterator it(values_); it; ++it) {
      f(vertex_at(static_cast<std::size_t>(it.index())), it.value());
    }
  }

  [[nodiscard]] const Eigen::SparseVector<double>& values() const noexcept { return values_; }

 private:
  Eigen::SparseVector<double> values_;
};

/// Row-stochastic transition matrix of the explored part of a graph.
///
/// Rows of frontier vertices are empty; pushing mass from a frontier vertex throws.
/// The kernel keeps a reference to the graph, which must outlive it and stay unchanged.
class TransitionKernel {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

  explicit TransitionKernel(const RootedMultigraph& g);
  explicit TransitionKernel(RootedMultigraph&&) = delete;

  [[nodiscard]] SparseDistribution push(const SparseDistribution& d) const;
  [[nodiscard]] SparseDistribution n_step(VertexId x, std::uint32_t n) const;

  [[nodiscard]] const Matrix& matrix() const noexcept { return p_; }
  [[nodiscard]] const RootedMultigraph& graph() const noexcept { return g_; }

 private:
  const RootedMultigraph& g_;
  Matrix p_;
};

[[nodiscard]] SparseDistribution push_distribution(const RootedMultigraph& g, const SparseDistribution& d);
[[nodiscard]] SparseDistribution n_step_distribution(const RootedMultigraph& g, VertexId x, std::uint32_t n);

/// Σ_y |a(y) − b(y)|.
[[nodiscard]] double l1_distance(const SparseDistribution& a, const SparseDistribution& b);

/// Shannon entropy in nats; 0·log 0 = 0.
[[nodiscard]] double shannon_entropy(const SparseDistribution& d);

[[nodiscard]] double alpha_n(const TransitionKernel& k, VertexId x, std::uint32_t n);
[[nodiscard]] double alpha_n(const RootedMultigraph& g, VertexId x, std::uint32_t n);

[[nodiscard]] double shannon_entropy_n(const TransitionKernel& k, VertexId x, std::uint32_t n);
[[nodiscard]] double shannon_entropy_n(const RootedMultigraph& g, VertexId x, std::uint32_t n);

/// Σ_{y,z} log(p^{n−m}(y,z) / p^n(x,z)) p^m(x,y) p^{n−m}(y,z). Requires 0 <= m < n.
[[nodiscard]] double mutual_information(const TransitionKernel& k, VertexId x, std::uint32_t m, std::uint32_t n);
[[nodiscard]] double mutual_information(const RootedMultigraph& g, VertexId x, std::uint32_t m, std::uint32_t n);

/// I_m^n(x) − [H_n(x) − Σ_y p^m(x,y) H_{n−m}(y)].
[[nodiscard]] double entropy_telescoping_check(const TransitionKernel& k, VertexId x, std::uint32_t m,
                                               std::uint32_t n);
[[nodiscard]] double entropy_telescoping_check(const RootedMultigraph& g, VertexId x, std::uint32_t m,
                                               std::uint32_t n);

/// min over z in the support of p^r(x,·) of 2 sqrt(D(z)/D(x)) exp(−d(x,z)²/2r) − p^r(x,z).
[[nodiscard]] double carne_varopoulos_margin(const TransitionKernel& k, VertexId x, std::uint32_t r);
[[nodiscard]] double carne_varopoulos_margin(const RootedMultigraph& g, VertexId x, std::uint32_t r);
/// Same, against a precomputed p^r(x,·).
[[nodiscard]] double carne_varopoulos_margin(const RootedMultigraph& g, VertexId x, std::uint32_t r,
                                             const SparseDistribution& pr);

/// Finite-horizon diagnostics at one vertex. `alpha_sequence[i]` and `entropy_sequence[i]`
/// hold α_n and H_n for n = i; `mi_table` is keyed by (m, n).
struct KernelDiagnostics {
  std::vector<double> alpha_sequence;
  std::vector<double> entropy_sequence;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> mi_table;
  double cv_margin = 0.0;
};

struct DiagnosticsRequest {
  std::uint32_t n_min = 1;
  std::uint32_t n_max = 1;
  std::vector<std::uint32_t> m_values;
  bool alpha = true;
  bool entropy = true;
  bool mutual_information = true;
  bool cv_margin = true;
};

/// Alpha needs the ball of radius n_max + 1 explored; the rest radius n_max.
[[nodiscard]] KernelDiagnostics kernel_diagnostics(const RootedMultigraph& g, VertexId x,
                                                   const DiagnosticsRequest& request);

/// CSV with header `quantity,m,n,value`; quantity is alpha, H, I or cv_margin. The m column is
/// empty except for I; cv_margin is reported once with n = n_max.
void write_diagnostics_csv(std::ostream& out, const KernelDiagnostics& d, const DiagnosticsRequest& request);

}  // namespace statlab
