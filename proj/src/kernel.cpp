#include "statlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "statlab/errors.hpp"
#include "statlab/format.hpp"

namespace statlab {

SparseDistribution SparseDistribution::point_mass(VertexId x, std::size_t dimension) {
  if (index_of(x) >= dimension) throw UsageError("point mass outside the vertex range");
  Eigen::SparseVector<double> v(static_cast<Eigen::Index>(dimension));
  v.insert(index_of(x)) = 1.0;
  return SparseDistribution(std::move(v));
}

double SparseDistribution::operator[](VertexId v) const {
  if (index_of(v) >= dimension()) return 0.0;
  return values_.coeff(index_of(v));
}

TransitionKernel::TransitionKernel(const RootedMultigraph& g) : g_(g) {
  const auto n = static_cast<std::int64_t>(g.vertex_count());
  p_.resize(n, n);
  Eigen::VectorXi row_sizes(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const VertexId v = vertex_at(static_cast<std::size_t>(i));
    row_sizes[i] = g.is_frontier(v) ? 0 : static_cast<int>(g.neighbors(v).size()) + 1;
  }
  p_.reserve(row_sizes);
  for (std::int64_t i = 0; i < n; ++i) {
    const VertexId v = vertex_at(static_cast<std::size_t>(i));
    if (g.is_frontier(v)) continue;
    const auto den = static_cast<double>(g.degree_denominator(v));
    if (g.loop_count(v) > 0) p_.insert(i, i) = static_cast<double>(g.loop_count(v)) / den;
    for (const auto& e : g.neighbors(v)) p_.insert(i, index_of(e.neighbor)) = static_cast<double>(e.count) / den;
  }
  p_.makeCompressed();
}

SparseDistribution TransitionKernel::push(const SparseDistribution& d) const {
  if (d.dimension() > static_cast<std::size_t>(p_.rows())) throw UsageError("distribution outside the kernel range");
  std::vector<std::pair<std::int64_t, double>> terms;
  d.for_each([&](VertexId y, double w) {
    if (g_.is_frontier(y)) {
      throw FrontierError("push from frontier vertex " + std::to_string(index_of(y)));
    }
    if (g_.degree_denominator(y) == 0) throw UsageError("push from isolated vertex " + std::to_string(index_of(y)));
    for (Matrix::InnerIterator it(p_, index_of(y)); it; ++it) terms.emplace_back(it.col(), w * it.value());
  });
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigen::SparseVector<double> out(p_.cols());
  out.reserve(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size();) {
    const auto idx = terms[i].first;
    double sum = 0.0;
    for (; i < terms.size() && terms[i].first == idx; ++i) sum += terms[i].second;
    if (sum >= SparseDistribution::prune_threshold) out.insertBack(idx) = sum;
  }
  return SparseDistribution(std::move(out));
}

SparseDistribution TransitionKernel::n_step(VertexId x, std::uint32_t n) const {
  auto d = SparseDistribution::point_mass(x, static_cast<std::size_t>(p_.rows()));
  for (std::uint32_t i = 0; i < n; ++i) d = push(d);
  return d;
}

SparseDistribution push_distribution(const RootedMultigraph& g, const SparseDistribution& d) {
  return TransitionKernel(g).push(d);
}

SparseDistribution n_step_distribution(const RootedMultigraph& g, VertexId x, std::uint32_t n) {
  return TransitionKernel(g).n_step(x, n);
}

double l1_distance(const SparseDistribution& a, const SparseDistribution& b) {
  return (a.values() - b.values()).cwiseAbs().sum();
}

double shannon_entropy(const SparseDistribution& d) {
  double h = 0.0;
  d.for_each([&](VertexId, double p) { h -= p * std::log(p); });
  return h;
}

double alpha_n(const TransitionKernel& k, VertexId x, std::uint32_t n) {
  const auto pn = k.n_step(x, n);
  return l1_distance(k.push(pn), pn);
}

double alpha_n(const RootedMultigraph& g, VertexId x, std::uint32_t n) { return alpha_n(TransitionKernel(g), x, n); }

double shannon_entropy_n(const TransitionKernel& k, VertexId x, std::uint32_t n) {
  return shannon_entropy(k.n_step(x, n));
}

double shannon_entropy_n(const RootedMultigraph& g, VertexId x, std::uint32_t n) {
  return shannon_entropy_n(TransitionKernel(g), x, n);
}

namespace {

void check_mn(std::uint32_t m, std::uint32_t n) {
  if (m >= n) throw UsageError("mutual information needs m < n");
}

// Σ_z q(z) log(q(z) / pn(z)).
double relative_entropy(const SparseDistribution& q, const SparseDistribution& pn) {
  double s = 0.0;
  q.for_each([&](VertexId z, double qz) {
    const double pz = pn[z];
    if (pz > 0.0) s += qz * std::log(qz / pz);
  });
  return s;
}

}  // namespace

double mutual_information(const TransitionKernel& k, VertexId x, std::uint32_t m, std::uint32_t n) {
  check_mn(m, n);
  const auto pm = k.n_step(x, m);
  const auto pn = k.n_step(x, n);
  double total = 0.0;
  pm.for_each([&](VertexId y, double w) { total += w * relative_entropy(k.n_step(y, n - m), pn); });
  return total;
}

double mutual_information(const RootedMultigraph& g, VertexId x, std::uint32_t m, std::uint32_t n) {
  return mutual_information(TransitionKernel(g), x, m, n);
}

double entropy_telescoping_check(const TransitionKernel& k, VertexId x, std::uint32_t m, std::uint32_t n) {
  check_mn(m, n);
  const auto pm = k.n_step(x, m);
  const auto pn = k.n_step(x, n);
  double mi = 0.0;
  double conditional = 0.0;
  pm.for_each([&](VertexId y, double w) {
    const auto q = k.n_step(y, n - m);
    mi += w * relative_entropy(q, pn);
    conditional += w * shannon_entropy(q);
  });
  return mi - (shannon_entropy(pn) - conditional);
}

double entropy_telescoping_check(const RootedMultigraph& g, VertexId x, std::uint32_t m, std::uint32_t n) {
  return entropy_telescoping_check(TransitionKernel(g), x, m, n);
}

double carne_varopoulos_margin(const RootedMultigraph& g, VertexId x, std::uint32_t r, const SparseDistribution& pr) {
  if (r == 0) throw UsageError("Carne-Varopoulos margin needs r >= 1");
  const auto dist = distances_within(g, x, r);
  const auto dx = static_cast<double>(g.degree_denominator(x));
  double margin = std::numeric_limits<double>::infinity();
  pr.for_each([&](VertexId z, double p) {
    if (g.is_frontier(z)) throw FrontierError("degree of frontier vertex " + std::to_string(index_of(z)) + " unknown");
    const double d = dist[index_of(z)];
    const double bound =
        2.0 * std::sqrt(static_cast<double>(g.degree_denominator(z)) / dx) * std::exp(-d * d / (2.0 * r));
    margin = std::min(margin, bound - p);
  });
  return margin;
}

double carne_varopoulos_margin(const TransitionKernel& k, VertexId x, std::uint32_t r) {
  return carne_varopoulos_margin(k.graph(), x, r, k.n_step(x, r));
}

double carne_varopoulos_margin(const RootedMultigraph& g, VertexId x, std::uint32_t r) {
  return carne_varopoulos_margin(TransitionKernel(g), x, r);
}

KernelDiagnostics kernel_diagnostics(const RootedMultigraph& g, VertexId x, const DiagnosticsRequest& request) {
  if (request.n_min > request.n_max) throw UsageError("empty n range");
  const TransitionKernel k(g);
  const std::uint32_t top = request.n_max + (request.alpha ? 1 : 0);
  std::vector<SparseDistribution> laws;
  laws.reserve(top + 1);
  laws.push_back(SparseDistribution::point_mass(x, g.vertex_count()));
  for (std::uint32_t i = 1; i <= top; ++i) laws.push_back(k.push(laws.back()));

  KernelDiagnostics out;
  for (std::uint32_t n = request.n_min; n <= request.n_max; ++n) {
    if (request.alpha) out.alpha_sequence.push_back(l1_distance(laws[n + 1], laws[n]));
    if (request.entropy) out.entropy_sequence.push_back(shannon_entropy(laws[n]));
  }
  if (request.mutual_information) {
    for (auto m : request.m_values) {
      for (std::uint32_t n = std::max(request.n_min, m + 1); n <= request.n_max; ++n) out.mi_table[{m, n}] = 0.0;
      if (m >= request.n_max) continue;
      laws[m].for_each([&](VertexId y, double w) {
        auto q = SparseDistribution::point_mass(y, g.vertex_count());
        for (std::uint32_t n = m + 1; n <= request.n_max; ++n) {
          q = k.push(q);
          if (n >= request.n_min) out.mi_table[{m, n}] += w * relative_entropy(q, laws[n]);
        }
      });
    }
  }
  if (request.cv_margin) {
    out.cv_margin = std::numeric_limits<double>::infinity();
    for (std::uint32_t n = std::max<std::uint32_t>(request.n_min, 1); n <= request.n_max; ++n) {
      out.cv_margin = std::min(out.cv_margin, carne_varopoulos_margin(g, x, n, laws[n]));
    }
  }
  return out;
}

void write_diagnostics_csv(std::ostream& out, const KernelDiagnostics& d, const DiagnosticsRequest& request) {
  out << "quantity,m,n,value\n";
  for (std::size_t i = 0; i < d.alpha_sequence.size(); ++i) {
    out << "alpha,," << request.n_min + i << ',' << format_real(d.alpha_sequence[i]) << '\n';
  }
  for (std::size_t i = 0; i < d.entropy_sequence.size(); ++i) {
    out << "H,," << request.n_min + i << ',' << format_real(d.entropy_sequence[i]) << '\n';
  }
  for (const auto& [mn, value] : d.mi_table) {
    out << "I," << mn.first << ',' << mn.second << ',' << format_real(value) << '\n';
  }
  if (request.cv_margin) out << "cv_margin,," << request.n_max << ',' << format_real(d.cv_margin) << '\n';
}

}  // namespace statlab
