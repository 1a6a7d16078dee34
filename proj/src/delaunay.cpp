#include "statlab/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "statlab/errors.hpp"
#include "statlab/format.hpp"

namespace statlab {

const char* geometry_name(Geometry g) noexcept {
  return g == Geometry::euclidean_2d ? "euclidean_2d" : "hyperbolic_2d";
}

double window_area(Geometry model, double radius) {
  if (model == Geometry::euclidean_2d) return std::numbers::pi * radius * radius;
  return 2.0 * std::numbers::pi * (std::cosh(radius) - 1.0);
}

double radius_of(Geometry model, const Eigen::Vector2d& p) {
  const double e = p.norm();
  return model == Geometry::euclidean_2d ? e : 2.0 * std::atanh(e);
}

PointSample sample_poisson_points(Geometry model, double target_radius, double margin, Stream& rng) {
  if (!(target_radius > 0.0) || !(margin > 0.0)) throw UsageError("target radius and margin must be positive");
  PointSample s;
  s.model = model;
  s.target_radius = target_radius;
  s.window_radius = target_radius + margin;
  const double R = s.window_radius;
  const auto count = sample_poisson(rng, window_area(model, R));
  s.points.reserve(count + 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    double rho = 0.0;
    if (model == Geometry::euclidean_2d) {
      rho = R * std::sqrt(u);
    } else {
      // Radial density ∝ sinh r on [0, R].
      const double r = std::acosh(1.0 + u * (std::cosh(R) - 1.0));
      rho = std::tanh(0.5 * r);
    }
    s.points.emplace_back(rho * std::cos(theta), rho * std::sin(theta));
  }
  s.points.emplace_back(0.0, 0.0);
  s.includes_origin = true;
  return s;
}

void write_point_sample(std::ostream& out, const PointSample& sample) {
  out << "# model=" << geometry_name(sample.model) << " target_radius=" << format_real(sample.target_radius)
      << " window_radius=" << format_real(sample.window_radius) << '\n';
  out << "x,y\n";
  for (const auto& p : sample.points) out << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
}

namespace {

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies strictly inside the circle through the counter-clockwise triangle abc.
double incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                const Eigen::Vector2d& d) {
  const Eigen::Vector2d ad = a - d;
  const Eigen::Vector2d bd = b - d;
  const Eigen::Vector2d cd = c - d;
  const double a2 = ad.squaredNorm();
  const double b2 = bd.squaredNorm();
  const double c2 = cd.squaredNorm();
  return ad.x() * (bd.y() * c2 - b2 * cd.y()) - ad.y() * (bd.x() * c2 - b2 * cd.x()) +
         a2 * (bd.x() * cd.y() - bd.y() * cd.x());
}

std::uint64_t morton_key(std::uint32_t x, std::uint32_t y) {
  auto spread = [](std::uint64_t v) {
    v &= 0xffffffffULL;
    v = (v | (v << 16)) & 0x0000ffff0000ffffULL;
    v = (v | (v << 8)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v << 4)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
  };
  return spread(x) | (spread(y) << 1);
}

struct Tri {
  std::array<std::uint32_t, 3> v;
  std::array<std::int64_t, 3> nb;  // neighbour across the edge opposite v[i]
  bool alive;
};

class BowyerWatson {
 public:
  explicit BowyerWatson(const std::vector<Eigen::Vector2d>& input) : pts_(input) {
    const auto n = static_cast<std::uint32_t>(input.size());
    Eigen::Vector2d lo = input.front();
    Eigen::Vector2d hi = input.front();
    for (const auto& p : input) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Eigen::Vector2d c = 0.5 * (lo + hi);
    const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-9});
    const double big = 1e4 * span;
    pts_.emplace_back(c.x() - big, c.y() - big);
    pts_.emplace_back(c.x() + big, c.y() - big);
    pts_.emplace_back(c.x(), c.y() + big);
    tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});
    first_super_ = n;

    std::vector<std::pair<std::uint64_t, std::uint32_t>> order;
    order.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto q = [&](double v, double l) {
        return static_cast<std::uint32_t>(std::clamp((v - l) / span, 0.0, 1.0) * 65535.0);
      };
      order.emplace_back(morton_key(q(input[i].x(), lo.x()), q(input[i].y(), lo.y())), i);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [key, i] : order) insert(i);
  }

  [[nodiscard]] Triangulation result() const {
    Triangulation t;
    for (const auto& tri : tris_) {
      if (!tri.alive) continue;
      if (tri.v[0] >= first_super_ || tri.v[1] >= first_super_ || tri.v[2] >= first_super_) continue;
      t.triangles.push_back(tri.v);
    }
    return t;
  }

 private:
  std::int64_t locate(const Eigen::Vector2d& p) {
    std::int64_t t = last_;
    const std::size_t cap = 4 * tris_.size() + 64;
    for (std::size_t step = 0; step < cap; ++step) {
      const auto& tri = tris_[static_cast<std::size_t>(t)];
      const std::uint32_t rot = (step * 7) % 3;  // vary the first edge tried to avoid cycles
      bool moved = false;
      for (std::uint32_t k = 0; k < 3; ++k) {
        const std::uint32_t i = (rot + k) % 3;
        const auto& a = pts_[tri.v[(i + 1) % 3]];
        const auto& b = pts_[tri.v[(i + 2) % 3]];
        if (orient(a, b, p) < 0.0 && tri.nb[i] >= 0) {
          t = tri.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const auto& tri = tris_[i];
      if (!tri.alive) continue;
      if (orient(pts_[tri.v[0]], pts_[tri.v[1]], p) >= 0.0 && orient(pts_[tri.v[1]], pts_[tri.v[2]], p) >= 0.0 &&
          orient(pts_[tri.v[2]], pts_[tri.v[0]], p) >= 0.0) {
        return static_cast<std::int64_t>(i);
      }
    }
    throw AssertionError("point location failed");
  }

  bool in_circle(std::int64_t t, const Eigen::Vector2d& p) const {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    return incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0;
  }

  void insert(std::uint32_t pi) {
    const Eigen::Vector2d& p = pts_[pi];
    const std::int64_t start = locate(p);
    bad_.clear();
    bad_.push_back(start);
    tris_[static_cast<std::size_t>(start)].alive = false;
    for (std::size_t k = 0; k < bad_.size(); ++k) {
      const auto& tri = tris_[static_cast<std::size_t>(bad_[k])];
      for (auto nb : tri.nb) {
        if (nb < 0 || !tris_[static_cast<std::size_t>(nb)].alive) continue;
        if (in_circle(nb, p)) {
          tris_[static_cast<std::size_t>(nb)].alive = false;
          bad_.push_back(nb);
        }
      }
    }
    // Fan the cavity boundary to p.
    fresh_.clear();
    for (auto t : bad_) {
      const Tri tri = tris_[static_cast<std::size_t>(t)];
      for (std::uint32_t i = 0; i < 3; ++i) {
        const auto nb = tri.nb[i];
        if (nb >= 0 && !tris_[static_cast<std::size_t>(nb)].alive) continue;
        const std::uint32_t a = tri.v[(i + 1) % 3];
        const std::uint32_t b = tri.v[(i + 2) % 3];
        const auto id = static_cast<std::int64_t>(tris_.size());
        tris_.push_back({{a, b, pi}, {-1, -1, nb}, true});
        if (nb >= 0) {
          auto& outer = tris_[static_cast<std::size_t>(nb)];
          for (auto& back : outer.nb) {
            if (back == t) back = id;
          }
        }
        fresh_.push_back(id);
      }
    }
    for (auto id : fresh_) {
      auto& tri = tris_[static_cast<std::size_t>(id)];
      for (auto other : fresh_) {
        if (other == id) continue;
        const auto& o = tris_[static_cast<std::size_t>(other)];
        if (o.v[0] == tri.v[1]) tri.nb[0] = other;  // shares edge (b, p)
        if (o.v[1] == tri.v[0]) tri.nb[1] = other;  // shares edge (p, a)
      }
    }
    last_ = fresh_.back();
  }

  std::vector<Eigen::Vector2d> pts_;
  std::vector<Tri> tris_;
  std::vector<std::int64_t> bad_;
  std::vector<std::int64_t> fresh_;
  std::int64_t last_ = 0;
  std::uint32_t first_super_ = 0;
};

}  // namespace

Triangulation delaunay_triangulation(const std::vector<Eigen::Vector2d>& points) {
  if (points.size() < 3) throw UsageError("Delaunay triangulation needs at least 3 points");
  return BowyerWatson(points).result();
}

DelaunayGraph delaunay_rooted_graph(const PointSample& sample) {
  if (!sample.includes_origin) throw UsageError("point sample must include the origin");
  const auto n = static_cast<std::uint32_t>(sample.points.size());
  if (n < 3) throw UsageError("Delaunay graph needs at least 3 points");
  const std::uint32_t origin = n - 1;
  auto vertex_of = [&](std::uint32_t i) { return vertex_at(i == origin ? 0 : i + 1); };

  DelaunayGraph out{RootedMultigraph(n), std::vector<std::uint32_t>(n)};
  for (std::uint32_t i = 0; i < n; ++i) out.point_of_vertex[index_of(vertex_of(i))] = i;

  const auto tri = delaunay_triangulation(sample.points);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(3 * tri.triangles.size());
  for (const auto& t : tri.triangles) {
    if (sample.model == Geometry::hyperbolic_2d) {
      const Eigen::Vector2d& a = sample.points[t[0]];
      const Eigen::Vector2d& b = sample.points[t[1]];
      const Eigen::Vector2d& c = sample.points[t[2]];
      const Eigen::Vector2d ab = b - a;
      const Eigen::Vector2d ac = c - a;
      const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
      const Eigen::Vector2d off((ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
                                (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d);
      if ((a + off).norm() + off.norm() >= 1.0) continue;
    }
    for (int k = 0; k < 3; ++k) {
      auto u = t[k];
      auto v = t[(k + 1) % 3];
      if (u > v) std::swap(u, v);
      edges.emplace_back(u, v);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [u, v] : edges) out.graph.add_edge(vertex_of(u), vertex_of(v));
  for (std::uint32_t i = 0; i < n; ++i) {
    if (radius_of(sample.model, sample.points[i]) > sample.target_radius) out.graph.set_frontier(vertex_of(i), true);
  }
  return out;
}

bool empty_disk_exists(const std::vector<Eigen::Vector2d>& points, std::uint32_t skip_a, std::uint32_t skip_b,
                       Geometry model) {
  const Eigen::Vector2d& A = points.at(skip_a);
  const Eigen::Vector2d& B = points.at(skip_b);
  const Eigen::Vector2d m = 0.5 * (A + B);
  const Eigen::Vector2d d = B - A;
  const Eigen::Vector2d nrm(-d.y(), d.x());
  const double base = (m - A).squaredNorm();
  // Centres m + t·nrm; each other point q excludes a half-line of t.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    const Eigen::Vector2d mq = m - points[i];
    const double k = nrm.dot(mq);
    const double r0 = mq.squaredNorm() - base;
    if (k > 0.0) {
      lo = std::max(lo, -r0 / (2.0 * k));
    } else if (k < 0.0) {
      hi = std::min(hi, -r0 / (2.0 * k));
    } else if (r0 <= 0.0) {
      return false;
    }
    if (!(lo < hi)) return false;
  }
  if (model == Geometry::euclidean_2d) return true;

  // |c(t)| + ρ(t) is convex in t and exceeds 1 once |t|·|nrm| > 1.
  const double reach = 2.0 / nrm.norm();
  double a = std::max(lo, -reach);
  double b = std::min(hi, reach);
  if (!(a < b)) return false;
  auto f = [&](double t) {
    const Eigen::Vector2d c = m + t * nrm;
    return c.norm() + (c - A).norm();
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
    if (std::min(f1, f2) < 1.0) return true;
  }
  return std::min(f1, f2) < 1.0;
}

}  // namespace statlab
