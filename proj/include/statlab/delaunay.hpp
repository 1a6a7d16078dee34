#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "statlab/graph.hpp"
#include "statlab/rng.hpp"

namespace statlab {

enum class Geometry { euclidean_2d, hyperbolic_2d };

[[nodiscard]] const char* geometry_name(Geometry g) noexcept;

/// Intensity-one Poisson sample in a disk window. Hyperbolic samples are stored in
/// Poincaré-disk coordinates; radii are always intrinsic (Euclidean or hyperbolic).
struct PointSample {
  Geometry model = Geometry::euclidean_2d;
  std::vector<Eigen::Vector2d> points;
  double target_radius = 0.0;
  double window_radius = 0.0;
  bool includes_origin = false;
};

/// Area of the window: πR² or 2π(cosh R − 1).
[[nodiscard]] double window_area(Geometry model, double radius);

/// Intrinsic distance from the origin of a stored point.
[[nodiscard]] double radius_of(Geometry model, const Eigen::Vector2d& p);

/// Poisson(area) points uniform in the window of radius target_radius + margin, with the
/// origin appended last.
[[nodiscard]] PointSample sample_poisson_points(Geometry model, double target_radius, double margin, Stream& rng);

/// CSV: a `# model=<name> target_radius=<r> window_radius=<R>` line, then `x,y` rows.
void write_point_sample(std::ostream& out, const PointSample& sample);

/// Delaunay triangulation of a point set; triangles index into the input.
struct Triangulation {
  std::vector<std::array<std::uint32_t, 3>> triangles;  // counter-clockwise
};

/// Bowyer-Watson with walking point location. Co-circular ties count as outside the circle.
[[nodiscard]] Triangulation delaunay_triangulation(const std::vector<Eigen::Vector2d>& points);

/// Delaunay graph rooted at the origin: vertex 0 is the origin, point i (i ≠ origin) becomes a
/// later vertex in input order. Hyperbolic samples keep only faces whose circumdisk lies in the
/// open unit disk. Vertices beyond target_radius are frontier.
struct DelaunayGraph {
  RootedMultigraph graph;
  std::vector<std::uint32_t> point_of_vertex;
};
[[nodiscard]] DelaunayGraph delaunay_rooted_graph(const PointSample& sample);

/// Independent check that some disk through a and b contains no point of `points` in its
/// interior; for the hyperbolic model the disk must also lie in the open unit disk.
/// `skip_a`, `skip_b` are the indices of a and b in `points`.
[[nodiscard]] bool empty_disk_exists(const std::vector<Eigen::Vector2d>& points, std::uint32_t skip_a,
                                     std::uint32_t skip_b, Geometry model);

}  // namespace statlab
