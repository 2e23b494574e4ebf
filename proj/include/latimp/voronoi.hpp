// voronoi.hpp — Voronoi partition of a small planar site set, clipped to a
// convex region. Exact half-plane intersection per site.
#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace latimp {

struct VoronoiDiagram {
    using Segment = std::pair<Eigen::Vector2d, Eigen::Vector2d>;
    std::vector<Segment> edges;            // bisector segments inside region
    std::vector<Eigen::Vector2d> vertices; // points equidistant to >= 3 sites
    std::vector<Eigen::Vector2d> region;   // scanned polygon (CCW)
};

// region must be a convex CCW polygon lying in the neighborhood of the sites.
// grid_n is accepted for interface parity with the brute-force classification
// oracle; the half-plane construction itself does not sample a grid.
VoronoiDiagram voronoi_partition(const std::vector<Eigen::Vector2d>& sites,
                                 const std::vector<Eigen::Vector2d>& region,
                                 int grid_n = 0);

}  // namespace latimp
