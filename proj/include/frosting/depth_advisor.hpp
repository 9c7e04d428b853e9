#pragma once

#include "frosting/gaussian.hpp"

namespace frosting {

struct DepthAdvice {
    double complexity_score = 0.0;
    double box_edge = 0.0;  // longest bounding-box edge of the means
    double gamma = 100.0;
    int depth = 10;
    int default_depth = 10;
};

// Exact nearest-neighbor distance from each mean to any other mean.
// Throws TooFewGaussians below 2 entries. Duplicate means yield 0.
std::vector<double> nearest_neighbor_distances(const GaussianCloud& cloud);

// 0.1-quantile (nearest-rank, duplicates kept) of nn-distance / longest
// bounding-box edge. Requires >= 10 Gaussians; throws DegenerateBoundingBox
// when the longest edge is at or below 1e-12.
double complexity_score(const GaussianCloud& cloud);

// floor(-log2(gamma * cs)) clamped to [1, 10]. Throws NonPositiveInput.
int optimal_depth(double cs, double gamma = 100.0);

DepthAdvice advise_depth(const GaussianCloud& cloud, double gamma = 100.0);

}  // namespace frosting
