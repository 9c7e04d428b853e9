#include "frosting/depth_advisor.hpp"

#include <algorithm>
#include <cmath>

#include "frosting/kdtree.hpp"
#include "frosting/parallel.hpp"

namespace frosting {

std::vector<double> nearest_neighbor_distances(const GaussianCloud& cloud) {
    std::size_t n = cloud.size();
    if (n < 2) fail(Err::TooFewGaussians, "need at least 2 Gaussians, got " + std::to_string(n));
    std::vector<Vec3> means(n);
    for (std::size_t i = 0; i < n; ++i) means[i] = cloud.gaussians[i].mean;
    KdTree tree(means);
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) {
        auto [idx, d2] = tree.nearest(means[i], i);
        internal_check(idx != KdTree::npos, "nearest neighbor exists for n >= 2");
        out[i] = std::sqrt(d2);
    });
    return out;
}

double complexity_score(const GaussianCloud& cloud) {
    std::size_t n = cloud.size();
    if (n < 10)
        fail(Err::TooFewGaussians,
             "complexity score needs at least 10 Gaussians, got " + std::to_string(n));
    Vec3 lo = cloud.gaussians[0].mean, hi = lo;
    for (const Gaussian3D& g : cloud.gaussians) {
        lo = lo.cwiseMin(g.mean);
        hi = hi.cwiseMax(g.mean);
    }
    double box = (hi - lo).maxCoeff();
    if (box <= 1e-12)
        fail(Err::DegenerateBoundingBox, "longest bounding-box edge " + std::to_string(box));

    std::vector<double> ratios = nearest_neighbor_distances(cloud);
    for (double& r : ratios) r /= box;
    std::sort(ratios.begin(), ratios.end());
    // Nearest-rank quantile: index ceil(0.1 * n) - 1 of the ascending sort.
    std::size_t rank = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n)));
    return ratios[rank - 1];
}

int optimal_depth(double cs, double gamma) {
    if (cs <= 0 || gamma <= 0)
        fail(Err::NonPositiveInput,
             "cs=" + std::to_string(cs) + " gamma=" + std::to_string(gamma));
    double d = std::floor(-std::log2(gamma * cs));
    return static_cast<int>(std::clamp(d, 1.0, 10.0));
}

DepthAdvice advise_depth(const GaussianCloud& cloud, double gamma) {
    DepthAdvice advice;
    advice.gamma = gamma;
    Vec3 lo = cloud.gaussians.empty() ? Vec3::Zero() : cloud.gaussians[0].mean, hi = lo;
    for (const Gaussian3D& g : cloud.gaussians) {
        lo = lo.cwiseMin(g.mean);
        hi = hi.cwiseMax(g.mean);
    }
    advice.box_edge = (hi - lo).maxCoeff();
    advice.complexity_score = complexity_score(cloud);
    advice.depth = optimal_depth(advice.complexity_score, gamma);
    return advice;
}

}  // namespace frosting
