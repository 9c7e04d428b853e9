#include "frosting/density.hpp"

#include <algorithm>
#include <cmath>

namespace frosting {

namespace {
constexpr double kMahalanobisCutoff = 4.0;
}

DensityIndex::DensityIndex(const GaussianCloud& cloud) {
    prec_.reserve(cloud.size());
    std::vector<Vec3> means;
    means.reserve(cloud.size());
    for (const Gaussian3D& g : cloud.gaussians) {
        Mat3 cov = covariance(g);
        PrecomputedGaussian p;
        p.mean = g.mean;
        p.inv_cov = cov.inverse();
        p.opacity = g.opacity();
        double max_std = std::exp(g.log_scales.maxCoeff());
        p.trunc_r2 = sqr(kMahalanobisCutoff * max_std);
        max_trunc_r2_ = std::max(max_trunc_r2_, p.trunc_r2);
        prec_.push_back(p);
        means.push_back(g.mean);
    }
    tree_ = KdTree(std::move(means));
}

double DensityIndex::density_at(const Vec3& p) const {
    std::vector<std::size_t> candidates = tree_.radius(p, max_trunc_r2_);
    // Gather, sort, then sum: float addition is order-dependent, and sorting
    // by value makes the total a function of the contribution multiset alone.
    std::vector<double> terms;
    terms.reserve(candidates.size());
    for (std::size_t i : candidates) {
        const PrecomputedGaussian& g = prec_[i];
        Vec3 d = p - g.mean;
        if (d.squaredNorm() > g.trunc_r2) continue;
        double q = d.dot(g.inv_cov * d);
        if (q > sqr(kMahalanobisCutoff)) continue;
        terms.push_back(g.opacity * std::exp(-0.5 * q));
    }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

}  // namespace frosting
