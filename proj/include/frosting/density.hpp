#pragma once

#include <memory>

#include "frosting/gaussian.hpp"
#include "frosting/kdtree.hpp"

namespace frosting {

// Evaluates the cloud's opacity-weighted density
//     d(p) = sum_g alpha_g * exp(-0.5 * (p - mu_g)^T Sigma_g^{-1} (p - mu_g)).
// Contributions beyond Mahalanobis distance 4 are truncated (each dropped
// term is below alpha * 3.4e-4); a kd-tree over means prunes candidates via
// the per-Gaussian Euclidean bound 4 * max stddev. Contributions are summed
// in sorted-value order so the result is exactly invariant under permutation
// of the cloud.
class DensityIndex {
  public:
    explicit DensityIndex(const GaussianCloud& cloud);

    double density_at(const Vec3& p) const;

    std::size_t size() const { return prec_.size(); }

  private:
    struct PrecomputedGaussian {
        Vec3 mean;
        Mat3 inv_cov;
        double opacity;
        double trunc_r2;  // squared Euclidean radius bounding Mahalanobis 4
    };

    std::vector<PrecomputedGaussian> prec_;
    KdTree tree_;
    double max_trunc_r2_ = 0.0;
};

}  // namespace frosting
