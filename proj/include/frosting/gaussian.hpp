#pragma once

#include <cstdint>
#include <vector>

#include "frosting/errors.hpp"
#include "frosting/math.hpp"

namespace frosting {

// One free 3-d Gaussian: mean, log-space scales, raw quaternion, logit
// opacity, interleaved RGB spherical-harmonic coefficients (DC first,
// sh[k*3 + channel]).
struct Gaussian3D {
    Vec3 mean = Vec3::Zero();
    Vec3 log_scales = Vec3::Zero();
    Quat rotation = Quat::identity();
    double opacity_logit = 0.0;
    std::vector<double> sh;

    double opacity() const { return sigmoid(opacity_logit); }
};

// World-space covariance R * diag(exp(log_scales))^2 * R^T.
// Throws ZeroQuaternion when the raw quaternion norm is at or below 1e-12.
Mat3 covariance(const Gaussian3D& g);

enum class CloudRole : uint8_t { Unconstrained, Regularized };

// A set of Gaussians sharing one SH degree. Value data; operations never
// mutate a cloud after construction.
struct GaussianCloud {
    int sh_degree = 0;
    CloudRole role = CloudRole::Unconstrained;
    std::vector<Gaussian3D> gaussians;

    std::size_t size() const { return gaussians.size(); }

    // Checks every member's SH length against sh_degree; throws DegreeMismatch.
    void validate() const;
};

}  // namespace frosting
