#include "frosting/gaussian.hpp"

#include "frosting/sh.hpp"

namespace frosting {

Mat3 covariance(const Gaussian3D& g) {
    double n = g.rotation.norm();
    if (n <= 1e-12) fail(Err::ZeroQuaternion, "quaternion norm " + std::to_string(n) + " is at or below 1e-12");
    Mat3 r = quat_to_mat(g.rotation.normalized());
    Vec3 s = g.log_scales.array().exp();
    Mat3 m = r * s.asDiagonal();
    return m * m.transpose();
}

void GaussianCloud::validate() const {
    std::size_t want = static_cast<std::size_t>(sh_coeff_count(sh_degree)) * 3;
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        if (gaussians[i].sh.size() != want)
            fail(Err::DegreeMismatch, "gaussian " + std::to_string(i) + " has " +
                                          std::to_string(gaussians[i].sh.size()) +
                                          " SH values, expected " + std::to_string(want));
    }
}

}  // namespace frosting
