#include "frosting/math.hpp"

#include <Eigen/SVD>

namespace frosting {

Quat mat_to_quat(const Mat3& r) {
    // Largest-diagonal branch keeps the divisor well away from zero.
    double t;
    Quat q;
    if (r(2, 2) < 0) {
        if (r(0, 0) > r(1, 1)) {
            t = 1 + r(0, 0) - r(1, 1) - r(2, 2);
            q = {r(2, 1) - r(1, 2), t, r(0, 1) + r(1, 0), r(2, 0) + r(0, 2)};
        } else {
            t = 1 - r(0, 0) + r(1, 1) - r(2, 2);
            q = {r(0, 2) - r(2, 0), r(0, 1) + r(1, 0), t, r(1, 2) + r(2, 1)};
        }
    } else {
        if (r(0, 0) < -r(1, 1)) {
            t = 1 - r(0, 0) - r(1, 1) + r(2, 2);
            q = {r(1, 0) - r(0, 1), r(2, 0) + r(0, 2), r(1, 2) + r(2, 1), t};
        } else {
            t = 1 + r(0, 0) + r(1, 1) + r(2, 2);
            q = {t, r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
        }
    }
    double s = 0.5 / std::sqrt(t);
    q = {q.w * s, q.x * s, q.y * s, q.z * s};
    if (q.w < 0) q = {-q.w, -q.x, -q.y, -q.z};
    return q;
}

Quat minimal_rotation(const Vec3& u, const Vec3& v, double parallel_tol) {
    double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return Quat::identity();
    Vec3 un = u / nu, vn = v / nv;
    Vec3 c = un.cross(vn);
    double s = c.norm();
    if (s < parallel_tol) return Quat::identity();
    double angle = std::atan2(s, un.dot(vn));
    return axis_angle_quat(c / s, angle);
}

Mat3 polar_rotation(const Mat3& h) {
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU(), v = svd.matrixV();
    Mat3 d = Mat3::Identity();
    d(2, 2) = (u * v.transpose()).determinant();
    return u * d * v.transpose();
}

}  // namespace frosting
