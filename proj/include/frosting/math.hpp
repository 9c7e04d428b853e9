#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace frosting {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Quaternions are stored raw as (w, x, y, z) and normalized on use.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Quat conjugate() const { return {w, -x, -y, -z}; }

    static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }
};

inline Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// Rotation matrix of a unit quaternion.
inline Mat3 quat_to_mat(const Quat& q) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

// Quaternion of a rotation matrix, largest-diagonal branch, w kept positive.
Quat mat_to_quat(const Mat3& r);

// Minimal rotation taking direction u to direction v; identity when the
// normalized cross product falls below the parallel threshold.
Quat minimal_rotation(const Vec3& u, const Vec3& v, double parallel_tol = 1e-8);

inline Quat axis_angle_quat(const Vec3& axis_unit, double angle) {
    double h = 0.5 * angle;
    double s = std::sin(h);
    return {std::cos(h), s * axis_unit.x(), s * axis_unit.y(), s * axis_unit.z()};
}

inline Vec3 rotate(const Quat& q, const Vec3& v) { return quat_to_mat(q) * v; }

// Rotation part of the polar decomposition of h, reflection-corrected so the
// determinant is +1.
Mat3 polar_rotation(const Mat3& h);

// Round to float32 precision. The volatile store blocks a GCC 11 SLP bug
// that folds the narrowing cast pair away when two of these sit side by side.
inline double narrow_to_f32(double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double sqr(double x) { return x * x; }

}  // namespace frosting
