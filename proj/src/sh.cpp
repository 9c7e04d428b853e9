#include "frosting/sh.hpp"

namespace frosting {

namespace {

constexpr double C0 = 0.28209479177387814;
constexpr double C1 = 0.4886025119029199;
constexpr double C2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double C3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                          0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

}  // namespace

void sh_basis(int degree, const Vec3& dir, double* out) {
    double x = dir.x(), y = dir.y(), z = dir.z();
    out[0] = C0;
    if (degree < 1) return;
    out[1] = -C1 * y;
    out[2] = C1 * z;
    out[3] = -C1 * x;
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    out[4] = C2[0] * x * y;
    out[5] = C2[1] * y * z;
    out[6] = C2[2] * (2 * zz - xx - yy);
    out[7] = C2[3] * x * z;
    out[8] = C2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = C3[0] * y * (3 * xx - yy);
    out[10] = C3[1] * x * y * z;
    out[11] = C3[2] * y * (4 * zz - xx - yy);
    out[12] = C3[3] * z * (2 * zz - 3 * xx - 3 * yy);
    out[13] = C3[4] * x * (4 * zz - xx - yy);
    out[14] = C3[5] * z * (xx - yy);
    out[15] = C3[6] * x * (xx - 3 * yy);
}

void sh_basis_grad(int degree, const Vec3& dir, double* val, Vec3* grad) {
    sh_basis(degree, dir, val);
    double x = dir.x(), y = dir.y(), z = dir.z();
    grad[0] = Vec3::Zero();
    if (degree < 1) return;
    grad[1] = {0, -C1, 0};
    grad[2] = {0, 0, C1};
    grad[3] = {-C1, 0, 0};
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    grad[4] = C2[0] * Vec3{y, x, 0};
    grad[5] = C2[1] * Vec3{0, z, y};
    grad[6] = C2[2] * Vec3{-2 * x, -2 * y, 4 * z};
    grad[7] = C2[3] * Vec3{z, 0, x};
    grad[8] = C2[4] * Vec3{2 * x, -2 * y, 0};
    if (degree < 3) return;
    grad[9] = C3[0] * Vec3{6 * x * y, 3 * xx - 3 * yy, 0};
    grad[10] = C3[1] * Vec3{y * z, x * z, x * y};
    grad[11] = C3[2] * Vec3{-2 * x * y, 4 * zz - xx - 3 * yy, 8 * y * z};
    grad[12] = C3[3] * Vec3{-6 * x * z, -6 * y * z, 6 * zz - 3 * xx - 3 * yy};
    grad[13] = C3[4] * Vec3{4 * zz - 3 * xx - yy, -2 * x * y, 8 * x * z};
    grad[14] = C3[5] * Vec3{2 * x * z, -2 * y * z, xx - yy};
    grad[15] = C3[6] * Vec3{3 * xx - 3 * yy, -6 * x * y, 0};
}

Vec3 sh_to_rgb(int degree, const double* sh, const Vec3& unit_dir) {
    double basis[16];
    sh_basis(degree, unit_dir, basis);
    int k = sh_coeff_count(degree);
    Vec3 rgb = Vec3::Zero();
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < 3; ++c) rgb[c] += basis[i] * sh[i * 3 + c];
    rgb.array() += 0.5;
    return rgb.cwiseMax(0.0);
}

}  // namespace frosting
