#pragma once

#include <array>

#include "frosting/math.hpp"

namespace frosting {

// Real spherical-harmonic basis in the splatting ecosystem's ordering and
// signs, degrees 0..3 (1, 4, 9, or 16 functions). `dir` must be unit length.
void sh_basis(int degree, const Vec3& dir, double* out);

// Basis values plus gradients with respect to the (unit) direction, treating
// the components as free coordinates; callers project through the
// normalization Jacobian themselves.
void sh_basis_grad(int degree, const Vec3& dir, double* val, Vec3* grad);

inline int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// RGB radiance for interleaved coefficients sh[k*3 + channel], DC first:
// 0.5 offset added, clamped at zero per channel.
Vec3 sh_to_rgb(int degree, const double* sh, const Vec3& unit_dir);

}  // namespace frosting
