#pragma once

#include "frosting/cells.hpp"
#include "frosting/sh.hpp"

namespace frosting {

// A Gaussian bound to one prismatic cell. Its position is a convex
// combination of the cell's six corners: softmax(bary_logits) yields weights
// (b0,b1,b2) for the outer corners and (b3,b4,b5) for the inner corners.
// residual_rotation accumulates deformation rotations and re-aims SH lookups.
struct FrostedGaussian {
    uint32_t cell = 0;
    std::array<double, 6> bary_logits{};
    Vec3 log_scales = Vec3::Zero();
    Quat rotation = Quat::identity();
    double opacity_logit = 0.0;
    Quat residual_rotation = Quat::identity();
    std::vector<double> sh;

    double opacity() const { return sigmoid(opacity_logit); }
};

std::array<double, 6> barycentrics(const FrostedGaussian& g);

// Position from Eq-style corner blending; throws BadCellIndex.
Vec3 frosted_position(const FrostedGaussian& g, const FrostingLayer& layer);

// Covariance from log_scales + rotation (same convention as free Gaussians).
Mat3 frosted_covariance(const FrostedGaussian& g);

// Local transform at one corner: the minimal rotation carrying the old
// (center - corner) direction to the new one, the unit new direction, and the
// length ratio. Throws DegenerateCellCenter when either vector collapses.
struct CornerTransform {
    Quat rotation = Quat::identity();
    Vec3 axis = Vec3::UnitX();
    double scale = 1.0;
};

CornerTransform vertex_local_transform(const PrismaticCell& before, const PrismaticCell& after,
                                       int corner);

// Re-expresses a Gaussian after its cell moved: the cell-level rotation is
// factored out (polar decomposition over the centered corners), per-corner
// radial rescalings and residual rotations are averaged with the Gaussian's
// barycentric weights, and the averaged axes are re-orthonormalized
// (descending pre-length order). Falls back to keeping the rotation and
// scaling by the mean corner factor when the averaged axes are rank-deficient.
FrostedGaussian transfer_deformation(const FrostedGaussian& g, const PrismaticCell& before,
                                     const PrismaticCell& after);

// Radiance with the residual rotation undone: SH evaluated at
// residual_rotation^{-1} * view_dir.
Vec3 adjusted_sh_eval(const FrostedGaussian& g, int sh_degree, const Vec3& view_dir);

}  // namespace frosting
