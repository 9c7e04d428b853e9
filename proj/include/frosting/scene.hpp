#pragma once

#include <cstdint>

#include "frosting/frosted.hpp"
#include "frosting/sampling.hpp"

namespace frosting {

// A complete editable layer scene: base mesh, shifted-bound cells, and the
// frosted Gaussians living inside them.
struct FrostingScene {
    TriMesh mesh;
    FrostingLayer layer;
    int sh_degree = 0;
    std::vector<FrostedGaussian> gaussians;
    Vec3 background = Vec3::Zero();
    ContractionParams contraction;
    uint64_t seed = 0;

    void validate() const;
};

struct BuildConfig {
    ThicknessConfig thickness;
    SamplingConfig sampling;
    int growth_steps = 10;
    Vec3 background = Vec3::Zero();
};

// Full pipeline: per-vertex shifts, intersection-aware growth, cells,
// center sampling, Gaussian initialization. Shifts are quantized to float32
// before cell construction so the in-memory scene matches its stored package.
FrostingScene build_scene(const GaussianCloud& unconstrained, const GaussianCloud& regularized,
                          const TriMesh& mesh, const BuildConfig& cfg);

// Rebinds the scene to repositioned vertices (same topology) and transfers
// every Gaussian between its old and new cell. Throws ShiftLengthMismatch
// when vertex or face counts differ.
FrostingScene deform_scene(const FrostingScene& scene, const TriMesh& deformed_mesh);

}  // namespace frosting
