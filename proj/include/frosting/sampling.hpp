#pragma once

#include <optional>

#include "frosting/frosted.hpp"
#include "frosting/rng.hpp"

namespace frosting {

struct SamplingConfig {
    std::size_t budget = 100000;
    double uniform_fraction = 0.5;  // leading fraction drawn uniformly over cells
    uint64_t seed = 0;
    std::optional<ContractionParams> contraction;  // weights volume draws when present
    double opacity_init = 0.1;
};

// Flat Dirichlet draw over the 6-point simplex (coordinates sum to 1).
std::array<double, 6> sample_simplex6(Rng& rng);

struct SampledCenter {
    uint32_t cell = 0;
    std::array<double, 6> coords{};
};

// ceil(uniform_fraction * budget) draws choose a cell uniformly; the rest
// choose proportionally to (contracted) cell volume. Throws EmptyLayer when
// there are no cells, or when the volume-weighted half finds no volume.
std::vector<SampledCenter> sample_centers(const FrostingLayer& layer, const SamplingConfig& cfg);

// Turns sampled centers into frosted Gaussians: logits log(coord + 1e-8),
// SH copied from the Euclidean-nearest unconstrained Gaussian, opacity reset,
// isotropic scales from the mean distance to the 3 nearest sampled neighbors,
// identity rotations.
std::vector<FrostedGaussian> initialize_gaussians(const std::vector<SampledCenter>& centers,
                                                  const FrostingLayer& layer,
                                                  const GaussianCloud& unconstrained,
                                                  const SamplingConfig& cfg);

}  // namespace frosting
