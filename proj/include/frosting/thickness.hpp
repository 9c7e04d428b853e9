#pragma once

#include <optional>
#include <utility>

#include "frosting/density.hpp"
#include "frosting/mesh.hpp"

namespace frosting {

struct ThicknessConfig {
    double lambda = 0.01;   // isosurface level
    double k = 3.0;         // widening factor from the regularized band to J
    int samples_per_interval = 64;
    int bisect_iters = 20;
    double fallback_shift = 0.05;
};

// Everything learned about one vertex's layer bounds along its normal.
// Offsets are signed distances along the vertex normal.
struct VertexShiftRecord {
    uint32_t vertex = 0;
    double sigma = 0.0;          // normal-aligned stddev of the closest regularized Gaussian
    double i_lo = 0.0, i_hi = 0.0;  // search interval I = [-3 sigma, 3 sigma]
    double eps_in = 0.0, eps_out = 0.0;
    double j_lo = 0.0, j_hi = 0.0;  // widened interval J
    double delta_in = 0.0, delta_out = 0.0;
    bool eps_fallback = false;  // regularized band was empty
    bool delta_fallback = false;  // unconstrained band was empty
};

// sqrt(n^T Sigma n) for the Gaussian whose mean is Euclidean-closest to v.
// `tree` must index the cloud's means. Throws TooFewGaussians on empty clouds.
double normal_std(const GaussianCloud& cloud, const KdTree& tree, const Vec3& v, const Vec3& n);

// Endpoints (inf, sup) of { t in [lo, hi] : density(v + t n) >= lambda },
// located by uniform sampling then bisection of the bracketing sub-intervals.
// nullopt when no sample reaches lambda. Returned endpoints satisfy
// density >= lambda exactly (each bisection keeps its satisfied side).
std::optional<std::pair<double, double>> isosurface_interval(
    const DensityIndex& density, const Vec3& v, const Vec3& n, double lo, double hi,
    double lambda, int samples, int bisect_iters);

// Full per-vertex chain: sigma -> I -> regularized band -> J -> unconstrained
// band. `mean_edge_len` feeds the empty-band fallback (0 falls back to sigma).
VertexShiftRecord compute_vertex_shift(const DensityIndex& unconstrained,
                                       const GaussianCloud& regularized_cloud,
                                       const DensityIndex& regularized,
                                       const KdTree& regularized_means, uint32_t vertex,
                                       const Vec3& v, const Vec3& n, double mean_edge_len,
                                       const ThicknessConfig& cfg);

std::vector<VertexShiftRecord> compute_shifts(const GaussianCloud& unconstrained,
                                              const GaussianCloud& regularized,
                                              const TriMesh& mesh, const ThicknessConfig& cfg);

// Moves shifts from zero toward their targets over `steps` uniform
// increments, freezing a vertex side the first time its bound point lands
// strictly inside a non-incident cell (the side rolls back to its last safe
// value). A bounded cleanup fixpoint afterwards guarantees the final
// configuration has no bound vertex strictly inside a foreign cell.
// Throws ShiftLengthMismatch when records do not cover the mesh.
std::vector<VertexShiftRecord> grow_shifts(const TriMesh& mesh,
                                           const std::vector<VertexShiftRecord>& targets,
                                           int steps = 10);

}  // namespace frosting
