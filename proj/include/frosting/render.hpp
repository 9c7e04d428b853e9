#pragma once

#include <optional>

#include "frosting/camera.hpp"
#include "frosting/image.hpp"
#include "frosting/scene.hpp"

namespace frosting {

constexpr int kTileSize = 16;

// Rect culling and tile binning use 3.5 standard deviations. A splat excluded
// from a pixel's tile then has alpha < 0.99 * exp(-3.5^2/2) < 1/255 at that
// pixel, so the per-contribution cutoff would drop it anyway and culling never
// changes a rendered value.
constexpr double kCullSigma = 3.5;

struct ProjectedGaussian {
    Vec2 mean2d = Vec2::Zero();  // pixels; pixel centers sit at (x+0.5, y+0.5)
    Mat2 cov2d = Mat2::Identity();  // includes the +0.3 px^2 diagonal dilation
    double depth = 0.0;             // camera-space z
};

// Perspective projection of a Gaussian: mean through the pinhole, covariance
// through the first-order Jacobian at the mean. Empty when depth <= near.
std::optional<ProjectedGaussian> project_gaussian(const Vec3& mean, const Mat3& cov,
                                                  const Camera& cam);

// One screen-space splat, ready to composite.
struct Splat {
    uint32_t index = 0;  // position in scene.gaussians
    Vec2 mean2d = Vec2::Zero();
    double depth = 0.0;
    Mat2 conic = Mat2::Identity();  // inverse of cov2d
    double opacity = 0.0;           // post-sigmoid
    Vec3 color = Vec3::Zero();      // SH evaluated toward the camera, >= 0
    double radius = 0.0;            // kCullSigma * sqrt(max eigenvalue of cov2d)
    double power_floor = 0.0;       // exponent below which alpha < 1/255 surely
};

// Projects every Gaussian, drops invalid or near-culled ones, and sorts by
// (depth, index). With cull_to_image, splats whose kCullSigma rect misses all
// pixel centers are dropped as well; such splats never pass the 1/255 cutoff,
// so culled and unculled sets composite identically.
std::vector<Splat> prepare_splats(const FrostingScene& scene, const Camera& cam,
                                  bool cull_to_image);

// Forward render with everything the backward pass replays: the sorted splat
// list, per-tile index lists (into that list), and per pixel the final
// transmittance plus the 1-based tile-list position of the last composited
// splat.
struct ForwardPass {
    int width = 0, height = 0;
    int tiles_x = 0, tiles_y = 0;
    std::vector<Splat> splats;
    std::vector<std::vector<uint32_t>> tile_splats;
    std::vector<double> final_t;
    std::vector<double> accum_alpha;
    std::vector<uint32_t> last_contrib;
    Image raw;    // pre-clamp composite
    Image image;  // clamped to [0, 1]
};

ForwardPass render_forward(const FrostingScene& scene, const Camera& cam);

// Tile rasterizer: front-to-back compositing in depth order, per-contribution
// alpha = min(0.99, opacity * exp(power)), skipping alpha < 1/255 and stopping
// a pixel before its transmittance would drop below 1e-4; remaining
// transmittance goes to the background.
Image render(const FrostingScene& scene, const Camera& cam);

// Per-pixel transmittance bookkeeping of the same render.
struct RenderStats {
    std::vector<double> accum_alpha;  // sum of composited T*alpha per pixel
    std::vector<double> final_t;
};
Image render_with_stats(const FrostingScene& scene, const Camera& cam, RenderStats& stats);

// Oracle: every projectable splat evaluated at every pixel, no image culling
// and no tiling, same compositing semantics. Must match render exactly.
Image render_brute(const FrostingScene& scene, const Camera& cam);

}  // namespace frosting
