#pragma once

#include <string>

#include "frosting/metrics.hpp"
#include "frosting/render.hpp"
#include "frosting/rng.hpp"

namespace frosting {

// Gradient of the rendering loss with respect to one Gaussian's parameters.
// Shapes mirror FrostedGaussian; also reused as Adam moment storage.
struct GaussianGrad {
    std::array<double, 6> bary_logits{};
    Vec3 log_scales = Vec3::Zero();
    Vec4 rotation = Vec4::Zero();  // (w, x, y, z)
    double opacity_logit = 0.0;
    std::vector<double> sh;
};

// Full analytic backward pass: loss -> pixels -> compositing -> conic,
// projection, covariance, SH color, and barycentric softmax. Returns the loss
// and fills one gradient record per Gaussian (exact zeros for Gaussians that
// contributed to no pixel).
double loss_and_gradients(const FrostingScene& scene, const Camera& cam, const Image& gt,
                          std::vector<GaussianGrad>& grads);

struct OptimizerConfig {
    int iterations = 2000;
    double lr_logits = 2e-3;
    double lr_log_scales = 5e-3;
    double lr_rotation = 1e-3;
    double lr_opacity = 5e-2;
    double lr_sh = 2.5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int ema_window = 100;
    uint64_t seed = 0;
};

struct OptimizeStats {
    std::vector<double> losses;  // one per step
    double ema_first = 0.0;      // EMA after the first step
    double ema_last = 0.0;
};

// Adam moments plus the global step, resumable across runs.
struct OptimizerState {
    int64_t step = 0;
    std::vector<GaussianGrad> m, v;
};

// Adam with per-group learning rates, one camera per step cycling a seeded
// permutation each epoch. Gaussian count never changes. Throws NonFiniteLoss
// naming the offending parameter group. A non-null `state` with matching
// moment count resumes from it and receives the final moments back.
FrostingScene optimize(FrostingScene scene, const std::vector<Camera>& cameras,
                       const std::vector<Image>& images, const OptimizerConfig& cfg,
                       OptimizeStats* stats = nullptr, OptimizerState* state = nullptr);

struct GroupCheck {
    std::string group;
    int samples = 0;
    int failures = 0;
    double max_rel = 0.0;
    double median_rel = 0.0;
};

struct GradientCheckReport {
    std::vector<GroupCheck> groups;
    int total = 0;
    int passed = 0;
    double pass_fraction = 1.0;
};

// Central finite differences against the analytic gradients on randomly
// sampled parameters; a sample passes when |analytic - fd| <=
// tol * max(|analytic|, |fd|) + 1e-8. The rotation group gets rot_tol.
GradientCheckReport gradient_check(const FrostingScene& scene, const Camera& cam, const Image& gt,
                                   double eps, int samples_per_group, double tol, double rot_tol,
                                   uint64_t seed);

}  // namespace frosting
