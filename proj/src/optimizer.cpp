#include "frosting/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "frosting/parallel.hpp"

namespace frosting {

namespace {

// Screen-space gradient accumulators for one splat.
struct Grad2D {
    Vec2 mean2d = Vec2::Zero();
    double ca = 0.0, cb = 0.0, cc = 0.0;  // conic (0,0), (0,1)=(1,0), (1,1)
    double opacity = 0.0;                 // wrt post-sigmoid opacity
    Vec3 color = Vec3::Zero();

    void add(const Grad2D& o) {
        mean2d += o.mean2d;
        ca += o.ca;
        cb += o.cb;
        cc += o.cc;
        opacity += o.opacity;
        color += o.color;
    }
};

// Chains one splat's screen-space gradients down to its Gaussian's
// parameters. Recomputes the forward intermediates instead of storing them.
void finalize_splat(const FrostingScene& scene, const Camera& cam, const Splat& s,
                    const Grad2D& g2, GaussianGrad& out) {
    const FrostedGaussian& g = scene.gaussians[s.index];
    const PrismaticCell& cell = scene.layer.cells[g.cell];

    Vec3 p = frosted_position(g, scene.layer);
    Vec3 t = cam.to_camera(p);
    double tz = t.z(), tz2 = tz * tz, tz3 = tz2 * tz;

    Mat2 dconic;
    dconic << g2.ca, g2.cb, g2.cb, g2.cc;
    Mat2 dcov2d = -(s.conic * dconic * s.conic);

    Mat3 sigma = frosted_covariance(g);
    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / tz, 0.0, -cam.fx * t.x() / tz2,  //
        0.0, cam.fy / tz, -cam.fy * t.y() / tz2;
    Eigen::Matrix<double, 2, 3> a = jac * cam.rot;

    Mat3 dsigma = a.transpose() * dcov2d * a;
    Eigen::Matrix<double, 2, 3> da = (dcov2d + dcov2d.transpose()) * a * sigma;
    Eigen::Matrix<double, 2, 3> djac = da * cam.rot.transpose();

    Vec3 dt;
    dt.x() = djac(0, 2) * (-cam.fx / tz2) + g2.mean2d.x() * cam.fx / tz;
    dt.y() = djac(1, 2) * (-cam.fy / tz2) + g2.mean2d.y() * cam.fy / tz;
    dt.z() = djac(0, 0) * (-cam.fx / tz2) + djac(1, 1) * (-cam.fy / tz2) +
             djac(0, 2) * (2.0 * cam.fx * t.x() / tz3) +
             djac(1, 2) * (2.0 * cam.fy * t.y() / tz3) -
             g2.mean2d.x() * cam.fx * t.x() / tz2 - g2.mean2d.y() * cam.fy * t.y() / tz2;
    Vec3 dp = cam.rot.transpose() * dt;

    // Color: gradient through the zero clamp, the SH basis, the residual
    // rotation, and the view-direction normalization.
    Vec3 u = p - cam.position();
    double un = u.norm();
    Vec3 v = u / un;
    Mat3 rres = quat_to_mat(g.residual_rotation.normalized());
    Vec3 d = rres.transpose() * v;
    int coeffs = sh_coeff_count(scene.sh_degree);
    double vals[16];
    Vec3 basis_grad[16];
    sh_basis_grad(scene.sh_degree, d, vals, basis_grad);
    Vec3 dcol;
    for (int c = 0; c < 3; ++c) {
        double raw = 0.5;
        for (int k = 0; k < coeffs; ++k) raw += vals[k] * g.sh[k * 3 + c];
        dcol[c] = raw > 0.0 ? g2.color[c] : 0.0;
    }
    Vec3 dd = Vec3::Zero();
    for (int k = 0; k < coeffs; ++k) {
        double coeff_dot = 0.0;
        for (int c = 0; c < 3; ++c) {
            out.sh[k * 3 + c] += vals[k] * dcol[c];
            coeff_dot += g.sh[k * 3 + c] * dcol[c];
        }
        dd += coeff_dot * basis_grad[k];
    }
    Vec3 dv = rres * dd;
    dp += (dv - v * v.dot(dv)) / un;

    out.opacity_logit += g2.opacity * s.opacity * (1.0 - s.opacity);

    // Covariance to log-scales and quaternion via M = R * diag(exp(ls)).
    Vec3 sc = g.log_scales.array().exp();
    Quat qn = g.rotation.normalized();
    Mat3 r = quat_to_mat(qn);
    Mat3 m3 = r * sc.asDiagonal();
    Mat3 dm = (dsigma + dsigma.transpose()) * m3;
    Mat3 rt_dm = r.transpose() * dm;
    for (int i = 0; i < 3; ++i) out.log_scales[i] += rt_dm(i, i) * sc[i];

    Mat3 dr = dm * sc.asDiagonal();
    double qw = qn.w, qx = qn.x, qy = qn.y, qz = qn.z;
    Vec4 dqh;
    dqh[0] = 2.0 * (dr(0, 1) * -qz + dr(0, 2) * qy + dr(1, 0) * qz + dr(1, 2) * -qx +
                    dr(2, 0) * -qy + dr(2, 1) * qx);
    dqh[1] = 2.0 * (dr(0, 1) * qy + dr(0, 2) * qz + dr(1, 0) * qy + dr(1, 1) * -2.0 * qx +
                    dr(1, 2) * -qw + dr(2, 0) * qz + dr(2, 1) * qw + dr(2, 2) * -2.0 * qx);
    dqh[2] = 2.0 * (dr(0, 0) * -2.0 * qy + dr(0, 1) * qx + dr(0, 2) * qw + dr(1, 0) * qx +
                    dr(1, 2) * qz + dr(2, 0) * -qw + dr(2, 1) * qz + dr(2, 2) * -2.0 * qy);
    dqh[3] = 2.0 * (dr(0, 0) * -2.0 * qz + dr(0, 1) * -qw + dr(0, 2) * qx + dr(1, 0) * qw +
                    dr(1, 1) * -2.0 * qz + dr(1, 2) * qy + dr(2, 0) * qx + dr(2, 1) * qy);
    Vec4 qhat(qw, qx, qy, qz);
    out.rotation += (dqh - qhat * qhat.dot(dqh)) / g.rotation.norm();

    // Position to barycentric logits through the corner blend and softmax.
    std::array<double, 6> w = barycentrics(g);
    std::array<double, 6> dw;
    for (int j = 0; j < 6; ++j) dw[j] = cell.corners[j < 3 ? j + 3 : j - 3].dot(dp);
    double wdot = 0.0;
    for (int j = 0; j < 6; ++j) wdot += w[j] * dw[j];
    for (int j = 0; j < 6; ++j) out.bary_logits[j] += w[j] * (dw[j] - wdot);
}

}  // namespace

double loss_and_gradients(const FrostingScene& scene, const Camera& cam, const Image& gt,
                          std::vector<GaussianGrad>& grads) {
    ForwardPass fp = render_forward(scene, cam);
    if (gt.width != fp.width || gt.height != fp.height)
        fail(Err::SizeMismatch, "ground truth is " + std::to_string(gt.width) + "x" +
                                    std::to_string(gt.height) + ", camera renders " +
                                    std::to_string(fp.width) + "x" + std::to_string(fp.height));

    Image dimage;
    double loss = rendering_loss(fp.image, gt, &dimage);

    // Pixel gradients masked where the [0,1] clamp was active.
    const std::size_t npix = static_cast<std::size_t>(fp.width) * fp.height;
    std::vector<Vec3> dpix(npix);
    for (int y = 0; y < fp.height; ++y)
        for (int x = 0; x < fp.width; ++x) {
            std::size_t pix = static_cast<std::size_t>(y) * fp.width + x;
            for (int c = 0; c < 3; ++c) {
                double raw = fp.raw.at(x, y, c);
                dpix[pix][c] = (raw >= 0.0 && raw <= 1.0) ? dimage.at(x, y, c) : 0.0;
            }
        }

    // Reverse compositing walk per pixel, tile-private accumulators.
    std::vector<std::vector<Grad2D>> tile_grads(fp.tile_splats.size());
    parallel_for(fp.tile_splats.size(), [&](std::size_t tile) {
        const std::vector<uint32_t>& ids = fp.tile_splats[tile];
        std::vector<Grad2D>& local = tile_grads[tile];
        local.assign(ids.size(), Grad2D{});
        int tx = int(tile) % fp.tiles_x, ty = int(tile) / fp.tiles_x;
        int xe = std::min(fp.width, (tx + 1) * kTileSize);
        int ye = std::min(fp.height, (ty + 1) * kTileSize);
        for (int y = ty * kTileSize; y < ye; ++y) {
            for (int x = tx * kTileSize; x < xe; ++x) {
                std::size_t pix = static_cast<std::size_t>(y) * fp.width + x;
                uint32_t last = fp.last_contrib[pix];
                if (last == 0) continue;
                const Vec3& dl = dpix[pix];
                if (dl.isZero(0.0)) continue;
                double px = x + 0.5, py = y + 0.5;
                double trans = fp.final_t[pix];
                double bg_dot = scene.background.dot(dl);
                double last_alpha = 0.0;
                Vec3 last_color = Vec3::Zero();
                Vec3 accum = Vec3::Zero();
                for (uint32_t i = last; i-- > 0;) {
                    const Splat& s = fp.splats[ids[i]];
                    double dx = s.mean2d.x() - px, dy = s.mean2d.y() - py;
                    double power = -0.5 * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) -
                                   s.conic(0, 1) * dx * dy;
                    if (power > 0.0 || power < s.power_floor) continue;
                    double gexp = std::exp(power);
                    double a_raw = s.opacity * gexp;
                    double alpha = std::min(0.99, a_raw);
                    if (alpha < 1.0 / 255.0) continue;
                    trans /= 1.0 - alpha;  // transmittance in front of this splat

                    Grad2D& acc = local[i];
                    double dalpha = 0.0;
                    for (int c = 0; c < 3; ++c) {
                        accum[c] = last_alpha * last_color[c] + (1.0 - last_alpha) * accum[c];
                        dalpha += (s.color[c] - accum[c]) * trans * dl[c];
                        acc.color[c] += alpha * trans * dl[c];
                    }
                    last_alpha = alpha;
                    last_color = s.color;
                    dalpha -= fp.final_t[pix] / (1.0 - alpha) * bg_dot;

                    if (a_raw <= 0.99) {  // alpha clamp kills the gradient above
                        acc.opacity += gexp * dalpha;
                        double dpower = s.opacity * gexp * dalpha;
                        acc.mean2d.x() += dpower * (-s.conic(0, 0) * dx - s.conic(0, 1) * dy);
                        acc.mean2d.y() += dpower * (-s.conic(1, 1) * dy - s.conic(0, 1) * dx);
                        acc.ca += dpower * -0.5 * dx * dx;
                        acc.cb += dpower * -0.5 * dx * dy;  // per off-diagonal slot
                        acc.cc += dpower * -0.5 * dy * dy;
                    }
                }
            }
        }
    });

    // Fixed-order reduction keeps gradients deterministic under any thread
    // schedule.
    std::vector<Grad2D> splat_grads(fp.splats.size());
    for (std::size_t tile = 0; tile < fp.tile_splats.size(); ++tile)
        for (std::size_t i = 0; i < fp.tile_splats[tile].size(); ++i)
            splat_grads[fp.tile_splats[tile][i]].add(tile_grads[tile][i]);

    grads.assign(scene.gaussians.size(), GaussianGrad{});
    const std::size_t shsize = static_cast<std::size_t>(sh_coeff_count(scene.sh_degree)) * 3;
    for (GaussianGrad& gr : grads) gr.sh.assign(shsize, 0.0);
    parallel_for(fp.splats.size(), [&](std::size_t i) {
        finalize_splat(scene, cam, fp.splats[i], splat_grads[i], grads[fp.splats[i].index]);
    });
    return loss;
}

namespace {

const char* first_nonfinite_group(const FrostedGaussian& g) {
    for (double v : g.bary_logits)
        if (!std::isfinite(v)) return "bary_logits";
    if (!g.log_scales.allFinite()) return "log_scales";
    if (!std::isfinite(g.rotation.w) || !std::isfinite(g.rotation.x) ||
        !std::isfinite(g.rotation.y) || !std::isfinite(g.rotation.z))
        return "rotation";
    if (!std::isfinite(g.opacity_logit)) return "opacity";
    for (double v : g.sh)
        if (!std::isfinite(v)) return "sh";
    return nullptr;
}

struct AdamParam {
    double* value;
    double grad;
    double* m;
    double* v;
    double lr;
};

}  // namespace

FrostingScene optimize(FrostingScene scene, const std::vector<Camera>& cameras,
                       const std::vector<Image>& images, const OptimizerConfig& cfg,
                       OptimizeStats* stats, OptimizerState* state) {
    if (cameras.empty() || cameras.size() != images.size())
        fail(Err::SizeMismatch, std::to_string(cameras.size()) + " cameras vs " +
                                    std::to_string(images.size()) + " images");
    if (cfg.iterations < 0) fail(Err::NonPositiveInput, "negative iteration count");
    for (double lr : {cfg.lr_logits, cfg.lr_log_scales, cfg.lr_rotation, cfg.lr_opacity, cfg.lr_sh})
        if (lr < 0.0 || !std::isfinite(lr)) fail(Err::NonPositiveInput, "bad learning rate");
    scene.validate();

    const std::size_t ng = scene.gaussians.size();
    const std::size_t shsize = static_cast<std::size_t>(sh_coeff_count(scene.sh_degree)) * 3;
    std::vector<GaussianGrad> m(ng), v(ng);
    int64_t step0 = 0;
    if (state && !state->m.empty()) {
        if (state->m.size() != ng || state->v.size() != ng)
            fail(Err::SizeMismatch, "optimizer state covers " + std::to_string(state->m.size()) +
                                        " Gaussians, scene has " + std::to_string(ng));
        m = state->m;
        v = state->v;
        step0 = state->step;
    }
    for (std::size_t i = 0; i < ng; ++i) {
        if (m[i].sh.size() != shsize) m[i].sh.assign(shsize, 0.0);
        if (v[i].sh.size() != shsize) v[i].sh.assign(shsize, 0.0);
    }

    Rng perm_rng(cfg.seed);
    std::vector<std::size_t> order(cameras.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const double ema_alpha = 2.0 / (cfg.ema_window + 1.0);
    double ema = 0.0;
    if (stats) *stats = OptimizeStats{};
    std::vector<GaussianGrad> grads;
    for (int step = 0; step < cfg.iterations; ++step) {
        std::size_t slot = static_cast<std::size_t>(step) % cameras.size();
        if (slot == 0)
            for (std::size_t i = order.size(); i-- > 1;)
                std::swap(order[i], order[perm_rng.below(i + 1)]);
        std::size_t ci = order[slot];

        double loss = loss_and_gradients(scene, cameras[ci], images[ci], grads);
        if (!std::isfinite(loss)) {
            const char* group = nullptr;
            for (const FrostedGaussian& g : scene.gaussians)
                if ((group = first_nonfinite_group(g))) break;
            fail(Err::NonFiniteLoss, "step " + std::to_string(step) + ", parameter group " +
                                         (group ? group : "none (loss alone)"));
        }

        double t = double(step0 + step + 1);
        double bc1 = 1.0 - std::pow(cfg.beta1, t), bc2 = 1.0 - std::pow(cfg.beta2, t);
        auto adam = [&](double& value, double grad, double& mi, double& vi, double lr) {
            mi = cfg.beta1 * mi + (1.0 - cfg.beta1) * grad;
            vi = cfg.beta2 * vi + (1.0 - cfg.beta2) * grad * grad;
            value -= lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg.adam_eps);
        };
        for (std::size_t i = 0; i < ng; ++i) {
            FrostedGaussian& g = scene.gaussians[i];
            const GaussianGrad& gr = grads[i];
            for (int j = 0; j < 6; ++j)
                adam(g.bary_logits[j], gr.bary_logits[j], m[i].bary_logits[j], v[i].bary_logits[j],
                     cfg.lr_logits);
            for (int j = 0; j < 3; ++j)
                adam(g.log_scales[j], gr.log_scales[j], m[i].log_scales[j], v[i].log_scales[j],
                     cfg.lr_log_scales);
            double* q[4] = {&g.rotation.w, &g.rotation.x, &g.rotation.y, &g.rotation.z};
            for (int j = 0; j < 4; ++j)
                adam(*q[j], gr.rotation[j], m[i].rotation[j], v[i].rotation[j], cfg.lr_rotation);
            adam(g.opacity_logit, gr.opacity_logit, m[i].opacity_logit, v[i].opacity_logit,
                 cfg.lr_opacity);
            for (std::size_t j = 0; j < shsize; ++j)
                adam(g.sh[j], gr.sh[j], m[i].sh[j], v[i].sh[j], cfg.lr_sh);
        }
        for (const FrostedGaussian& g : scene.gaussians) {
            if (const char* group = first_nonfinite_group(g))
                fail(Err::NonFiniteLoss,
                     "step " + std::to_string(step) + ", parameter group " + group);
        }

        ema = step == 0 ? loss : ema_alpha * loss + (1.0 - ema_alpha) * ema;
        if (stats) {
            stats->losses.push_back(loss);
            if (step == 0) stats->ema_first = ema;
            stats->ema_last = ema;
        }
        if (step % 200 == 0 || step + 1 == cfg.iterations)
            std::cerr << "[optimize] step " << step << " loss " << loss << " ema " << ema << "\n";
    }
    if (state) {
        state->m = std::move(m);
        state->v = std::move(v);
        state->step = step0 + cfg.iterations;
    }
    return scene;
}

GradientCheckReport gradient_check(const FrostingScene& scene, const Camera& cam, const Image& gt,
                                   double eps, int samples_per_group, double tol, double rot_tol,
                                   uint64_t seed) {
    GradientCheckReport report;
    if (scene.gaussians.empty()) return report;
    std::vector<GaussianGrad> grads;
    loss_and_gradients(scene, cam, gt, grads);

    FrostingScene work = scene;
    auto loss_at = [&]() { return rendering_loss(render_forward(work, cam).image, gt); };

    Rng rng(seed);
    const int coeffs = sh_coeff_count(scene.sh_degree) * 3;

    struct Group {
        const char* name;
        int dim;
        double tolerance;
    };
    const Group groups[] = {{"bary_logits", 6, tol},
                            {"log_scales", 3, tol},
                            {"rotation", 4, rot_tol},
                            {"opacity", 1, tol},
                            {"sh", coeffs, tol}};

    for (const Group& group : groups) {
        GroupCheck gc;
        gc.group = group.name;
        std::vector<double> rels;
        for (int s = 0; s < samples_per_group; ++s) {
            std::size_t gi = rng.below(scene.gaussians.size());
            int ci = int(rng.below(static_cast<uint64_t>(group.dim)));
            FrostedGaussian& g = work.gaussians[gi];
            double* param = nullptr;
            double analytic = 0.0;
            if (group.name == std::string("bary_logits")) {
                param = &g.bary_logits[ci];
                analytic = grads[gi].bary_logits[ci];
            } else if (group.name == std::string("log_scales")) {
                param = &g.log_scales[ci];
                analytic = grads[gi].log_scales[ci];
            } else if (group.name == std::string("rotation")) {
                double* q[4] = {&g.rotation.w, &g.rotation.x, &g.rotation.y, &g.rotation.z};
                param = q[ci];
                analytic = grads[gi].rotation[ci];
            } else if (group.name == std::string("opacity")) {
                param = &g.opacity_logit;
                analytic = grads[gi].opacity_logit;
            } else {
                param = &g.sh[ci];
                analytic = grads[gi].sh[ci];
            }

            double saved = *param;
            double hi = saved + eps, lo = saved - eps;
            *param = hi;
            double fplus = loss_at();
            *param = lo;
            double fminus = loss_at();
            *param = saved;
            double fd = (fplus - fminus) / (hi - lo);

            double scale = std::max(std::abs(analytic), std::abs(fd));
            double rel = std::abs(analytic - fd) / std::max(scale, 1e-8);
            bool pass = std::abs(analytic - fd) <= group.tolerance * scale + 1e-8;
            rels.push_back(rel);
            gc.samples += 1;
            gc.max_rel = std::max(gc.max_rel, rel);
            if (!pass) gc.failures += 1;
            report.total += 1;
            if (pass) report.passed += 1;
        }
        if (!rels.empty()) {
            std::nth_element(rels.begin(), rels.begin() + rels.size() / 2, rels.end());
            gc.median_rel = rels[rels.size() / 2];
        }
        report.groups.push_back(gc);
    }
    report.pass_fraction = report.total ? double(report.passed) / report.total : 1.0;
    return report;
}

}  // namespace frosting
