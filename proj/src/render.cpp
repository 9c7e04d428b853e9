#include "frosting/render.hpp"

#include <algorithm>
#include <cmath>

#include "frosting/parallel.hpp"

namespace frosting {

std::optional<ProjectedGaussian> project_gaussian(const Vec3& mean, const Mat3& cov,
                                                  const Camera& cam) {
    Vec3 t = cam.to_camera(mean);
    if (t.z() <= cam.near) return std::nullopt;
    double tz = t.z(), tz2 = tz * tz;
    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / tz, 0.0, -cam.fx * t.x() / tz2,  //
        0.0, cam.fy / tz, -cam.fy * t.y() / tz2;
    Eigen::Matrix<double, 2, 3> a = jac * cam.rot;
    ProjectedGaussian out;
    out.cov2d = a * cov * a.transpose();
    out.cov2d(0, 0) += 0.3;
    out.cov2d(1, 1) += 0.3;
    out.mean2d = Vec2(cam.fx * t.x() / tz + cam.cx, cam.fy * t.y() / tz + cam.cy);
    out.depth = tz;
    return out;
}

namespace {

// Inclusive pixel range [x0, x1] whose centers a splat's radius rect can
// reach; empty (x0 > x1) when the rect misses the image.
void pixel_range(double center, double radius, int extent, int& lo, int& hi) {
    double a = std::floor(center - radius - 0.5);
    double b = std::ceil(center + radius - 0.5);
    lo = a < 0.0 ? 0 : (a > double(extent - 1) ? extent : int(a));
    hi = b < 0.0 ? -1 : (b > double(extent - 1) ? extent - 1 : int(b));
}

}  // namespace

std::vector<Splat> prepare_splats(const FrostingScene& scene, const Camera& cam,
                                  bool cull_to_image) {
    const Vec3 campos = cam.position();
    const std::size_t n = scene.gaussians.size();
    std::vector<Splat> all(n);
    std::vector<char> keep(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const FrostedGaussian& g = scene.gaussians[i];
        Vec3 p = frosted_position(g, scene.layer);
        auto proj = project_gaussian(p, frosted_covariance(g), cam);
        if (!proj) return;
        const Mat2& c2 = proj->cov2d;
        double mid = 0.5 * (c2(0, 0) + c2(1, 1));
        double disc = std::sqrt(std::max(0.0, sqr(0.5 * (c2(0, 0) - c2(1, 1))) + sqr(c2(0, 1))));
        double radius = kCullSigma * std::sqrt(mid + disc);
        if (!std::isfinite(radius) || !proj->mean2d.allFinite() || !std::isfinite(proj->depth))
            return;
        if (cull_to_image) {
            int x0, x1, y0, y1;
            pixel_range(proj->mean2d.x(), radius, cam.width, x0, x1);
            pixel_range(proj->mean2d.y(), radius, cam.height, y0, y1);
            if (x0 > x1 || y0 > y1) return;
        }
        Splat& s = all[i];
        s.index = static_cast<uint32_t>(i);
        s.mean2d = proj->mean2d;
        s.depth = proj->depth;
        double det = c2(0, 0) * c2(1, 1) - c2(0, 1) * c2(0, 1);
        s.conic << c2(1, 1) / det, -c2(0, 1) / det, -c2(0, 1) / det, c2(0, 0) / det;
        s.opacity = sigmoid(g.opacity_logit);
        s.color = adjusted_sh_eval(g, scene.sh_degree, p - campos);
        s.radius = radius;
        s.power_floor = -std::log(255.0 * s.opacity);
        if (!s.conic.allFinite() || !s.color.allFinite()) return;
        keep[i] = 1;
    });

    std::vector<Splat> splats;
    splats.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) splats.push_back(all[i]);
    std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
        return a.depth < b.depth || (a.depth == b.depth && a.index < b.index);
    });
    return splats;
}

ForwardPass render_forward(const FrostingScene& scene, const Camera& cam) {
    ForwardPass fp;
    fp.width = cam.width;
    fp.height = cam.height;
    fp.tiles_x = (cam.width + kTileSize - 1) / kTileSize;
    fp.tiles_y = (cam.height + kTileSize - 1) / kTileSize;
    fp.splats = prepare_splats(scene, cam, true);

    fp.tile_splats.assign(static_cast<std::size_t>(fp.tiles_x) * fp.tiles_y, {});
    for (uint32_t s = 0; s < fp.splats.size(); ++s) {
        int x0, x1, y0, y1;
        pixel_range(fp.splats[s].mean2d.x(), fp.splats[s].radius, fp.width, x0, x1);
        pixel_range(fp.splats[s].mean2d.y(), fp.splats[s].radius, fp.height, y0, y1);
        for (int ty = y0 / kTileSize; ty <= y1 / kTileSize; ++ty)
            for (int tx = x0 / kTileSize; tx <= x1 / kTileSize; ++tx)
                fp.tile_splats[static_cast<std::size_t>(ty) * fp.tiles_x + tx].push_back(s);
    }

    const std::size_t npix = static_cast<std::size_t>(fp.width) * fp.height;
    fp.final_t.assign(npix, 1.0);
    fp.accum_alpha.assign(npix, 0.0);
    fp.last_contrib.assign(npix, 0);
    fp.raw = Image(fp.width, fp.height);
    fp.image = Image(fp.width, fp.height);

    parallel_for(fp.tile_splats.size(), [&](std::size_t tile) {
        const std::vector<uint32_t>& ids = fp.tile_splats[tile];
        int tx = int(tile) % fp.tiles_x, ty = int(tile) / fp.tiles_x;
        int xe = std::min(fp.width, (tx + 1) * kTileSize);
        int ye = std::min(fp.height, (ty + 1) * kTileSize);
        for (int y = ty * kTileSize; y < ye; ++y) {
            for (int x = tx * kTileSize; x < xe; ++x) {
                double px = x + 0.5, py = y + 0.5;
                Vec3 color = Vec3::Zero();
                double trans = 1.0, accum = 0.0;
                uint32_t last = 0;
                for (uint32_t i = 0; i < ids.size(); ++i) {
                    const Splat& s = fp.splats[ids[i]];
                    double dx = s.mean2d.x() - px, dy = s.mean2d.y() - py;
                    double power = -0.5 * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) -
                                   s.conic(0, 1) * dx * dy;
                    if (power > 0.0 || power < s.power_floor) continue;
                    double alpha = std::min(0.99, s.opacity * std::exp(power));
                    if (alpha < 1.0 / 255.0) continue;
                    double next_t = trans * (1.0 - alpha);
                    if (next_t < 1e-4) break;
                    color += (trans * alpha) * s.color;
                    accum += trans * alpha;
                    trans = next_t;
                    last = i + 1;
                }
                std::size_t pix = static_cast<std::size_t>(y) * fp.width + x;
                fp.final_t[pix] = trans;
                fp.accum_alpha[pix] = accum;
                fp.last_contrib[pix] = last;
                for (int c = 0; c < 3; ++c) {
                    double v = color[c] + trans * scene.background[c];
                    fp.raw.at(x, y, c) = v;
                    fp.image.at(x, y, c) = std::clamp(v, 0.0, 1.0);
                }
            }
        }
    });
    return fp;
}

Image render(const FrostingScene& scene, const Camera& cam) {
    return render_forward(scene, cam).image;
}

Image render_with_stats(const FrostingScene& scene, const Camera& cam, RenderStats& stats) {
    ForwardPass fp = render_forward(scene, cam);
    stats.accum_alpha = std::move(fp.accum_alpha);
    stats.final_t = std::move(fp.final_t);
    return fp.image;
}

Image render_brute(const FrostingScene& scene, const Camera& cam) {
    std::vector<Splat> splats = prepare_splats(scene, cam, false);
    Image img(cam.width, cam.height);
    parallel_for(static_cast<std::size_t>(cam.height), [&](std::size_t y) {
        for (int x = 0; x < cam.width; ++x) {
            double px = x + 0.5, py = double(y) + 0.5;
            Vec3 color = Vec3::Zero();
            double trans = 1.0;
            for (const Splat& s : splats) {
                double dx = s.mean2d.x() - px, dy = s.mean2d.y() - py;
                double power = -0.5 * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) -
                               s.conic(0, 1) * dx * dy;
                if (power > 0.0 || power < s.power_floor) continue;
                double alpha = std::min(0.99, s.opacity * std::exp(power));
                if (alpha < 1.0 / 255.0) continue;
                double next_t = trans * (1.0 - alpha);
                if (next_t < 1e-4) break;
                color += (trans * alpha) * s.color;
                trans = next_t;
            }
            for (int c = 0; c < 3; ++c)
                img.at(x, int(y), c) = std::clamp(color[c] + trans * scene.background[c], 0.0, 1.0);
        }
    });
    return img;
}

}  // namespace frosting
