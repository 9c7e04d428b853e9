#pragma once

// Shared synthetic fixtures for the test suite. Everything is seeded and
// deterministic so failures replay exactly.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "frosting/cells.hpp"
#include "frosting/camera.hpp"
#include "frosting/frosted.hpp"
#include "frosting/gaussian.hpp"
#include "frosting/image.hpp"
#include "frosting/mesh.hpp"
#include "frosting/rng.hpp"
#include "frosting/sampling.hpp"
#include "frosting/scene.hpp"

namespace testutil {

using namespace frosting;

inline Camera look_at(const Vec3& eye, const Vec3& target, int w, int h, double focal = 0.0) {
    Camera cam;
    cam.width = w;
    cam.height = h;
    cam.fx = cam.fy = focal > 0.0 ? focal : 1.2 * std::min(w, h);
    cam.cx = 0.5 * w;
    cam.cy = 0.5 * h;
    Vec3 z = (target - eye).normalized();
    Vec3 up = std::abs(z.y()) > 0.95 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    Vec3 x = up.cross(z).normalized();
    Vec3 y = z.cross(x);
    cam.rot.row(0) = x;
    cam.rot.row(1) = y;
    cam.rot.row(2) = z;
    cam.trans = -(cam.rot * eye);
    return cam;
}

inline Quat random_unit_quat(Rng& rng) {
    Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return q.normalized();
}

// Disjoint triangles on a grid in the z = 0 plane, each extruded along +z
// into a straight prism. Straight prisms are convex and their tetrahedron
// decomposition covers the full hull, so convex-combination positions always
// pass point_in_cell.
struct LayerFixture {
    TriMesh mesh;
    FrostingLayer layer;
    double span = 0.0;  // overall xy extent
};

inline LayerFixture disjoint_prisms(int nfaces, Rng& rng, double span = 2.0) {
    int g = 1;
    while (g * g < nfaces) ++g;
    double s = span / g;
    std::vector<Vec3> verts;
    std::vector<std::array<uint32_t, 3>> faces;
    std::vector<double> din, dout;
    for (int f = 0; f < nfaces; ++f) {
        double cx = (f % g + 0.5) * s - 0.5 * span;
        double cy = (f / g + 0.5) * s - 0.5 * span;
        double r = rng.uniform(0.25, 0.4) * s;
        double phase = rng.uniform(0.0, 2.0 * M_PI);
        uint32_t base = static_cast<uint32_t>(verts.size());
        for (int j = 0; j < 3; ++j) {
            double a = phase + j * 2.0 * M_PI / 3.0;
            verts.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a), 0.0);
            din.push_back(-rng.uniform(0.08, 0.25) * s);
            dout.push_back(rng.uniform(0.08, 0.25) * s);
        }
        faces.push_back({base, base + 1, base + 2});
    }
    LayerFixture fix;
    fix.mesh = TriMesh(std::move(verts), std::move(faces));
    fix.layer.delta_in = din;
    fix.layer.delta_out = dout;
    for (uint32_t f = 0; f < fix.mesh.face_count(); ++f)
        fix.layer.cells.push_back(make_cell(fix.mesh, f, din, dout));
    fix.span = span;
    return fix;
}

inline FrostedGaussian random_frosted(Rng& rng, std::size_t ncells, int degree, double base_scale) {
    FrostedGaussian g;
    g.cell = static_cast<uint32_t>(rng.below(ncells));
    for (double& l : g.bary_logits) l = rng.normal();
    for (int a = 0; a < 3; ++a)
        g.log_scales[a] = std::log(base_scale) + 0.6 * rng.normal();
    g.rotation = random_unit_quat(rng);
    g.opacity_logit = rng.uniform(-2.5, 2.5);
    g.sh.resize(static_cast<std::size_t>(sh_coeff_count(degree)) * 3);
    for (std::size_t k = 0; k < g.sh.size(); ++k)
        g.sh[k] = k < 3 ? rng.uniform(-1.0, 2.0) : rng.uniform(-0.3, 0.3);
    return g;
}

// A full scene over disjoint prisms with directly constructed Gaussians.
// with_residuals adds random residual rotations to a third of them.
inline FrostingScene random_scene(Rng& rng, int ngauss, int degree, int ncells = 8,
                                  bool with_residuals = false) {
    LayerFixture fix = disjoint_prisms(ncells, rng);
    FrostingScene scene;
    scene.mesh = std::move(fix.mesh);
    scene.layer = std::move(fix.layer);
    scene.sh_degree = degree;
    scene.contraction = contraction_from_mesh(scene.mesh);
    scene.background = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    scene.seed = rng.next_u64();
    double s = fix.span / std::max(1, static_cast<int>(std::sqrt(double(ncells))));
    for (int i = 0; i < ngauss; ++i) {
        FrostedGaussian g = random_frosted(rng, scene.layer.cells.size(), degree, 0.12 * s);
        if (with_residuals && i % 3 == 0) g.residual_rotation = random_unit_quat(rng);
        scene.gaussians.push_back(std::move(g));
    }
    return scene;
}

inline Camera scene_camera(const FrostingScene& scene, Rng& rng, int w, int h) {
    Vec3 lo, hi;
    scene.mesh.bounding_box(lo, hi);
    Vec3 center = 0.5 * (lo + hi);
    double span = std::max((hi - lo).norm(), 1e-3);
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double phi = rng.uniform(0.35, M_PI - 0.35);  // keep off the poles, cover both sides
    double d = rng.uniform(1.3, 2.0) * span;
    Vec3 eye = center + d * Vec3(std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi),
                                 std::cos(phi));
    return look_at(eye, center, w, h);
}

inline GaussianCloud random_cloud(Rng& rng, int n, int degree, double span = 1.0,
                                  CloudRole role = CloudRole::Unconstrained) {
    GaussianCloud cloud;
    cloud.sh_degree = degree;
    cloud.role = role;
    for (int i = 0; i < n; ++i) {
        Gaussian3D g;
        g.mean = Vec3(rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-span, span));
        for (int a = 0; a < 3; ++a) g.log_scales[a] = std::log(0.05 * span) + 0.5 * rng.normal();
        g.rotation = random_unit_quat(rng);
        g.opacity_logit = rng.uniform(-2.0, 3.0);
        g.sh.resize(static_cast<std::size_t>(sh_coeff_count(degree)) * 3);
        for (double& v : g.sh) v = rng.uniform(-0.5, 0.5);
        cloud.gaussians.push_back(std::move(g));
    }
    return cloud;
}

inline double f32(double v) { return narrow_to_f32(v); }

// Pushes every float32-stored quantity through float32 so a store/load
// round trip must reproduce the scene bit for bit.
inline void quantize_scene(FrostingScene& scene) {
    for (double& v : scene.layer.delta_in) v = f32(v);
    for (double& v : scene.layer.delta_out) v = f32(v);
    scene.layer.cells.clear();
    for (uint32_t f = 0; f < scene.mesh.face_count(); ++f)
        scene.layer.cells.push_back(
            make_cell(scene.mesh, f, scene.layer.delta_in, scene.layer.delta_out));
    for (FrostedGaussian& g : scene.gaussians) {
        for (double& l : g.bary_logits) l = f32(l);
        for (int a = 0; a < 3; ++a) g.log_scales[a] = f32(g.log_scales[a]);
        g.rotation = {f32(g.rotation.w), f32(g.rotation.x), f32(g.rotation.y), f32(g.rotation.z)};
        g.opacity_logit = f32(g.opacity_logit);
        g.residual_rotation = {f32(g.residual_rotation.w), f32(g.residual_rotation.x),
                               f32(g.residual_rotation.y), f32(g.residual_rotation.z)};
        for (double& v : g.sh) v = f32(v);
    }
}

inline void quantize_cloud(GaussianCloud& cloud) {
    for (Gaussian3D& g : cloud.gaussians) {
        for (int a = 0; a < 3; ++a) {
            g.mean[a] = f32(g.mean[a]);
            g.log_scales[a] = f32(g.log_scales[a]);
        }
        g.rotation = {f32(g.rotation.w), f32(g.rotation.x), f32(g.rotation.y), f32(g.rotation.z)};
        g.opacity_logit = f32(g.opacity_logit);
        for (double& v : g.sh) v = f32(v);
    }
}

inline bool quat_equal(const Quat& a, const Quat& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
}

inline bool frosted_equal(const FrostedGaussian& a, const FrostedGaussian& b) {
    return a.cell == b.cell && a.bary_logits == b.bary_logits && a.log_scales == b.log_scales &&
           quat_equal(a.rotation, b.rotation) && a.opacity_logit == b.opacity_logit &&
           quat_equal(a.residual_rotation, b.residual_rotation) && a.sh == b.sh;
}

inline bool scene_equal(const FrostingScene& a, const FrostingScene& b) {
    if (a.mesh.vertices.size() != b.mesh.vertices.size() || a.mesh.faces != b.mesh.faces)
        return false;
    for (std::size_t i = 0; i < a.mesh.vertices.size(); ++i)
        if (a.mesh.vertices[i] != b.mesh.vertices[i]) return false;
    if (a.layer.delta_in != b.layer.delta_in || a.layer.delta_out != b.layer.delta_out)
        return false;
    if (a.sh_degree != b.sh_degree || a.seed != b.seed) return false;
    if (a.background != b.background) return false;
    if (a.contraction.center != b.contraction.center || a.contraction.radius != b.contraction.radius)
        return false;
    if (a.gaussians.size() != b.gaussians.size()) return false;
    for (std::size_t i = 0; i < a.gaussians.size(); ++i)
        if (!frosted_equal(a.gaussians[i], b.gaussians[i])) return false;
    return true;
}

inline double sqr_chi(double observed, double expected) {
    double d = observed - expected;
    return d * d / expected;
}

inline double max_image_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("frosting_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
