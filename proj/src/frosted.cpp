#include "frosting/frosted.hpp"

#include <algorithm>
#include <cmath>

namespace frosting {

std::array<double, 6> barycentrics(const FrostedGaussian& g) {
    double mx = *std::max_element(g.bary_logits.begin(), g.bary_logits.end());
    std::array<double, 6> w;
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        w[i] = std::exp(g.bary_logits[i] - mx);
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

namespace {

// Weight of corner k (0..2 inner, 3..5 outer) under the logit convention
// (first three logits belong to the outer corners).
inline double corner_weight(const std::array<double, 6>& w, int corner) {
    return corner < 3 ? w[3 + corner] : w[corner - 3];
}

}  // namespace

Vec3 frosted_position(const FrostedGaussian& g, const FrostingLayer& layer) {
    if (g.cell >= layer.cells.size())
        fail(Err::BadCellIndex,
             "cell " + std::to_string(g.cell) + " of " + std::to_string(layer.cells.size()));
    const PrismaticCell& cell = layer.cells[g.cell];
    std::array<double, 6> w = barycentrics(g);
    Vec3 p = Vec3::Zero();
    for (int k = 0; k < 6; ++k) p += corner_weight(w, k) * cell.corners[k];
    return p;
}

Mat3 frosted_covariance(const FrostedGaussian& g) {
    double n = g.rotation.norm();
    if (n <= 1e-12)
        fail(Err::ZeroQuaternion, "quaternion norm " + std::to_string(n) + " is at or below 1e-12");
    Mat3 r = quat_to_mat(g.rotation.normalized());
    Vec3 s = g.log_scales.array().exp();
    Mat3 m = r * s.asDiagonal();
    return m * m.transpose();
}

namespace {

Vec3 cell_center(const PrismaticCell& cell) {
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : cell.corners) c += p;
    return c / 6.0;
}

}  // namespace

CornerTransform vertex_local_transform(const PrismaticCell& before, const PrismaticCell& after,
                                       int corner) {
    Vec3 u = cell_center(before) - before.corners[corner];
    Vec3 u2 = cell_center(after) - after.corners[corner];
    double nu = u.norm(), nu2 = u2.norm();
    if (nu <= 1e-12 || nu2 <= 1e-12)
        fail(Err::DegenerateCellCenter, "corner " + std::to_string(corner) +
                                            " coincides with the cell center (|u|=" +
                                            std::to_string(nu) + ", |u'|=" + std::to_string(nu2) +
                                            ")");
    CornerTransform t;
    t.rotation = minimal_rotation(u, u2);
    t.axis = u2 / nu2;
    t.scale = nu2 / nu;
    return t;
}

FrostedGaussian transfer_deformation(const FrostedGaussian& g, const PrismaticCell& before,
                                     const PrismaticCell& after) {
    Vec3 cb = cell_center(before), ca = cell_center(after);

    // Cell-level rotation via the polar factor of the corner cross-covariance.
    Mat3 h = Mat3::Zero();
    for (int k = 0; k < 6; ++k)
        h += (after.corners[k] - ca) * (before.corners[k] - cb).transpose();
    Mat3 r_hat = polar_rotation(h);

    // De-rotated copy of the deformed cell; the per-corner transforms only
    // see the non-rigid residue.
    PrismaticCell residue = after;
    for (int k = 0; k < 6; ++k) residue.corners[k] = r_hat.transpose() * (after.corners[k] - ca) + cb;

    std::array<double, 6> w = barycentrics(g);
    Mat3 m = Mat3::Zero();
    double mean_scale = 0.0;
    for (int k = 0; k < 6; ++k) {
        CornerTransform t = vertex_local_transform(before, residue, k);
        double wk = corner_weight(w, k);
        m += wk * t.scale * quat_to_mat(t.rotation);
        mean_scale += wk * t.scale;
    }

    Mat3 r_old = quat_to_mat(g.rotation.normalized());
    Vec3 s_old = g.log_scales.array().exp();
    Mat3 axes = r_hat * m * (r_old * s_old.asDiagonal());

    FrostedGaussian out = g;

    Vec3 lens(axes.col(0).norm(), axes.col(1).norm(), axes.col(2).norm());
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int a, int b) {
        return lens[a] > lens[b] || (lens[a] == lens[b] && a < b);
    });

    // Gram-Schmidt in descending pre-length order; directions return to their
    // original axis slots so the rotation keeps its column meaning.
    Mat3 dirs = Mat3::Zero();
    Vec3 basis[3];
    bool degenerate = lens.minCoeff() <= 1e-12;
    for (int j = 0; j < 3 && !degenerate; ++j) {
        Vec3 v = axes.col(order[j]);
        for (int b = 0; b < j; ++b) v -= v.dot(basis[b]) * basis[b];
        double n = v.norm();
        if (n <= 1e-12 * lens[order[j]]) {
            degenerate = true;
            break;
        }
        basis[j] = v / n;
        dirs.col(order[j]) = basis[j];
    }

    if (degenerate) {
        // Averaged axes collapsed; keep the orientation, scale isotropically.
        double k = std::max(mean_scale, 1e-12);
        out.log_scales = g.log_scales.array() + std::log(k);
        return out;
    }

    if (dirs.determinant() < 0) dirs.col(order[2]) = -dirs.col(order[2]);

    out.log_scales = lens.array().max(1e-300).log();
    out.rotation = mat_to_quat(dirs);

    Mat3 net = dirs * r_old.transpose();  // orthogonal: both factors are
    out.residual_rotation =
        (mat_to_quat(net) * g.residual_rotation.normalized()).normalized();
    return out;
}

Vec3 adjusted_sh_eval(const FrostedGaussian& g, int sh_degree, const Vec3& view_dir) {
    Vec3 dir = view_dir.normalized();
    Quat res = g.residual_rotation.normalized();
    Vec3 local = quat_to_mat(res).transpose() * dir;
    return sh_to_rgb(sh_degree, g.sh.data(), local);
}

}  // namespace frosting
