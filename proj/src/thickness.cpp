#include "frosting/thickness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "frosting/cells.hpp"
#include "frosting/parallel.hpp"

namespace frosting {

double normal_std(const GaussianCloud& cloud, const KdTree& tree, const Vec3& v, const Vec3& n) {
    if (cloud.size() == 0) fail(Err::TooFewGaussians, "cloud is empty");
    auto [idx, d2] = tree.nearest(v);
    (void)d2;
    Mat3 cov = covariance(cloud.gaussians[idx]);
    return std::sqrt(n.dot(cov * n));
}

std::optional<std::pair<double, double>> isosurface_interval(const DensityIndex& density,
                                                             const Vec3& v, const Vec3& n,
                                                             double lo, double hi, double lambda,
                                                             int samples, int bisect_iters) {
    if (samples < 2 || hi < lo) return std::nullopt;
    auto d = [&](double t) { return density.density_at(v + t * n); };

    std::vector<double> ts(samples), vals(samples);
    for (int i = 0; i < samples; ++i) {
        ts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        vals[i] = d(ts[i]);
    }
    int first = -1, last = -1;
    for (int i = 0; i < samples; ++i) {
        if (vals[i] >= lambda) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return std::nullopt;

    double t_min = ts[first];
    if (first > 0) {
        // d(a) < lambda <= d(b); shrink toward the crossing keeping b satisfied.
        double a = ts[first - 1], b = ts[first];
        for (int i = 0; i < bisect_iters; ++i) {
            double m = 0.5 * (a + b);
            (d(m) >= lambda ? b : a) = m;
        }
        t_min = b;
    }
    double t_max = ts[last];
    if (last < samples - 1) {
        double a = ts[last], b = ts[last + 1];  // d(a) >= lambda > d(b)
        for (int i = 0; i < bisect_iters; ++i) {
            double m = 0.5 * (a + b);
            (d(m) >= lambda ? a : b) = m;
        }
        t_max = a;
    }
    return std::make_pair(t_min, t_max);
}

VertexShiftRecord compute_vertex_shift(const DensityIndex& unconstrained,
                                       const GaussianCloud& regularized_cloud,
                                       const DensityIndex& regularized,
                                       const KdTree& regularized_means, uint32_t vertex,
                                       const Vec3& v, const Vec3& n, double mean_edge_len,
                                       const ThicknessConfig& cfg) {
    VertexShiftRecord rec;
    rec.vertex = vertex;
    rec.sigma = normal_std(regularized_cloud, regularized_means, v, n);
    rec.i_lo = -3.0 * rec.sigma;
    rec.i_hi = 3.0 * rec.sigma;

    auto band = isosurface_interval(regularized, v, n, rec.i_lo, rec.i_hi, cfg.lambda,
                                    cfg.samples_per_interval, cfg.bisect_iters);
    if (band) {
        rec.eps_in = band->first;
        rec.eps_out = band->second;
        double mid = 0.5 * (rec.eps_in + rec.eps_out);
        double half = 0.5 * (rec.eps_out - rec.eps_in);
        rec.j_lo = mid - cfg.k * half;
        rec.j_hi = mid + cfg.k * half;
    } else {
        rec.eps_fallback = true;
        rec.eps_in = rec.eps_out = 0.0;
        rec.j_lo = -cfg.k * cfg.fallback_shift * rec.sigma;
        rec.j_hi = cfg.k * cfg.fallback_shift * rec.sigma;
    }

    auto thick = isosurface_interval(unconstrained, v, n, rec.j_lo, rec.j_hi, cfg.lambda,
                                     cfg.samples_per_interval, cfg.bisect_iters);
    if (thick) {
        rec.delta_in = thick->first;
        rec.delta_out = thick->second;
    } else {
        rec.delta_fallback = true;
        double scale = mean_edge_len > 0 ? mean_edge_len : rec.sigma;
        rec.delta_in = -cfg.fallback_shift * scale;
        rec.delta_out = cfg.fallback_shift * scale;
        // Keep the stored J invariant (deltas inside J) even for fallbacks.
        rec.j_lo = std::min(rec.j_lo, rec.delta_in);
        rec.j_hi = std::max(rec.j_hi, rec.delta_out);
    }
    return rec;
}

std::vector<VertexShiftRecord> compute_shifts(const GaussianCloud& unconstrained,
                                              const GaussianCloud& regularized,
                                              const TriMesh& mesh, const ThicknessConfig& cfg) {
    if (regularized.size() == 0 || unconstrained.size() == 0)
        fail(Err::TooFewGaussians, "both clouds must be nonempty");

    DensityIndex du(unconstrained), dr(regularized);
    std::vector<Vec3> reg_means(regularized.size());
    for (std::size_t i = 0; i < regularized.size(); ++i)
        reg_means[i] = regularized.gaussians[i].mean;
    KdTree reg_tree(std::move(reg_means));
    std::vector<double> edge_len = mesh.mean_incident_edge_lengths();

    std::vector<VertexShiftRecord> records(mesh.vertex_count());
    parallel_for(mesh.vertex_count(), [&](std::size_t vi) {
        records[vi] =
            compute_vertex_shift(du, regularized, dr, reg_tree, static_cast<uint32_t>(vi),
                                 mesh.vertices[vi], mesh.normals[vi], edge_len[vi], cfg);
    });

    std::size_t eps_fb = 0, delta_fb = 0;
    for (const auto& r : records) {
        eps_fb += r.eps_fallback;
        delta_fb += r.delta_fallback;
    }
    if (eps_fb || delta_fb)
        std::cerr << "[thickness] fallbacks: " << eps_fb << " empty regularized bands, "
                  << delta_fb << " empty unconstrained bands of " << records.size()
                  << " vertices\n";
    return records;
}

namespace {

// Uniform grid over cell bounding boxes; cells are inserted into every bucket
// their box overlaps, so one bucket lookup per query point suffices.
struct AabbGrid {
    Vec3 origin = Vec3::Zero();
    double cell_size = 1.0;
    int nx = 1, ny = 1, nz = 1;
    std::vector<std::vector<uint32_t>> buckets;

    void build(const std::vector<PrismaticCell>& cells) {
        buckets.clear();
        if (cells.empty()) {
            buckets.assign(1, {});
            return;
        }
        Vec3 lo = cells[0].corners[0], hi = lo;
        double mean_extent = 0.0;
        std::vector<std::pair<Vec3, Vec3>> boxes(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            Vec3 blo = cells[i].corners[0], bhi = blo;
            for (const Vec3& c : cells[i].corners) {
                blo = blo.cwiseMin(c);
                bhi = bhi.cwiseMax(c);
            }
            boxes[i] = {blo, bhi};
            lo = lo.cwiseMin(blo);
            hi = hi.cwiseMax(bhi);
            mean_extent += (bhi - blo).maxCoeff();
        }
        mean_extent /= static_cast<double>(cells.size());
        cell_size = std::max(mean_extent, 1e-9);
        origin = lo;
        Vec3 span = hi - lo;
        auto dims = [&] {
            nx = std::max(1, static_cast<int>(span.x() / cell_size) + 1);
            ny = std::max(1, static_cast<int>(span.y() / cell_size) + 1);
            nz = std::max(1, static_cast<int>(span.z() / cell_size) + 1);
        };
        dims();
        while (static_cast<long long>(nx) * ny * nz > 2'000'000) {
            cell_size *= 2.0;
            dims();
        }
        buckets.assign(static_cast<std::size_t>(nx) * ny * nz, {});
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto [blo, bhi] = boxes[i];
            int x0, y0, z0, x1, y1, z1;
            coords(blo, x0, y0, z0);
            coords(bhi, x1, y1, z1);
            for (int z = z0; z <= z1; ++z)
                for (int y = y0; y <= y1; ++y)
                    for (int x = x0; x <= x1; ++x)
                        buckets[index(x, y, z)].push_back(static_cast<uint32_t>(i));
        }
    }

    void coords(const Vec3& p, int& x, int& y, int& z) const {
        x = std::clamp(static_cast<int>((p.x() - origin.x()) / cell_size), 0, nx - 1);
        y = std::clamp(static_cast<int>((p.y() - origin.y()) / cell_size), 0, ny - 1);
        z = std::clamp(static_cast<int>((p.z() - origin.z()) / cell_size), 0, nz - 1);
    }

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny + y) * nx + x;
    }

    const std::vector<uint32_t>& candidates(const Vec3& p) const {
        int x, y, z;
        coords(p, x, y, z);
        return buckets[index(x, y, z)];
    }
};

constexpr double kStrictTol = -1e-9;

// True when p lies strictly inside some cell whose face is not incident to
// `vertex`. Flat cells hold nothing and are skipped.
bool inside_foreign_cell(const Vec3& p, uint32_t vertex, const TriMesh& mesh,
                         const std::vector<PrismaticCell>& cells, const AabbGrid& grid) {
    for (uint32_t ci : grid.candidates(p)) {
        const PrismaticCell& cell = cells[ci];
        const auto& f = mesh.faces[cell.face];
        if (f[0] == vertex || f[1] == vertex || f[2] == vertex) continue;
        if (cell.volume <= 0.0) continue;
        if (point_in_cell(p, cell, kStrictTol)) return true;
    }
    return false;
}

double toward_zero(double value, double step) {
    if (value > 0) return std::max(0.0, value - step);
    if (value < 0) return std::min(0.0, value + step);
    return 0.0;
}

}  // namespace

std::vector<VertexShiftRecord> grow_shifts(const TriMesh& mesh,
                                           const std::vector<VertexShiftRecord>& targets,
                                           int steps) {
    std::size_t nv = mesh.vertex_count();
    if (targets.size() != nv)
        fail(Err::ShiftLengthMismatch, std::to_string(targets.size()) + " target records for " +
                                           std::to_string(nv) + " vertices");
    if (steps < 1) fail(Err::NonPositiveInput, "steps must be >= 1");

    std::vector<double> tgt_in(nv), tgt_out(nv), cur_in(nv, 0.0), cur_out(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        tgt_in[targets[v].vertex] = targets[v].delta_in;
        tgt_out[targets[v].vertex] = targets[v].delta_out;
    }
    std::vector<char> frozen_in(nv, 0), frozen_out(nv, 0);

    AabbGrid grid;
    std::vector<PrismaticCell> cells;
    auto rebuild = [&](const std::vector<double>& din, const std::vector<double>& dout) {
        cells.clear();
        cells.reserve(mesh.face_count());
        for (uint32_t f = 0; f < mesh.face_count(); ++f)
            cells.push_back(make_cell(mesh, f, din, dout));
        grid.build(cells);
    };

    for (int s = 1; s <= steps; ++s) {
        double frac = static_cast<double>(s) / static_cast<double>(steps);
        std::vector<double> tent_in(nv), tent_out(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            tent_in[v] = frozen_in[v] ? cur_in[v] : tgt_in[v] * frac;
            tent_out[v] = frozen_out[v] ? cur_out[v] : tgt_out[v] * frac;
            if (tent_in[v] > tent_out[v]) tent_in[v] = tent_out[v];
        }
        rebuild(tent_in, tent_out);

        // Decisions below read only the tentative configuration, never this
        // step's partial updates, so the outcome is order-independent.
        std::vector<double> next_in = tent_in, next_out = tent_out;
        for (std::size_t v = 0; v < nv; ++v) {
            Vec3 p_in = mesh.vertices[v] + tent_in[v] * mesh.normals[v];
            if (inside_foreign_cell(p_in, static_cast<uint32_t>(v), mesh, cells, grid)) {
                next_in[v] = frozen_in[v]
                                 ? toward_zero(cur_in[v], std::abs(tgt_in[v]) / steps)
                                 : cur_in[v];
                frozen_in[v] = 1;
            }
            Vec3 p_out = mesh.vertices[v] + tent_out[v] * mesh.normals[v];
            if (inside_foreign_cell(p_out, static_cast<uint32_t>(v), mesh, cells, grid)) {
                next_out[v] = frozen_out[v]
                                  ? toward_zero(cur_out[v], std::abs(tgt_out[v]) / steps)
                                  : cur_out[v];
                frozen_out[v] = 1;
            }
        }
        cur_in = std::move(next_in);
        cur_out = std::move(next_out);
        for (std::size_t v = 0; v < nv; ++v)
            if (cur_in[v] > cur_out[v]) cur_in[v] = cur_out[v];
    }

    // Cleanup fixpoint: every pass strictly shrinks some shift, and the
    // all-zero configuration (flat cells) is violation-free, so this ends.
    for (int pass = 0; pass < steps * 8 + 8; ++pass) {
        rebuild(cur_in, cur_out);
        bool any = false;
        std::vector<double> next_in = cur_in, next_out = cur_out;
        for (std::size_t v = 0; v < nv; ++v) {
            auto pullback = [&](std::vector<double>& side, const std::vector<double>& cur,
                                const std::vector<double>& tgt, std::size_t vi) {
                double step = std::max(std::abs(tgt[vi]) / steps, 1e-12);
                if (std::abs(cur[vi]) > 1e-12) {
                    side[vi] = toward_zero(cur[vi], step);
                } else {
                    // Offender already flat: shrink the containing cells instead.
                    Vec3 p = mesh.vertices[vi] + cur[vi] * mesh.normals[vi];
                    for (uint32_t ci : grid.candidates(p)) {
                        const PrismaticCell& cell = cells[ci];
                        const auto& f = mesh.faces[cell.face];
                        if (f[0] == vi || f[1] == vi || f[2] == vi) continue;
                        if (cell.volume <= 0.0 || !point_in_cell(p, cell, kStrictTol)) continue;
                        for (uint32_t w : f) {
                            next_in[w] = toward_zero(cur_in[w],
                                                     std::max(std::abs(tgt_in[w]) / steps, 1e-12));
                            next_out[w] = toward_zero(
                                cur_out[w], std::max(std::abs(tgt_out[w]) / steps, 1e-12));
                        }
                    }
                }
            };
            Vec3 p_in = mesh.vertices[v] + cur_in[v] * mesh.normals[v];
            if (inside_foreign_cell(p_in, static_cast<uint32_t>(v), mesh, cells, grid)) {
                any = true;
                frozen_in[v] = 1;
                pullback(next_in, cur_in, tgt_in, v);
            }
            Vec3 p_out = mesh.vertices[v] + cur_out[v] * mesh.normals[v];
            if (inside_foreign_cell(p_out, static_cast<uint32_t>(v), mesh, cells, grid)) {
                any = true;
                frozen_out[v] = 1;
                pullback(next_out, cur_out, tgt_out, v);
            }
        }
        if (!any) break;
        cur_in = std::move(next_in);
        cur_out = std::move(next_out);
        for (std::size_t v = 0; v < nv; ++v)
            if (cur_in[v] > cur_out[v]) cur_in[v] = cur_out[v];
    }

    std::vector<VertexShiftRecord> out = targets;
    for (VertexShiftRecord& r : out) {
        r.delta_in = cur_in[r.vertex];
        r.delta_out = cur_out[r.vertex];
    }
    return out;
}

}  // namespace frosting
