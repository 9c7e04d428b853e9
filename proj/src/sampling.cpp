#include "frosting/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "frosting/kdtree.hpp"

namespace frosting {

std::array<double, 6> sample_simplex6(Rng& rng) {
    // Normalized exponentials are a flat Dirichlet draw.
    std::array<double, 6> w;
    double sum = 0.0;
    for (double& x : w) {
        double u = rng.uniform();
        if (u <= 0) u = 0x1.0p-53;
        x = -std::log(u);
        sum += x;
    }
    for (double& x : w) x /= sum;
    return w;
}

std::vector<SampledCenter> sample_centers(const FrostingLayer& layer, const SamplingConfig& cfg) {
    std::size_t n_cells = layer.cells.size();
    if (n_cells == 0) fail(Err::EmptyLayer, "layer has no cells");

    std::size_t n_uniform = static_cast<std::size_t>(
        std::ceil(cfg.uniform_fraction * static_cast<double>(cfg.budget)));
    n_uniform = std::min(n_uniform, cfg.budget);
    std::size_t n_volume = cfg.budget - n_uniform;

    std::vector<double> prefix;
    double total = 0.0;
    if (n_volume > 0) {
        prefix.reserve(n_cells);
        for (const PrismaticCell& cell : layer.cells) {
            double v = cfg.contraction ? contracted_cell_volume(cell, *cfg.contraction)
                                       : cell.volume;
            total += v;
            prefix.push_back(total);
        }
        if (!(total > 0))
            fail(Err::EmptyLayer, "total cell volume is zero; cannot draw volume-weighted samples");
    }

    Rng rng(cfg.seed);
    std::vector<SampledCenter> out;
    out.reserve(cfg.budget);
    for (std::size_t i = 0; i < n_uniform; ++i) {
        SampledCenter s;
        s.cell = static_cast<uint32_t>(rng.below(n_cells));
        s.coords = sample_simplex6(rng);
        out.push_back(s);
    }
    for (std::size_t i = 0; i < n_volume; ++i) {
        double r = rng.uniform() * total;
        auto it = std::upper_bound(prefix.begin(), prefix.end(), r);
        if (it == prefix.end()) --it;  // r == total after rounding
        SampledCenter s;
        s.cell = static_cast<uint32_t>(it - prefix.begin());
        s.coords = sample_simplex6(rng);
        out.push_back(s);
    }
    return out;
}

std::vector<FrostedGaussian> initialize_gaussians(const std::vector<SampledCenter>& centers,
                                                  const FrostingLayer& layer,
                                                  const GaussianCloud& unconstrained,
                                                  const SamplingConfig& cfg) {
    if (unconstrained.size() == 0) fail(Err::TooFewGaussians, "unconstrained cloud is empty");
    std::size_t n = centers.size();

    std::vector<FrostedGaussian> out(n);
    std::vector<Vec3> positions(n);
    for (std::size_t i = 0; i < n; ++i) {
        FrostedGaussian& g = out[i];
        g.cell = centers[i].cell;
        if (g.cell >= layer.cells.size())
            fail(Err::BadCellIndex,
                 "cell " + std::to_string(g.cell) + " of " + std::to_string(layer.cells.size()));
        for (int k = 0; k < 6; ++k) g.bary_logits[k] = std::log(centers[i].coords[k] + 1e-8);
        g.opacity_logit = logit(cfg.opacity_init);
        g.rotation = Quat::identity();
        g.residual_rotation = Quat::identity();
        positions[i] = frosted_position(g, layer);
    }

    std::vector<Vec3> donor_means(unconstrained.size());
    for (std::size_t i = 0; i < unconstrained.size(); ++i)
        donor_means[i] = unconstrained.gaussians[i].mean;
    KdTree donor_tree(std::move(donor_means));
    for (std::size_t i = 0; i < n; ++i) {
        auto [idx, d2] = donor_tree.nearest(positions[i]);
        (void)d2;
        out[i].sh = unconstrained.gaussians[idx].sh;
    }

    KdTree sample_tree(positions);
    for (std::size_t i = 0; i < n; ++i) {
        auto nbrs = sample_tree.k_nearest(positions[i], 3, i);
        double mean_dist;
        if (nbrs.empty()) {
            // Lone sample: fall back to a fraction of its cell's extent.
            const PrismaticCell& cell = layer.cells[out[i].cell];
            Vec3 lo = cell.corners[0], hi = lo;
            for (const Vec3& c : cell.corners) {
                lo = lo.cwiseMin(c);
                hi = hi.cwiseMax(c);
            }
            mean_dist = 0.1 * (hi - lo).norm();
        } else {
            mean_dist = 0.0;
            for (const auto& [idx, d2] : nbrs) mean_dist += std::sqrt(d2);
            mean_dist /= static_cast<double>(nbrs.size());
        }
        mean_dist = std::max(mean_dist, 1e-8);
        out[i].log_scales = Vec3::Constant(std::log(mean_dist));
    }
    return out;
}

}  // namespace frosting
