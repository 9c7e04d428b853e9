#include <doctest.h>

#include <cmath>

#include "frosting/sampling.hpp"
#include "helpers.hpp"

using namespace frosting;

namespace {

// Two straight prisms whose volumes are exactly 2:1 (heights 0.5 and 0.25
// over congruent right triangles).
testutil::LayerFixture two_to_one_layer() {
    testutil::LayerFixture fix;
    std::vector<Vec3> verts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                               Vec3(3, 0, 0), Vec3(4, 0, 0), Vec3(3, 1, 0)};
    fix.mesh = TriMesh(std::move(verts), {{0, 1, 2}, {3, 4, 5}});
    fix.layer.delta_in = {-0.25, -0.25, -0.25, -0.125, -0.125, -0.125};
    fix.layer.delta_out = {0.25, 0.25, 0.25, 0.125, 0.125, 0.125};
    for (uint32_t f = 0; f < 2; ++f)
        fix.layer.cells.push_back(make_cell(fix.mesh, f, fix.layer.delta_in, fix.layer.delta_out));
    fix.span = 4.0;
    return fix;
}

}  // namespace

TEST_CASE("two-cell volume ratio is exactly two") {
    testutil::LayerFixture fix = two_to_one_layer();
    CHECK(fix.layer.cells[0].volume == 2.0 * fix.layer.cells[1].volume);
    CHECK(fix.layer.cells[0].volume == doctest::Approx(0.25));
}

TEST_CASE("simplex draws are nonnegative and sum to one") {
    Rng rng(101);
    for (int t = 0; t < 2000; ++t) {
        auto w = sample_simplex6(rng);
        double sum = 0.0;
        for (double x : w) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("simplex draws have flat marginals") {
    Rng rng(102);
    const int n = 20000;
    double mean0 = 0.0, mean5 = 0.0;
    for (int t = 0; t < n; ++t) {
        auto w = sample_simplex6(rng);
        mean0 += w[0];
        mean5 += w[5];
    }
    mean0 /= n;
    mean5 /= n;
    // Var of one flat-Dirichlet coordinate is (1/6)(5/6)/7; 5 sigma of the
    // sample mean is ~0.004.
    CHECK(std::abs(mean0 - 1.0 / 6.0) < 0.005);
    CHECK(std::abs(mean5 - 1.0 / 6.0) < 0.005);
}

TEST_CASE("volume-proportional sampling matches the 2:1 design") {
    testutil::LayerFixture fix = two_to_one_layer();
    SamplingConfig cfg;
    cfg.budget = 12000;
    cfg.uniform_fraction = 0.0;
    cfg.seed = 7;
    auto centers = sample_centers(fix.layer, cfg);
    REQUIRE(centers.size() == cfg.budget);
    double counts[2] = {0, 0};
    for (const auto& c : centers) counts[c.cell] += 1;
    double e0 = cfg.budget * 2.0 / 3.0, e1 = cfg.budget / 3.0;
    double chi2 = testutil::sqr_chi(counts[0], e0) + testutil::sqr_chi(counts[1], e1);
    CHECK(chi2 < 6.635);  // p > 0.01 at one degree of freedom
}

TEST_CASE("uniform sampling ignores volume") {
    testutil::LayerFixture fix = two_to_one_layer();
    SamplingConfig cfg;
    cfg.budget = 12000;
    cfg.uniform_fraction = 1.0;
    cfg.seed = 8;
    auto centers = sample_centers(fix.layer, cfg);
    double counts[2] = {0, 0};
    for (const auto& c : centers) counts[c.cell] += 1;
    double chi2 = testutil::sqr_chi(counts[0], 6000.0) + testutil::sqr_chi(counts[1], 6000.0);
    CHECK(chi2 < 6.635);
}

TEST_CASE("contraction changes the volume weighting") {
    // The big cell is pushed far outside the contraction ball, so its
    // contracted volume collapses and nearly all volume draws go small.
    testutil::LayerFixture fix = two_to_one_layer();
    SamplingConfig cfg;
    cfg.budget = 4000;
    cfg.uniform_fraction = 0.0;
    cfg.seed = 9;
    ContractionParams params;
    params.center = Vec3(3.5, 0.5, 0.0);  // centered on the small cell
    params.radius = 1.0;
    cfg.contraction = params;
    auto centers = sample_centers(fix.layer, cfg);
    std::size_t small = 0;
    for (const auto& c : centers) small += c.cell == 1;
    CHECK(static_cast<double>(small) / cfg.budget > 0.5);
}

TEST_CASE("sample_centers validates the layer") {
    FrostingLayer empty;
    SamplingConfig cfg;
    CHECK_THROWS_AS(sample_centers(empty, cfg), Error);

    // All-flat cells have zero volume: volume draws are impossible.
    TriMesh mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
    std::vector<double> zero(3, 0.0);
    FrostingLayer flat;
    flat.delta_in = zero;
    flat.delta_out = zero;
    flat.cells.push_back(make_cell(mesh, 0, zero, zero));
    SamplingConfig vol;
    vol.uniform_fraction = 0.0;
    vol.budget = 10;
    CHECK_THROWS_AS(sample_centers(flat, vol), Error);
}

TEST_CASE("initialization copies structure from the draw") {
    Rng rng(103);
    testutil::LayerFixture fix = testutil::disjoint_prisms(4, rng);
    SamplingConfig cfg;
    cfg.budget = 200;
    cfg.seed = 11;
    auto centers = sample_centers(fix.layer, cfg);

    // Two donors with distinct SH; gaussians must copy the closer one.
    GaussianCloud donors;
    for (int i = 0; i < 2; ++i) {
        Gaussian3D d;
        d.mean = i == 0 ? Vec3(-1, -1, 0) : Vec3(40, 40, 0);  // second far away
        d.sh.assign(3, i == 0 ? 0.25 : 0.75);
        donors.gaussians.push_back(d);
    }
    auto gaussians = initialize_gaussians(centers, fix.layer, donors, cfg);
    REQUIRE(gaussians.size() == centers.size());

    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        const FrostedGaussian& g = gaussians[i];
        CHECK(g.cell == centers[i].cell);
        for (int k = 0; k < 6; ++k)
            CHECK(g.bary_logits[k] == std::log(centers[i].coords[k] + 1e-8));
        CHECK(g.opacity_logit == logit(cfg.opacity_init));
        CHECK(testutil::quat_equal(g.rotation, Quat::identity()));
        CHECK(testutil::quat_equal(g.residual_rotation, Quat::identity()));
        CHECK(g.sh == std::vector<double>(3, 0.25));  // near donor wins
        // Isotropic scales.
        CHECK(g.log_scales[0] == g.log_scales[1]);
        CHECK(g.log_scales[1] == g.log_scales[2]);
        // Position stays inside its cell.
        CHECK(point_in_cell(frosted_position(g, fix.layer), fix.layer.cells[g.cell], 1e-9));
    }
}

TEST_CASE("initial scale is the mean distance to three sampled neighbors") {
    // Hand-build four centers at known positions inside one big prism.
    TriMesh mesh({Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(0, 10, 0)}, {{0, 1, 2}});
    std::vector<double> din(3, -1.0), dout(3, 1.0);
    FrostingLayer layer;
    layer.delta_in = din;
    layer.delta_out = dout;
    layer.cells.push_back(make_cell(mesh, 0, din, dout));

    // Corner blends with one dominant corner give predictable positions; use
    // delta logits so coords are explicit.
    std::vector<SampledCenter> centers(4);
    for (auto& c : centers) c.cell = 0;
    // All mass on inner corner 0 (logit slot 3), etc. The exact positions do
    // not matter; what matters is that scales equal the mean 3-NN distance.
    centers[0].coords = {1, 0, 0, 0, 0, 0};
    centers[1].coords = {0, 1, 0, 0, 0, 0};
    centers[2].coords = {0, 0, 1, 0, 0, 0};
    centers[3].coords = {0, 0, 0, 1, 0, 0};

    GaussianCloud donor;
    Gaussian3D d;
    d.sh.assign(3, 0.0);
    donor.gaussians.push_back(d);

    SamplingConfig cfg;
    auto gs = initialize_gaussians(centers, layer, donor, cfg);
    std::vector<Vec3> pos;
    for (const auto& g : gs) pos.push_back(frosted_position(g, layer));
    for (std::size_t i = 0; i < gs.size(); ++i) {
        std::vector<double> dists;
        for (std::size_t j = 0; j < gs.size(); ++j)
            if (j != i) dists.push_back((pos[i] - pos[j]).norm());
        std::sort(dists.begin(), dists.end());
        double mean3 = (dists[0] + dists[1] + dists[2]) / 3.0;
        CHECK(std::exp(gs[i].log_scales[0]) == doctest::Approx(mean3).epsilon(1e-9));
    }
}

TEST_CASE("lone sample falls back to a cell-extent scale") {
    TriMesh mesh({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 2, 0)}, {{0, 1, 2}});
    std::vector<double> din(3, -0.5), dout(3, 0.5);
    FrostingLayer layer;
    layer.delta_in = din;
    layer.delta_out = dout;
    layer.cells.push_back(make_cell(mesh, 0, din, dout));
    std::vector<SampledCenter> centers(1);
    centers[0].cell = 0;
    centers[0].coords = {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    GaussianCloud donor;
    Gaussian3D d;
    d.sh.assign(3, 0.0);
    donor.gaussians.push_back(d);
    SamplingConfig cfg;
    auto gs = initialize_gaussians(centers, layer, donor, cfg);
    // Cell bbox spans (2, 2, 1); the fallback is a tenth of its diagonal.
    CHECK(std::exp(gs[0].log_scales[0]) == doctest::Approx(0.1 * Vec3(2, 2, 1).norm()));
}

TEST_CASE("sampling is deterministic in the seed") {
    Rng rng(104);
    testutil::LayerFixture fix = testutil::disjoint_prisms(3, rng);
    SamplingConfig cfg;
    cfg.budget = 300;
    cfg.seed = 42;
    auto a = sample_centers(fix.layer, cfg);
    auto b = sample_centers(fix.layer, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].cell == b[i].cell);
        CHECK(a[i].coords == b[i].coords);
    }
    cfg.seed = 43;
    auto c = sample_centers(fix.layer, cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].coords != c[i].coords;
    CHECK(any_diff);
}

TEST_CASE("uniform fraction splits the budget with a ceiling") {
    // budget 5, fraction 0.5 -> 3 uniform draws + 2 volume draws. Observable
    // through determinism: reproducing the split by hand with the same rng
    // stream must give the same cells.
    testutil::LayerFixture fix = two_to_one_layer();
    SamplingConfig cfg;
    cfg.budget = 5;
    cfg.uniform_fraction = 0.5;
    cfg.seed = 1234;
    auto centers = sample_centers(fix.layer, cfg);
    REQUIRE(centers.size() == 5);

    Rng rng(cfg.seed);
    for (int i = 0; i < 3; ++i) {  // ceil(0.5 * 5) = 3 uniform draws
        uint32_t cell = static_cast<uint32_t>(rng.below(2));
        auto coords = sample_simplex6(rng);
        CHECK(centers[i].cell == cell);
        CHECK(centers[i].coords == coords);
    }
    double total = fix.layer.cells[0].volume + fix.layer.cells[1].volume;
    for (int i = 3; i < 5; ++i) {
        double r = rng.uniform() * total;
        uint32_t cell = r < fix.layer.cells[0].volume ? 0 : 1;
        auto coords = sample_simplex6(rng);
        CHECK(centers[i].cell == cell);
        CHECK(centers[i].coords == coords);
    }
}
