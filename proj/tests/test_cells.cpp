#include <doctest.h>

#include <cmath>

#include "frosting/cells.hpp"
#include "helpers.hpp"

using namespace frosting;

namespace {

// Straight prism over a right triangle: area * height, exactly.
PrismaticCell straight_prism(double height_in, double height_out) {
    TriMesh mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
    std::vector<double> din(3, height_in), dout(3, height_out);
    return make_cell(mesh, 0, din, dout);
}

}  // namespace

TEST_CASE("make_cell places inner and outer corners along vertex normals") {
    TriMesh mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
    std::vector<double> din = {-0.1, -0.2, -0.3}, dout = {0.4, 0.5, 0.6};
    PrismaticCell cell = make_cell(mesh, 0, din, dout);
    CHECK(cell.face == 0);
    for (int i = 0; i < 3; ++i) {
        CHECK((cell.corners[i] - (mesh.vertices[i] + din[i] * mesh.normals[i])).norm() == 0.0);
        CHECK((cell.corners[3 + i] - (mesh.vertices[i] + dout[i] * mesh.normals[i])).norm() == 0.0);
    }
    CHECK(cell.volume == doctest::Approx(cell_volume(cell.corners)));
}

TEST_CASE("cell_volume of straight prisms is area times height") {
    PrismaticCell cell = straight_prism(-0.25, 0.5);
    CHECK(cell.volume == doctest::Approx(0.5 * 0.75).epsilon(1e-12));
    // Flat cell.
    PrismaticCell flat = straight_prism(0.2, 0.2);
    CHECK(flat.volume == doctest::Approx(0.0));
}

TEST_CASE("cell_volume matches Monte Carlo integration") {
    Rng rng(71);
    testutil::LayerFixture fix = testutil::disjoint_prisms(4, rng);
    for (const PrismaticCell& cell : fix.layer.cells) {
        Vec3 lo = cell.corners[0], hi = lo;
        for (const Vec3& c : cell.corners) {
            lo = lo.cwiseMin(c);
            hi = hi.cwiseMax(c);
        }
        Vec3 ext = hi - lo;
        double box_vol = ext.x() * ext.y() * ext.z();
        int inside = 0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) {
            Vec3 p = lo + Vec3(rng.uniform() * ext.x(), rng.uniform() * ext.y(),
                               rng.uniform() * ext.z());
            if (point_in_cell(p, cell)) ++inside;
        }
        double estimate = box_vol * inside / n;
        double frac = cell.volume / box_vol;
        double sigma = box_vol * std::sqrt(frac * (1.0 - frac) / n);
        CHECK(std::abs(estimate - cell.volume) < 4.0 * sigma + 1e-12);
    }
}

TEST_CASE("point_in_cell accepts convex combinations and rejects outside points") {
    Rng rng(72);
    testutil::LayerFixture fix = testutil::disjoint_prisms(3, rng);
    const PrismaticCell& cell = fix.layer.cells[0];
    for (int t = 0; t < 200; ++t) {
        std::array<double, 6> w = sample_simplex6(rng);
        Vec3 p = Vec3::Zero();
        for (int k = 0; k < 6; ++k) p += w[k] * cell.corners[k];
        CHECK(point_in_cell(p, cell, 1e-9));
    }
    // Points beyond the bounding box are always outside.
    Vec3 lo = cell.corners[0], hi = lo;
    for (const Vec3& c : cell.corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    Vec3 d = hi - lo;
    CHECK_FALSE(point_in_cell(hi + 0.01 * d, cell));
    CHECK_FALSE(point_in_cell(lo - 0.01 * d, cell));
    CHECK_FALSE(point_in_cell(hi + Vec3(0, 0, 10), cell));
}

TEST_CASE("point_in_cell tolerance sign selects boundary behavior") {
    PrismaticCell cell = straight_prism(-0.5, 0.5);
    // A corner is on the boundary: inclusive under positive tol, excluded
    // under strict (negative) tol.
    CHECK(point_in_cell(cell.corners[0], cell, 1e-9));
    CHECK_FALSE(point_in_cell(cell.corners[0], cell, -1e-9));
    Vec3 center = Vec3::Zero();
    for (const Vec3& c : cell.corners) center += c / 6.0;
    CHECK(point_in_cell(center, cell, -1e-9));
}

TEST_CASE("point_in_cell rejects degenerate cells") {
    PrismaticCell flat = straight_prism(0.1, 0.1);
    CHECK_THROWS_AS(point_in_cell(Vec3(0.1, 0.1, 0.1), flat), Error);
    try {
        point_in_cell(Vec3(0, 0, 0), flat);
    } catch (const Error& e) {
        CHECK(e.kind() == Err::DegenerateCell);
    }
}

TEST_CASE("contract_point is the identity inside the ball") {
    ContractionParams params;
    params.center = Vec3(1, -2, 0.5);
    params.radius = 2.0;
    Rng rng(73);
    for (int t = 0; t < 1000; ++t) {
        Vec3 d(rng.normal(), rng.normal(), rng.normal());
        Vec3 p = params.center + params.radius * rng.uniform() * d.normalized();
        Vec3 q = contract_point(p, params);
        CHECK(q == p);  // exact, not approximate
    }
}

TEST_CASE("contract_point maps everything into twice the radius") {
    ContractionParams params;
    params.center = Vec3(-0.5, 0.3, 2.0);
    params.radius = 1.5;
    Rng rng(74);
    for (int t = 0; t < 1000; ++t) {
        Vec3 d(rng.normal(), rng.normal(), rng.normal());
        double r = params.radius * (1.0 + std::exp(rng.uniform(0.0, 12.0)));
        Vec3 p = params.center + r * d.normalized();
        Vec3 q = contract_point(p, params);
        CHECK((q - params.center).norm() < 2.0 * params.radius);
        // Direction is preserved.
        CHECK(((q - params.center).normalized() - (p - params.center).normalized()).norm() < 1e-9);
        // Radial order is preserved: farther in, farther out.
        Vec3 q2 = contract_point(params.center + 1.01 * r * d.normalized(), params);
        CHECK((q2 - params.center).norm() > (q - params.center).norm());
    }
}

TEST_CASE("contract_point is continuous at the ball boundary") {
    ContractionParams params;
    params.center = Vec3(0.2, 0.1, -1.0);
    params.radius = 1.0;
    Rng rng(75);
    for (int t = 0; t < 200; ++t) {
        Vec3 dir = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
        Vec3 inside = params.center + (params.radius * (1.0 - 1e-12)) * dir;
        Vec3 outside = params.center + (params.radius * (1.0 + 1e-12)) * dir;
        CHECK((contract_point(inside, params) - contract_point(outside, params)).norm() < 1e-9);
    }
}

TEST_CASE("contract_point rejects non-positive radius") {
    ContractionParams params;
    params.radius = 0.0;
    CHECK_THROWS_AS(contract_point(Vec3(1, 0, 0), params), Error);
}

TEST_CASE("contracted volume equals plain volume for interior cells") {
    Rng rng(76);
    testutil::LayerFixture fix = testutil::disjoint_prisms(4, rng);
    ContractionParams params;
    params.center = Vec3::Zero();
    params.radius = 50.0;  // everything is deep inside
    for (const PrismaticCell& cell : fix.layer.cells)
        CHECK(contracted_cell_volume(cell, params) == cell.volume);
}

TEST_CASE("contracted volume shrinks far-away cells") {
    PrismaticCell cell = straight_prism(-0.5, 0.5);
    ContractionParams params;
    params.center = Vec3(500, 0, 0);
    params.radius = 1.0;
    CHECK(contracted_cell_volume(cell, params) < 1e-3 * cell.volume);
}

TEST_CASE("contraction_from_positions uses the bounding box") {
    std::vector<Vec3> cams = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 4, 6), Vec3(1, 1, 1)};
    ContractionParams params = contraction_from_positions(cams);
    CHECK((params.center - Vec3(1, 2, 3)).norm() < 1e-12);
    CHECK(params.radius == doctest::Approx(0.5 * Vec3(2, 4, 6).norm()));

    CHECK_THROWS_AS(contraction_from_positions({}), Error);
    CHECK_THROWS_AS(contraction_from_positions({Vec3(1, 1, 1), Vec3(1, 1, 1)}), Error);
}

TEST_CASE("contraction_from_mesh centers on the vertex centroid") {
    TriMesh mesh({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 2, 0)}, {{0, 1, 2}});
    ContractionParams params = contraction_from_mesh(mesh);
    CHECK((params.center - Vec3(2.0 / 3.0, 2.0 / 3.0, 0)).norm() < 1e-12);
    CHECK(params.radius == doctest::Approx(0.5 * Vec3(2, 2, 0).norm()));
}

TEST_CASE("build_cells needs a record per vertex") {
    TriMesh mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
    std::vector<VertexShiftRecord> recs(2);
    CHECK_THROWS_AS(build_cells(mesh, recs), Error);
    recs.resize(3);
    for (uint32_t v = 0; v < 3; ++v) {
        recs[v].vertex = v;
        recs[v].delta_in = -0.1;
        recs[v].delta_out = 0.2;
    }
    FrostingLayer layer = build_cells(mesh, recs);
    CHECK(layer.cells.size() == 1);
    CHECK(layer.delta_in == std::vector<double>{-0.1, -0.1, -0.1});
    CHECK(layer.delta_out == std::vector<double>{0.2, 0.2, 0.2});
}
