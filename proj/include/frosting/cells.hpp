#pragma once

#include "frosting/mesh.hpp"
#include "frosting/thickness.hpp"

namespace frosting {

// Triangular prism between a face's inner and outer shifted copies.
// corners[0..2] are inner (v_i + delta_in_i * n_i) and corners[3..5] outer
// (v_i + delta_out_i * n_i), both in face vertex order.
struct PrismaticCell {
    uint32_t face = 0;
    std::array<Vec3, 6> corners;
    double volume = 0.0;
};

struct FrostingLayer {
    std::vector<double> delta_in;   // per mesh vertex
    std::vector<double> delta_out;
    std::vector<PrismaticCell> cells;  // one per face, face order
};

struct ContractionParams {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

// Volume by the fixed decomposition (i0,i1,i2,o2), (i0,i1,o1,o2),
// (i0,o0,o1,o2), absolute value per tetrahedron.
double cell_volume(const std::array<Vec3, 6>& corners);

PrismaticCell make_cell(const TriMesh& mesh, uint32_t face, const std::vector<double>& delta_in,
                        const std::vector<double>& delta_out);

// One cell per face. Throws ShiftLengthMismatch when records do not cover
// every mesh vertex.
FrostingLayer build_cells(const TriMesh& mesh, const std::vector<VertexShiftRecord>& shifts);

// Barycentric containment against the same tetrahedron decomposition as
// cell_volume. Coordinates are accepted down to -tol, so a negative tol
// demands strict interiority. Throws DegenerateCell for zero-volume cells.
bool point_in_cell(const Vec3& p, const PrismaticCell& cell, double tol = 1e-9);

// Radial scene contraction: identity inside the ball of `radius` around
// `center`, else center + radius * (2 - radius/r) * dir. Maps all of space
// into the ball of twice the radius. Throws NonPositiveInput for radius <= 0.
Vec3 contract_point(const Vec3& p, const ContractionParams& params);

// Volume of the cell whose corners were pushed through contract_point.
double contracted_cell_volume(const PrismaticCell& cell, const ContractionParams& params);

// Center of the camera-position bounding box; radius = half its diagonal.
// Throws NonPositiveInput on an empty camera list or zero diagonal.
ContractionParams contraction_from_positions(const std::vector<Vec3>& camera_positions);

// Fallback when no cameras exist: mesh vertex centroid + half bbox diagonal.
ContractionParams contraction_from_mesh(const TriMesh& mesh);

}  // namespace frosting
