#include "frosting/cells.hpp"

#include <cmath>

namespace frosting {

namespace {

// Tetrahedron corner indices into the 6-corner array.
constexpr int kTets[3][4] = {{0, 1, 2, 5}, {0, 1, 4, 5}, {0, 3, 4, 5}};

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return std::abs((b - a).cross(c - a).dot(d - a)) / 6.0;
}

bool point_in_tet(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                  double tol) {
    Mat3 m;
    m.col(0) = b - a;
    m.col(1) = c - a;
    m.col(2) = d - a;
    double det = m.determinant();
    if (std::abs(det) < 1e-300) return false;  // flat tetrahedron holds nothing
    Vec3 w = m.inverse() * (p - a);
    double w0 = 1.0 - w.sum();
    return w.x() >= -tol && w.y() >= -tol && w.z() >= -tol && w0 >= -tol;
}

}  // namespace

double cell_volume(const std::array<Vec3, 6>& corners) {
    double v = 0.0;
    for (const auto& t : kTets)
        v += tet_volume(corners[t[0]], corners[t[1]], corners[t[2]], corners[t[3]]);
    return v;
}

PrismaticCell make_cell(const TriMesh& mesh, uint32_t face, const std::vector<double>& delta_in,
                        const std::vector<double>& delta_out) {
    PrismaticCell cell;
    cell.face = face;
    const auto& f = mesh.faces[face];
    for (int i = 0; i < 3; ++i) {
        const Vec3& v = mesh.vertices[f[i]];
        const Vec3& n = mesh.normals[f[i]];
        cell.corners[i] = v + delta_in[f[i]] * n;
        cell.corners[3 + i] = v + delta_out[f[i]] * n;
    }
    cell.volume = cell_volume(cell.corners);
    return cell;
}

FrostingLayer build_cells(const TriMesh& mesh, const std::vector<VertexShiftRecord>& shifts) {
    if (shifts.size() != mesh.vertex_count())
        fail(Err::ShiftLengthMismatch, std::to_string(shifts.size()) + " shift records for " +
                                           std::to_string(mesh.vertex_count()) + " vertices");
    FrostingLayer layer;
    layer.delta_in.assign(mesh.vertex_count(), 0.0);
    layer.delta_out.assign(mesh.vertex_count(), 0.0);
    for (const VertexShiftRecord& r : shifts) {
        if (r.vertex >= mesh.vertex_count())
            fail(Err::ShiftLengthMismatch, "record for vertex " + std::to_string(r.vertex) +
                                               " outside mesh of " +
                                               std::to_string(mesh.vertex_count()));
        layer.delta_in[r.vertex] = r.delta_in;
        layer.delta_out[r.vertex] = r.delta_out;
    }
    layer.cells.reserve(mesh.face_count());
    for (uint32_t f = 0; f < mesh.face_count(); ++f)
        layer.cells.push_back(make_cell(mesh, f, layer.delta_in, layer.delta_out));
    return layer;
}

bool point_in_cell(const Vec3& p, const PrismaticCell& cell, double tol) {
    if (cell.volume <= 0.0)
        fail(Err::DegenerateCell, "cell on face " + std::to_string(cell.face) + " has zero volume");
    const auto& c = cell.corners;
    for (const auto& t : kTets)
        if (point_in_tet(p, c[t[0]], c[t[1]], c[t[2]], c[t[3]], tol)) return true;
    return false;
}

Vec3 contract_point(const Vec3& p, const ContractionParams& params) {
    if (params.radius <= 0) fail(Err::NonPositiveInput, "contraction radius must be positive");
    Vec3 d = p - params.center;
    double r = d.norm();
    if (r <= params.radius) return p;
    return params.center + params.radius * (2.0 - params.radius / r) * (d / r);
}

double contracted_cell_volume(const PrismaticCell& cell, const ContractionParams& params) {
    std::array<Vec3, 6> c;
    for (int i = 0; i < 6; ++i) c[i] = contract_point(cell.corners[i], params);
    return cell_volume(c);
}

ContractionParams contraction_from_positions(const std::vector<Vec3>& camera_positions) {
    if (camera_positions.empty()) fail(Err::NonPositiveInput, "no camera positions");
    Vec3 lo = camera_positions[0], hi = lo;
    for (const Vec3& p : camera_positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    ContractionParams params;
    params.center = 0.5 * (lo + hi);
    params.radius = 0.5 * (hi - lo).norm();
    if (params.radius <= 0)
        fail(Err::NonPositiveInput, "camera positions have zero bounding-box diagonal");
    return params;
}

ContractionParams contraction_from_mesh(const TriMesh& mesh) {
    if (mesh.vertices.empty()) fail(Err::NonPositiveInput, "empty mesh");
    Vec3 lo, hi;
    mesh.bounding_box(lo, hi);
    ContractionParams params;
    params.center = Vec3::Zero();
    for (const Vec3& v : mesh.vertices) params.center += v;
    params.center /= static_cast<double>(mesh.vertices.size());
    params.radius = 0.5 * (hi - lo).norm();
    if (params.radius <= 0) params.radius = 1.0;  // single point; any positive ball works
    return params;
}

}  // namespace frosting
