#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frosting/errors.hpp"
#include "frosting/math.hpp"

namespace frosting {

// Triangle mesh with derived per-vertex normals (area-weighted average of
// incident face normals). Face indices are validated and degenerate faces
// rejected at construction.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> faces;
    std::vector<Vec3> normals;  // unit length; +z for vertices with no faces

    TriMesh() = default;
    TriMesh(std::vector<Vec3> verts, std::vector<std::array<uint32_t, 3>> fcs);

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }

    Vec3 face_normal(std::size_t f) const;
    double face_area(std::size_t f) const;

    // Mean length of edges incident to each vertex; 0 for isolated vertices.
    std::vector<double> mean_incident_edge_lengths() const;

    void bounding_box(Vec3& lo, Vec3& hi) const;
};

}  // namespace frosting
