#include "frosting/mesh.hpp"

#include <cmath>

namespace frosting {

TriMesh::TriMesh(std::vector<Vec3> verts, std::vector<std::array<uint32_t, 3>> fcs)
    : vertices(std::move(verts)), faces(std::move(fcs)) {
    std::size_t nv = vertices.size();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (uint32_t idx : faces[f]) {
            if (idx >= nv)
                fail(Err::BadIndex, "face " + std::to_string(f) + " references vertex " +
                                        std::to_string(idx) + " of " + std::to_string(nv));
        }
        if (face_area(f) < 1e-12)
            fail(Err::BadIndex, "face " + std::to_string(f) + " is degenerate (area below 1e-12)");
    }

    normals.assign(nv, Vec3::Zero());
    for (const auto& f : faces) {
        Vec3 e1 = vertices[f[1]] - vertices[f[0]];
        Vec3 e2 = vertices[f[2]] - vertices[f[0]];
        Vec3 weighted = 0.5 * e1.cross(e2);  // area-weighted face normal
        for (uint32_t v : f) normals[v] += weighted;
    }
    for (Vec3& n : normals) {
        double len = n.norm();
        n = len > 0 ? Vec3(n / len) : Vec3(0, 0, 1);
    }
}

Vec3 TriMesh::face_normal(std::size_t f) const {
    const auto& face = faces[f];
    Vec3 n = (vertices[face[1]] - vertices[face[0]]).cross(vertices[face[2]] - vertices[face[0]]);
    return n.normalized();
}

double TriMesh::face_area(std::size_t f) const {
    const auto& face = faces[f];
    return 0.5 *
           (vertices[face[1]] - vertices[face[0]]).cross(vertices[face[2]] - vertices[face[0]]).norm();
}

std::vector<double> TriMesh::mean_incident_edge_lengths() const {
    std::vector<double> sum(vertices.size(), 0.0);
    std::vector<int> count(vertices.size(), 0);
    for (const auto& f : faces) {
        for (int e = 0; e < 3; ++e) {
            uint32_t a = f[e], b = f[(e + 1) % 3];
            double len = (vertices[a] - vertices[b]).norm();
            // Each face contributes its three edges to both endpoints; shared
            // edges naturally count once per incident face, which is fine for
            // a local length scale.
            sum[a] += len;
            sum[b] += len;
            count[a]++;
            count[b]++;
        }
    }
    std::vector<double> mean(vertices.size(), 0.0);
    for (std::size_t v = 0; v < vertices.size(); ++v)
        if (count[v] > 0) mean[v] = sum[v] / count[v];
    return mean;
}

void TriMesh::bounding_box(Vec3& lo, Vec3& hi) const {
    if (vertices.empty()) {
        lo = hi = Vec3::Zero();
        return;
    }
    lo = hi = vertices[0];
    for (const Vec3& v : vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
}

}  // namespace frosting
