#include <cstdio>
#include <fstream>
#include <sstream>

#include "frosting/io.hpp"

namespace frosting {

TriMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Err::IoFailure, "cannot open " + path.string());

    std::vector<Vec3> verts;
    std::vector<std::array<uint32_t, 3>> faces;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        if (word == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z()))
                fail(Err::BadIndex, "line " + std::to_string(lineno) + ": malformed vertex");
            verts.push_back(v);
        } else if (word == "f") {
            std::vector<uint32_t> poly;
            std::string item;
            while (ls >> item) {
                // "i", "i/t", "i/t/n", "i//n" all start with the vertex index
                long v = 0;
                try {
                    v = std::stol(item.substr(0, item.find('/')));
                } catch (const std::exception&) {
                    fail(Err::BadIndex,
                         "line " + std::to_string(lineno) + ": bad face entry '" + item + "'");
                }
                if (v < 1 || std::size_t(v) > verts.size())
                    fail(Err::BadIndex, "line " + std::to_string(lineno) + ": vertex index " +
                                            std::to_string(v) + " outside 1.." +
                                            std::to_string(verts.size()));
                poly.push_back(uint32_t(v - 1));
            }
            if (poly.size() < 3)
                fail(Err::BadIndex,
                     "line " + std::to_string(lineno) + ": face with fewer than 3 vertices");
            for (std::size_t i = 2; i < poly.size(); ++i)
                faces.push_back({poly[0], poly[i - 1], poly[i]});
        }
        // vn/vt/materials/groups are ignored
    }
    return TriMesh(std::move(verts), std::move(faces));
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) fail(Err::IoFailure, "cannot write " + path.string());
    char buf[96];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    if (!out) fail(Err::IoFailure, "write failed for " + path.string());
}

}  // namespace frosting
