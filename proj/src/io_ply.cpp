#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "frosting/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "file codecs assume a little-endian host");

namespace frosting {

namespace {

void write_f32(std::ostream& out, double v) {
    float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
}

}  // namespace

GaussianCloud read_gaussian_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::IoFailure, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != "ply")
        fail(Err::UnsupportedFormat, path.string() + " is not a PLY file");

    std::size_t vertex_count = 0;
    std::vector<std::string> props;
    bool in_vertex = false, saw_format = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment") continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "binary_little_endian")
                fail(Err::UnsupportedFormat, "format " + fmt + " (need binary_little_endian)");
            saw_format = true;
        } else if (word == "element") {
            std::string name;
            ls >> name >> vertex_count;
            if (name != "vertex")
                fail(Err::UnsupportedFormat, "leading element " + name + " (need vertex)");
            in_vertex = true;
        } else if (word == "property") {
            if (!in_vertex) fail(Err::UnsupportedFormat, "property before any element");
            std::string type, name;
            ls >> type >> name;
            if (type != "float")
                fail(Err::UnsupportedFormat, "property " + name + " has type " + type +
                                                 " (need float)");
            props.push_back(name);
        } else if (word == "end_header") {
            break;
        }
        if (in.eof()) fail(Err::UnsupportedFormat, "header without end_header");
    }
    if (!saw_format) fail(Err::UnsupportedFormat, "header missing format line");
    if (!in_vertex) fail(Err::UnsupportedFormat, "no vertex element");

    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < props.size(); ++i)
            if (props[i] == name) return i;
        fail(Err::MissingProperty, name);
    };

    std::size_t rest = 0;
    for (const std::string& p : props)
        if (p.rfind("f_rest_", 0) == 0) ++rest;
    int degree;
    switch (rest) {
        case 0: degree = 0; break;
        case 9: degree = 1; break;
        case 24: degree = 2; break;
        case 45: degree = 3; break;
        default: fail(Err::BadRestCount, std::to_string(rest) + " f_rest properties");
    }
    const std::size_t rest_per_channel = rest / 3;

    std::vector<std::size_t> idx;
    for (const char* name : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"})
        idx.push_back(index_of(name));
    std::vector<std::size_t> rest_idx(rest);
    for (std::size_t i = 0; i < rest; ++i)
        rest_idx[i] = index_of("f_rest_" + std::to_string(i));
    std::size_t i_opacity = index_of("opacity");
    std::size_t i_scale[3], i_rot[4];
    for (int i = 0; i < 3; ++i) i_scale[i] = index_of("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) i_rot[i] = index_of("rot_" + std::to_string(i));

    GaussianCloud cloud;
    cloud.sh_degree = degree;
    cloud.gaussians.resize(vertex_count);
    const int coeffs = sh_coeff_count(degree);
    const std::size_t data_start = std::size_t(in.tellg());
    std::vector<float> row(props.size());
    for (std::size_t g = 0; g < vertex_count; ++g) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * 4));
        if (!in)
            fail(Err::IoFailure, path.string() + " truncated at byte " +
                                     std::to_string(data_start + g * row.size() * 4 +
                                                    std::size_t(in.gcount())));
        Gaussian3D& gs = cloud.gaussians[g];
        gs.mean = Vec3(row[idx[0]], row[idx[1]], row[idx[2]]);
        gs.sh.assign(std::size_t(coeffs) * 3, 0.0);
        for (int c = 0; c < 3; ++c) gs.sh[c] = row[idx[6 + c]];
        for (int c = 0; c < 3; ++c)
            for (std::size_t m = 0; m < rest_per_channel; ++m)
                gs.sh[(1 + m) * 3 + c] = row[rest_idx[c * rest_per_channel + m]];
        gs.opacity_logit = row[i_opacity];
        gs.log_scales = Vec3(row[i_scale[0]], row[i_scale[1]], row[i_scale[2]]);
        gs.rotation = Quat{row[i_rot[0]], row[i_rot[1]], row[i_rot[2]], row[i_rot[3]]};
    }
    return cloud;
}

void write_gaussian_ply(const std::filesystem::path& path, const GaussianCloud& cloud) {
    cloud.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::IoFailure, "cannot write " + path.string());

    const int coeffs = sh_coeff_count(cloud.sh_degree);
    const int rest_per_channel = coeffs - 1;
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << cloud.gaussians.size() << "\n";
    for (const char* name : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"})
        out << "property float " << name << "\n";
    for (int i = 0; i < rest_per_channel * 3; ++i) out << "property float f_rest_" << i << "\n";
    out << "property float opacity\n";
    for (int i = 0; i < 3; ++i) out << "property float scale_" << i << "\n";
    for (int i = 0; i < 4; ++i) out << "property float rot_" << i << "\n";
    out << "end_header\n";

    for (const Gaussian3D& g : cloud.gaussians) {
        for (int i = 0; i < 3; ++i) write_f32(out, g.mean[i]);
        for (int i = 0; i < 3; ++i) write_f32(out, 0.0);  // normals unused
        for (int c = 0; c < 3; ++c) write_f32(out, g.sh[c]);
        for (int c = 0; c < 3; ++c)
            for (int m = 0; m < rest_per_channel; ++m) write_f32(out, g.sh[(1 + m) * 3 + c]);
        write_f32(out, g.opacity_logit);
        for (int i = 0; i < 3; ++i) write_f32(out, g.log_scales[i]);
        write_f32(out, g.rotation.w);
        write_f32(out, g.rotation.x);
        write_f32(out, g.rotation.y);
        write_f32(out, g.rotation.z);
    }
    if (!out) fail(Err::IoFailure, "write failed for " + path.string());
}

}  // namespace frosting
