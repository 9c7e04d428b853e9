#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "frosting/io.hpp"

namespace frosting {

using nlohmann::json;

std::vector<Camera> read_cameras(const std::filesystem::path& path,
                                 std::vector<std::string>* names) {
    std::ifstream in(path);
    if (!in) fail(Err::IoFailure, "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Err::SchemaError, path.string() + ": " + e.what());
    }

    if (!doc.contains("camera_angle_x"))
        fail(Err::SchemaError, path.string() + ": missing camera_angle_x");
    if (!doc.contains("frames") || !doc["frames"].is_array())
        fail(Err::SchemaError, path.string() + ": missing frames array");
    double angle_x = doc["camera_angle_x"].get<double>();
    if (!(angle_x > 0.0) || !(angle_x < 3.141592653589793))
        fail(Err::SchemaError, "camera_angle_x " + std::to_string(angle_x) + " outside (0, pi)");

    std::vector<Camera> cams;
    if (names) names->clear();
    std::size_t fi = 0;
    for (const json& frame : doc["frames"]) {
        if (!frame.contains("transform_matrix"))
            fail(Err::SchemaError, "frame " + std::to_string(fi) + ": missing transform_matrix");
        const json& tm = frame["transform_matrix"];
        if (!tm.is_array() || tm.size() != 4)
            fail(Err::SchemaError, "frame " + std::to_string(fi) + ": transform_matrix not 4x4");
        Mat4 c2w;
        for (int r = 0; r < 4; ++r) {
            if (!tm[r].is_array() || tm[r].size() != 4)
                fail(Err::SchemaError,
                     "frame " + std::to_string(fi) + ": transform_matrix not 4x4");
            for (int c = 0; c < 4; ++c) c2w(r, c) = tm[r][c].get<double>();
        }
        Camera cam;
        cam.width = frame.value("w", 800);
        cam.height = frame.value("h", 800);
        if (cam.width < 1 || cam.height < 1)
            fail(Err::SchemaError, "frame " + std::to_string(fi) + ": bad image size");
        cam.fx = 0.5 * cam.width / std::tan(0.5 * angle_x);
        cam.fy = cam.fx;
        cam.cx = 0.5 * cam.width;
        cam.cy = 0.5 * cam.height;
        camera_from_gl_c2w(c2w, cam);
        cams.push_back(cam);
        if (names) {
            std::string file = frame.value("file_path", "");
            names->push_back(file.empty() ? "r_" + std::to_string(fi)
                                          : std::filesystem::path(file).stem().string());
        }
        ++fi;
    }
    return cams;
}

void write_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras,
                   const std::vector<std::string>* names) {
    if (cameras.empty()) fail(Err::NonPositiveInput, "no cameras to write");
    json doc;
    doc["camera_angle_x"] = 2.0 * std::atan(0.5 * cameras[0].width / cameras[0].fx);
    doc["frames"] = json::array();
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        const Camera& cam = cameras[i];
        Mat4 c2w = camera_to_gl_c2w(cam);
        json rows = json::array();
        for (int r = 0; r < 4; ++r) {
            json row = json::array();
            for (int c = 0; c < 4; ++c) row.push_back(c2w(r, c));
            rows.push_back(row);
        }
        json frame;
        frame["file_path"] =
            "./" + (names && i < names->size() ? (*names)[i] : "r_" + std::to_string(i));
        frame["transform_matrix"] = rows;
        frame["w"] = cam.width;
        frame["h"] = cam.height;
        doc["frames"].push_back(frame);
    }
    std::ofstream out(path);
    if (!out) fail(Err::IoFailure, "cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) fail(Err::IoFailure, "write failed for " + path.string());
}

}  // namespace frosting
