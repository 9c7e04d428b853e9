#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "frosting/io.hpp"

namespace frosting {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0";
constexpr char kOptMagic[8] = {'F', 'R', 'O', 'S', 'T', 'O', 'P', 'T'};

void put_f32(std::ostream& out, double v) {
    float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
}

void put_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

class BinReader {
  public:
    BinReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) fail(Err::IoFailure, "cannot open " + path.string());
        in_.seekg(0, std::ios::end);
        size_ = std::size_t(in_.tellg());
        in_.seekg(0);
    }

    std::size_t size() const { return size_; }

    float f32() {
        float v;
        take(reinterpret_cast<char*>(&v), 4);
        return v;
    }

    uint32_t u32() {
        uint32_t v;
        take(reinterpret_cast<char*>(&v), 4);
        return v;
    }

    int64_t i64() {
        int64_t v;
        take(reinterpret_cast<char*>(&v), 8);
        return v;
    }

    void take(char* dst, std::size_t n) {
        in_.read(dst, std::streamsize(n));
        if (!in_)
            fail(Err::CorruptPackage,
                 path_.string() + " truncated at byte " + std::to_string(offset_));
        offset_ += n;
    }

  private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t size_ = 0, offset_ = 0;
};

}  // namespace

void store_package(const std::filesystem::path& dir, const FrostingScene& scene) {
    scene.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(Err::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

    json manifest;
    manifest["version"] = kVersion;
    manifest["vertex_count"] = scene.mesh.vertex_count();
    manifest["face_count"] = scene.mesh.face_count();
    manifest["gaussian_count"] = scene.gaussians.size();
    manifest["sh_degree"] = scene.sh_degree;
    manifest["background"] = {scene.background[0], scene.background[1], scene.background[2]};
    manifest["contraction"] = {
        {"center", {scene.contraction.center[0], scene.contraction.center[1],
                    scene.contraction.center[2]}},
        {"radius", scene.contraction.radius}};
    manifest["seed"] = scene.seed;
    {
        std::ofstream out(dir / "manifest.json");
        if (!out) fail(Err::IoFailure, "cannot write manifest.json");
        out << manifest.dump(2) << "\n";
    }

    write_obj(dir / "mesh.obj", scene.mesh);

    {
        std::ofstream out(dir / "layer.bin", std::ios::binary);
        if (!out) fail(Err::IoFailure, "cannot write layer.bin");
        for (std::size_t i = 0; i < scene.layer.delta_in.size(); ++i) {
            put_f32(out, scene.layer.delta_in[i]);
            put_f32(out, scene.layer.delta_out[i]);
        }
        if (!out) fail(Err::IoFailure, "write failed for layer.bin");
    }

    {
        std::ofstream out(dir / "gaussians.bin", std::ios::binary);
        if (!out) fail(Err::IoFailure, "cannot write gaussians.bin");
        for (const FrostedGaussian& g : scene.gaussians) {
            put_u32(out, g.cell);
            for (double v : g.bary_logits) put_f32(out, v);
            for (int i = 0; i < 3; ++i) put_f32(out, g.log_scales[i]);
            put_f32(out, g.rotation.w);
            put_f32(out, g.rotation.x);
            put_f32(out, g.rotation.y);
            put_f32(out, g.rotation.z);
            put_f32(out, g.opacity_logit);
            put_f32(out, g.residual_rotation.w);
            put_f32(out, g.residual_rotation.x);
            put_f32(out, g.residual_rotation.y);
            put_f32(out, g.residual_rotation.z);
            for (double v : g.sh) put_f32(out, v);
        }
        if (!out) fail(Err::IoFailure, "write failed for gaussians.bin");
    }
}

FrostingScene load_package(const std::filesystem::path& dir) {
    std::ifstream min(dir / "manifest.json");
    if (!min) fail(Err::IoFailure, "cannot open " + (dir / "manifest.json").string());
    json manifest;
    try {
        manifest = json::parse(min);
    } catch (const json::parse_error& e) {
        fail(Err::CorruptPackage, (dir / "manifest.json").string() + ": " + e.what());
    }

    if (!manifest.contains("version") || !manifest["version"].is_string())
        fail(Err::CorruptPackage, "manifest missing version string");
    std::string version = manifest["version"].get<std::string>();
    if (version.rfind("1.", 0) != 0)
        fail(Err::VersionError, "package version " + version + " is newer than supported " +
                                    kVersion + "; upgrade this tool to read it");
    for (const char* key : {"vertex_count", "face_count", "gaussian_count", "sh_degree"})
        if (!manifest.contains(key)) fail(Err::CorruptPackage, std::string("manifest missing ") + key);

    FrostingScene scene;
    scene.sh_degree = manifest["sh_degree"].get<int>();
    if (scene.sh_degree < 0 || scene.sh_degree > 3)
        fail(Err::CorruptPackage, "sh_degree " + std::to_string(scene.sh_degree));
    if (manifest.contains("background"))
        for (int i = 0; i < 3; ++i) scene.background[i] = manifest["background"][i].get<double>();
    if (manifest.contains("contraction")) {
        for (int i = 0; i < 3; ++i)
            scene.contraction.center[i] = manifest["contraction"]["center"][i].get<double>();
        scene.contraction.radius = manifest["contraction"]["radius"].get<double>();
    }
    scene.seed = manifest.value("seed", uint64_t(0));

    const std::size_t nvert = manifest["vertex_count"].get<std::size_t>();
    const std::size_t nface = manifest["face_count"].get<std::size_t>();
    const std::size_t ngauss = manifest["gaussian_count"].get<std::size_t>();

    scene.mesh = read_obj(dir / "mesh.obj");
    if (scene.mesh.vertex_count() != nvert || scene.mesh.face_count() != nface)
        fail(Err::CorruptPackage, "manifest says " + std::to_string(nvert) + " vertices / " +
                                      std::to_string(nface) + " faces, mesh.obj has " +
                                      std::to_string(scene.mesh.vertex_count()) + " / " +
                                      std::to_string(scene.mesh.face_count()));

    {
        BinReader in(dir / "layer.bin");
        if (in.size() != nvert * 8)
            fail(Err::CorruptPackage, "layer.bin holds " + std::to_string(in.size() / 8) +
                                          " records for " + std::to_string(nvert) + " vertices");
        scene.layer.delta_in.resize(nvert);
        scene.layer.delta_out.resize(nvert);
        for (std::size_t i = 0; i < nvert; ++i) {
            scene.layer.delta_in[i] = in.f32();
            scene.layer.delta_out[i] = in.f32();
        }
    }
    scene.layer.cells.reserve(nface);
    for (uint32_t f = 0; f < nface; ++f)
        scene.layer.cells.push_back(
            make_cell(scene.mesh, f, scene.layer.delta_in, scene.layer.delta_out));

    {
        BinReader in(dir / "gaussians.bin");
        const std::size_t shsize = std::size_t(sh_coeff_count(scene.sh_degree)) * 3;
        const std::size_t stride = 4 + 4 * (6 + 3 + 4 + 1 + 4 + shsize);
        if (in.size() != ngauss * stride)
            fail(Err::CorruptPackage,
                 "gaussians.bin is " + std::to_string(in.size()) + " bytes, manifest implies " +
                     std::to_string(ngauss * stride));
        scene.gaussians.resize(ngauss);
        for (FrostedGaussian& g : scene.gaussians) {
            g.cell = in.u32();
            for (double& v : g.bary_logits) v = in.f32();
            for (int i = 0; i < 3; ++i) g.log_scales[i] = in.f32();
            g.rotation.w = in.f32();
            g.rotation.x = in.f32();
            g.rotation.y = in.f32();
            g.rotation.z = in.f32();
            g.opacity_logit = in.f32();
            g.residual_rotation.w = in.f32();
            g.residual_rotation.x = in.f32();
            g.residual_rotation.y = in.f32();
            g.residual_rotation.z = in.f32();
            g.sh.resize(shsize);
            for (double& v : g.sh) v = in.f32();
        }
    }
    scene.validate();
    return scene;
}

void store_optimizer_state(const std::filesystem::path& file, const OptimizerState& state) {
    if (state.m.size() != state.v.size())
        fail(Err::SizeMismatch, "moment vectors differ in length");
    std::ofstream out(file, std::ios::binary);
    if (!out) fail(Err::IoFailure, "cannot write " + file.string());
    out.write(kOptMagic, 8);
    put_u32(out, 1);  // format version
    int64_t step = state.step;
    out.write(reinterpret_cast<const char*>(&step), 8);
    put_u32(out, uint32_t(state.m.size()));
    auto put_grad = [&](const GaussianGrad& g) {
        for (double v : g.bary_logits) put_f32(out, v);
        for (int i = 0; i < 3; ++i) put_f32(out, g.log_scales[i]);
        for (int i = 0; i < 4; ++i) put_f32(out, g.rotation[i]);
        put_f32(out, g.opacity_logit);
        put_u32(out, uint32_t(g.sh.size()));
        for (double v : g.sh) put_f32(out, v);
    };
    for (const GaussianGrad& g : state.m) put_grad(g);
    for (const GaussianGrad& g : state.v) put_grad(g);
    if (!out) fail(Err::IoFailure, "write failed for " + file.string());
}

OptimizerState load_optimizer_state(const std::filesystem::path& file, int sh_degree) {
    BinReader in(file);
    char magic[8];
    in.take(magic, 8);
    if (std::memcmp(magic, kOptMagic, 8) != 0)
        fail(Err::CorruptPackage, file.string() + " is not an optimizer state file");
    uint32_t version = in.u32();
    if (version != 1)
        fail(Err::VersionError, "optimizer state version " + std::to_string(version) +
                                    " is newer than supported 1");
    OptimizerState state;
    state.step = in.i64();
    uint32_t count = in.u32();
    const std::size_t shsize = std::size_t(sh_coeff_count(sh_degree)) * 3;
    auto get_grad = [&]() {
        GaussianGrad g;
        for (double& v : g.bary_logits) v = in.f32();
        for (int i = 0; i < 3; ++i) g.log_scales[i] = in.f32();
        for (int i = 0; i < 4; ++i) g.rotation[i] = in.f32();
        g.opacity_logit = in.f32();
        uint32_t sh = in.u32();
        if (sh != shsize)
            fail(Err::CorruptPackage, "state has " + std::to_string(sh) +
                                          " SH moments per Gaussian, scene needs " +
                                          std::to_string(shsize));
        g.sh.resize(sh);
        for (double& v : g.sh) v = in.f32();
        return g;
    };
    state.m.reserve(count);
    state.v.reserve(count);
    for (uint32_t i = 0; i < count; ++i) state.m.push_back(get_grad());
    for (uint32_t i = 0; i < count; ++i) state.v.push_back(get_grad());
    return state;
}

}  // namespace frosting
