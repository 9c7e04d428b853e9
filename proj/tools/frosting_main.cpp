#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frosting/depth_advisor.hpp"
#include "frosting/io.hpp"
#include "frosting/metrics.hpp"
#include "frosting/optimizer.hpp"
#include "frosting/parallel.hpp"
#include "frosting/render.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Args {
    std::string unconstrained, regularized, mesh, pkg, cameras, images, pred, gt, out;
    std::string deformed_mesh;
    double gamma = 100.0;
    double lambda = 0.01;
    double k = 3.0;
    std::size_t budget = 100000;
    int growth_steps = 10;
    int iters = 2000;
    uint64_t seed = 0;
    std::vector<double> background{0.0, 0.0, 0.0};
};

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

int run_depth(const Args& a) {
    frosting::GaussianCloud cloud = frosting::read_gaussian_ply(a.regularized);
    frosting::DepthAdvice advice = frosting::advise_depth(cloud, a.gamma);
    emit(json{{"cs", advice.complexity_score},
              {"L", advice.box_edge},
              {"gamma", advice.gamma},
              {"depth", advice.depth}});
    return 0;
}

int run_build(const Args& a) {
    frosting::GaussianCloud unconstrained = frosting::read_gaussian_ply(a.unconstrained);
    frosting::GaussianCloud regularized = frosting::read_gaussian_ply(a.regularized);
    frosting::TriMesh mesh = frosting::read_obj(a.mesh);

    frosting::BuildConfig cfg;
    cfg.thickness.lambda = a.lambda;
    cfg.thickness.k = a.k;
    cfg.sampling.budget = a.budget;
    cfg.sampling.seed = a.seed;
    cfg.growth_steps = a.growth_steps;
    cfg.background = frosting::Vec3(a.background[0], a.background[1], a.background[2]);
    if (!a.cameras.empty()) {
        std::vector<frosting::Camera> cams = frosting::read_cameras(a.cameras);
        std::vector<frosting::Vec3> positions;
        for (const frosting::Camera& c : cams) positions.push_back(c.position());
        cfg.sampling.contraction = frosting::contraction_from_positions(positions);
    }

    frosting::FrostingScene scene = frosting::build_scene(unconstrained, regularized, mesh, cfg);
    frosting::store_package(a.out, scene);
    emit(json{{"out", a.out},
              {"gaussians", scene.gaussians.size()},
              {"cells", scene.layer.cells.size()},
              {"vertices", scene.mesh.vertex_count()},
              {"sh_degree", scene.sh_degree},
              {"seed", scene.seed}});
    return 0;
}

int run_render(const Args& a) {
    frosting::FrostingScene scene = frosting::load_package(a.pkg);
    std::vector<std::string> names;
    std::vector<frosting::Camera> cams = frosting::read_cameras(a.cameras, &names);
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) frosting::fail(frosting::Err::IoFailure, "cannot create " + a.out);
    json files = json::array();
    for (std::size_t i = 0; i < cams.size(); ++i) {
        frosting::Image img = frosting::render(scene, cams[i]);
        fs::path file = fs::path(a.out) / (names[i] + ".png");
        frosting::write_png(file, img);
        files.push_back(file.string());
        std::cerr << "[render] " << file.string() << "\n";
    }
    emit(json{{"images", cams.size()}, {"files", files}});
    return 0;
}

int run_optimize(const Args& a) {
    frosting::FrostingScene scene = frosting::load_package(a.pkg);
    std::vector<std::string> names;
    std::vector<frosting::Camera> cams = frosting::read_cameras(a.cameras, &names);
    std::vector<frosting::Image> images;
    for (const std::string& name : names)
        images.push_back(frosting::read_png(fs::path(a.images) / (name + ".png")));

    frosting::OptimizerConfig cfg;
    cfg.iterations = a.iters;
    cfg.seed = a.seed;
    frosting::OptimizeStats stats;
    frosting::OptimizerState state;
    fs::path old_state = fs::path(a.pkg) / "optimizer_state.bin";
    if (fs::exists(old_state)) {
        state = frosting::load_optimizer_state(old_state, scene.sh_degree);
        std::cerr << "[optimize] resuming from step " << state.step << "\n";
    }

    frosting::FrostingScene refined =
        frosting::optimize(std::move(scene), cams, images, cfg, &stats, &state);
    frosting::store_package(a.out, refined);
    frosting::store_optimizer_state(fs::path(a.out) / "optimizer_state.bin", state);
    emit(json{{"out", a.out},
              {"steps", stats.losses.size()},
              {"loss_first", stats.losses.empty() ? 0.0 : stats.losses.front()},
              {"loss_last", stats.losses.empty() ? 0.0 : stats.losses.back()},
              {"ema_first", stats.ema_first},
              {"ema_last", stats.ema_last}});
    return 0;
}

int run_deform(const Args& a) {
    frosting::FrostingScene scene = frosting::load_package(a.pkg);
    frosting::TriMesh deformed = frosting::read_obj(a.deformed_mesh);
    frosting::FrostingScene out = frosting::deform_scene(scene, deformed);
    frosting::store_package(a.out, out);
    emit(json{{"out", a.out}, {"gaussians", out.gaussians.size()}});
    return 0;
}

int run_metrics(const Args& a) {
    std::vector<fs::path> preds;
    for (const auto& entry : fs::directory_iterator(a.pred))
        if (entry.path().extension() == ".png") preds.push_back(entry.path());
    std::sort(preds.begin(), preds.end());
    if (preds.empty()) frosting::fail(frosting::Err::IoFailure, "no .png files in " + a.pred);

    json per_image = json::array();
    double psum = 0.0, ssum = 0.0;
    for (const fs::path& p : preds) {
        fs::path g = fs::path(a.gt) / p.filename();
        frosting::Image pred = frosting::read_png(p);
        frosting::Image gt = frosting::read_png(g);
        double ps = frosting::psnr(pred, gt);
        double ss = frosting::ssim(pred, gt);
        psum += ps;
        ssum += ss;
        per_image.push_back(json{{"name", p.filename().string()}, {"psnr", ps}, {"ssim", ss}});
    }
    emit(json{{"psnr", psum / double(preds.size())},
              {"ssim", ssum / double(preds.size())},
              {"count", preds.size()},
              {"per_image", per_image}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian frosting layers: build, render, refine, deform"};
    app.require_subcommand(1);
    app.fallthrough();

    Args a;
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (default: all cores)");

    CLI::App* depth = app.add_subcommand("depth", "suggest a meshing octree depth from a cloud");
    depth->add_option("--regularized", a.regularized, "regularized cloud (.ply)")->required();
    depth->add_option("--gamma", a.gamma, "complexity multiplier");

    CLI::App* build = app.add_subcommand("build", "construct a frosting package");
    build->add_option("--unconstrained", a.unconstrained, "unconstrained cloud (.ply)")->required();
    build->add_option("--regularized", a.regularized, "regularized cloud (.ply)")->required();
    build->add_option("--mesh", a.mesh, "base mesh (.obj)")->required();
    build->add_option("--out", a.out, "output package directory")->required();
    build->add_option("--lambda", a.lambda, "isosurface level");
    build->add_option("--k", a.k, "interval widening factor");
    build->add_option("--budget", a.budget, "number of Gaussians to sample");
    build->add_option("--growth-steps", a.growth_steps, "shift growth increments");
    build->add_option("--seed", a.seed, "sampling seed");
    build->add_option("--cameras", a.cameras, "cameras JSON for the contraction center");
    build->add_option("--background", a.background, "background RGB in [0,1]")->expected(3);

    CLI::App* render = app.add_subcommand("render", "render a package from cameras");
    render->add_option("--pkg", a.pkg, "package directory")->required();
    render->add_option("--cameras", a.cameras, "cameras JSON")->required();
    render->add_option("--out", a.out, "output image directory")->required();

    CLI::App* optimize = app.add_subcommand("optimize", "refine appearance against images");
    optimize->add_option("--pkg", a.pkg, "package directory")->required();
    optimize->add_option("--cameras", a.cameras, "cameras JSON")->required();
    optimize->add_option("--images", a.images, "ground-truth image directory")->required();
    optimize->add_option("--iters", a.iters, "refinement steps");
    optimize->add_option("--seed", a.seed, "camera-order seed");
    optimize->add_option("--out", a.out, "output package directory")->required();

    CLI::App* deform = app.add_subcommand("deform", "transfer a package to an edited mesh");
    deform->add_option("--pkg", a.pkg, "package directory")->required();
    deform->add_option("--deformed-mesh", a.deformed_mesh, "edited mesh (.obj)")->required();
    deform->add_option("--out", a.out, "output package directory")->required();

    CLI::App* metrics = app.add_subcommand("metrics", "compare two image directories");
    metrics->add_option("--pred", a.pred, "predicted image directory")->required();
    metrics->add_option("--gt", a.gt, "ground-truth image directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (const char* env = std::getenv("FROSTING_THREADS"); env && threads == 0)
        threads = std::atoi(env);
    if (threads > 0) frosting::set_thread_count(threads);

    try {
        if (app.got_subcommand(depth)) return run_depth(a);
        if (app.got_subcommand(build)) return run_build(a);
        if (app.got_subcommand(render)) return run_render(a);
        if (app.got_subcommand(optimize)) return run_optimize(a);
        if (app.got_subcommand(deform)) return run_deform(a);
        if (app.got_subcommand(metrics)) return run_metrics(a);
    } catch (const frosting::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
