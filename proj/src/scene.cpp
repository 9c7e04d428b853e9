#include "frosting/scene.hpp"

namespace frosting {

void FrostingScene::validate() const {
    if (layer.delta_in.size() != mesh.vertex_count() ||
        layer.delta_out.size() != mesh.vertex_count())
        fail(Err::ShiftLengthMismatch, "layer shifts do not cover the mesh");
    if (layer.cells.size() != mesh.face_count())
        fail(Err::CorruptPackage, "layer has " + std::to_string(layer.cells.size()) +
                                      " cells for " + std::to_string(mesh.face_count()) +
                                      " faces");
    std::size_t want = static_cast<std::size_t>(sh_coeff_count(sh_degree)) * 3;
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        if (gaussians[i].cell >= layer.cells.size())
            fail(Err::BadCellIndex, "gaussian " + std::to_string(i) + " references cell " +
                                        std::to_string(gaussians[i].cell));
        if (gaussians[i].sh.size() != want)
            fail(Err::DegreeMismatch, "gaussian " + std::to_string(i) + " has " +
                                          std::to_string(gaussians[i].sh.size()) +
                                          " SH values, expected " + std::to_string(want));
    }
}

FrostingScene build_scene(const GaussianCloud& unconstrained, const GaussianCloud& regularized,
                          const TriMesh& mesh, const BuildConfig& cfg) {
    std::vector<VertexShiftRecord> shifts = compute_shifts(unconstrained, regularized, mesh,
                                                           cfg.thickness);
    shifts = grow_shifts(mesh, shifts, cfg.growth_steps);
    for (VertexShiftRecord& r : shifts) {
        // Storage is float32; quantizing now keeps the live scene identical
        // to its round-tripped package.
        r.delta_in = narrow_to_f32(r.delta_in);
        r.delta_out = narrow_to_f32(r.delta_out);
    }

    FrostingScene scene;
    scene.mesh = mesh;
    scene.layer = build_cells(mesh, shifts);
    scene.sh_degree = unconstrained.sh_degree;
    scene.background = cfg.background;
    scene.seed = cfg.sampling.seed;
    scene.contraction = cfg.sampling.contraction ? *cfg.sampling.contraction
                                                 : contraction_from_mesh(mesh);

    SamplingConfig sampling = cfg.sampling;
    sampling.contraction = scene.contraction;
    std::vector<SampledCenter> centers = sample_centers(scene.layer, sampling);
    scene.gaussians = initialize_gaussians(centers, scene.layer, unconstrained, sampling);
    return scene;
}

FrostingScene deform_scene(const FrostingScene& scene, const TriMesh& deformed_mesh) {
    if (deformed_mesh.vertex_count() != scene.mesh.vertex_count() ||
        deformed_mesh.face_count() != scene.mesh.face_count())
        fail(Err::ShiftLengthMismatch,
             "topology mismatch: " + std::to_string(scene.mesh.vertex_count()) + " vertices / " +
                 std::to_string(scene.mesh.face_count()) + " faces vs " +
                 std::to_string(deformed_mesh.vertex_count()) + " / " +
                 std::to_string(deformed_mesh.face_count()));
    for (std::size_t f = 0; f < scene.mesh.face_count(); ++f)
        if (scene.mesh.faces[f] != deformed_mesh.faces[f])
            fail(Err::ShiftLengthMismatch, "face " + std::to_string(f) + " indices differ");

    FrostingScene out = scene;
    out.mesh = deformed_mesh;
    out.layer.cells.clear();
    out.layer.cells.reserve(deformed_mesh.face_count());
    for (uint32_t f = 0; f < deformed_mesh.face_count(); ++f)
        out.layer.cells.push_back(
            make_cell(deformed_mesh, f, out.layer.delta_in, out.layer.delta_out));

    for (std::size_t i = 0; i < out.gaussians.size(); ++i)
        out.gaussians[i] = transfer_deformation(scene.gaussians[i],
                                                scene.layer.cells[out.gaussians[i].cell],
                                                out.layer.cells[out.gaussians[i].cell]);
    return out;
}

}  // namespace frosting
