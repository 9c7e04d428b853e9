#pragma once

#include <filesystem>

#include "frosting/camera.hpp"
#include "frosting/gaussian.hpp"
#include "frosting/image.hpp"
#include "frosting/optimizer.hpp"
#include "frosting/scene.hpp"

namespace frosting {

// Splatting-ecosystem PLY: binary little-endian, float32 vertex properties
// x,y,z,nx,ny,nz,f_dc_0..2,f_rest_*,opacity,scale_0..2,rot_0..3. The SH rest
// block is channel-major on disk; in memory coefficients interleave as
// sh[k*3 + channel]. Degree comes from the f_rest count (0/9/24/45 -> 0..3).
GaussianCloud read_gaussian_ply(const std::filesystem::path& path);
void write_gaussian_ply(const std::filesystem::path& path, const GaussianCloud& cloud);

// Wavefront OBJ, v/f records only; n-gon faces triangulate as fans.
TriMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

// NeRF-synthetic-style JSON: camera_angle_x plus frames of OpenGL
// camera-to-world matrices; optional per-frame w/h (default 800). `names`
// receives each frame's file_path stem (or a frame index) for matching
// images on disk.
std::vector<Camera> read_cameras(const std::filesystem::path& path,
                                 std::vector<std::string>* names = nullptr);
void write_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras,
                   const std::vector<std::string>* names = nullptr);

// 8-bit RGB PNG; writing clamps to [0,1] and rounds half to even.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

// Package directory: manifest.json, mesh.obj, layer.bin (per-vertex
// delta_in/delta_out float32 pairs), gaussians.bin (cell u32, 6 logits,
// 3 log_scales, 4 quaternion, opacity, 4 residual quaternion, SH, float32).
// Cells are rebuilt from the mesh and shifts on load.
void store_package(const std::filesystem::path& dir, const FrostingScene& scene);
FrostingScene load_package(const std::filesystem::path& dir);

// Adam moments sidecar for resumable refinement.
void store_optimizer_state(const std::filesystem::path& file, const OptimizerState& state);
OptimizerState load_optimizer_state(const std::filesystem::path& file, int sh_degree);

}  // namespace frosting
