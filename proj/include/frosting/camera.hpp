#pragma once

#include "frosting/math.hpp"

namespace frosting {

// Pinhole camera, world-to-camera convention with +z forward:
// x_cam = rot * x_world + trans.
struct Camera {
    Mat3 rot = Mat3::Identity();
    Vec3 trans = Vec3::Zero();
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
    double near = 0.01;

    Vec3 position() const { return -rot.transpose() * trans; }
    Vec3 to_camera(const Vec3& p) const { return rot * p + trans; }
};

// Convert an OpenGL-style camera-to-world matrix (camera looks along -z,
// y up) into the +z-forward world-to-camera pair used here.
void camera_from_gl_c2w(const Mat4& c2w, Camera& cam);
Mat4 camera_to_gl_c2w(const Camera& cam);

}  // namespace frosting
