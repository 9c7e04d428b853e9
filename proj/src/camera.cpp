#include "frosting/camera.hpp"

namespace frosting {

void camera_from_gl_c2w(const Mat4& c2w, Camera& cam) {
    Mat3 r_gl = c2w.topLeftCorner<3, 3>();
    Vec3 t = c2w.topRightCorner<3, 1>();
    // Flip the y and z camera axes: -z forward becomes +z forward.
    Mat3 flip = Vec3(1, -1, -1).asDiagonal();
    Mat3 r_c2w = r_gl * flip;
    cam.rot = r_c2w.transpose();
    cam.trans = -cam.rot * t;
}

Mat4 camera_to_gl_c2w(const Camera& cam) {
    Mat3 flip = Vec3(1, -1, -1).asDiagonal();
    Mat3 r_c2w = cam.rot.transpose() * flip;  // flip is its own inverse
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = r_c2w;
    m.topRightCorner<3, 1>() = cam.position();
    return m;
}

}  // namespace frosting
