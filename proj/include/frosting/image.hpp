#pragma once

#include <vector>

#include "frosting/math.hpp"

namespace frosting {

// Row-major RGB image with values in [0, 1].
struct Image {
    int width = 0, height = 0;
    std::vector<double> data;  // (y * width + x) * 3 + channel

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

}  // namespace frosting
