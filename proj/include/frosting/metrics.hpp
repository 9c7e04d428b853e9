#pragma once

#include "frosting/image.hpp"

namespace frosting {

// 10 * log10(1 / MSE) over all pixels and channels, capped at 100 dB.
// Throws SizeMismatch when dimensions differ.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
// dynamic range 1, evaluated on fully covered windows only, averaged over
// positions and channels. Images must be at least 11x11. When grad_wrt_a is
// given it receives d(ssim)/d(a) at every pixel of a.
double ssim(const Image& a, const Image& b, Image* grad_wrt_a = nullptr);

// 0.8 * L1 + 0.2 * (1 - SSIM) / 2. The L1 subgradient at zero is taken as 0.
// Optional gradient with respect to pred.
double rendering_loss(const Image& pred, const Image& gt, Image* grad_wrt_pred = nullptr);

}  // namespace frosting
