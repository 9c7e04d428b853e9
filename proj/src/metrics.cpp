#include "frosting/metrics.hpp"

#include <array>
#include <cmath>

#include "frosting/errors.hpp"

namespace frosting {

namespace {

void check_same_size(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        fail(Err::SizeMismatch, "images are " + std::to_string(a.width) + "x" +
                                    std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                    "x" + std::to_string(b.height));
}

constexpr int kWin = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& window1d() {
    static const std::array<double, kWin> w = [] {
        std::array<double, kWin> g{};
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            g[i] = std::exp(-0.5 * sqr((i - kWin / 2) / 1.5));
            sum += g[i];
        }
        for (double& v : g) v /= sum;
        return g;
    }();
    return w;
}

struct Plane {
    int w = 0, h = 0;
    std::vector<double> v;
    Plane() = default;
    Plane(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_) * h_, 0.0) {}
    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane channel_plane(const Image& img, int c) {
    Plane p(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) p.at(x, y) = img.at(x, y, c);
    return p;
}

// Separable correlation keeping fully covered positions: (w, h) -> (w-10, h-10).
Plane valid_conv(const Plane& in) {
    const auto& g = window1d();
    Plane mid(in.w - kWin + 1, in.h);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < mid.w; ++x) {
            double s = 0.0;
            for (int t = 0; t < kWin; ++t) s += g[t] * in.at(x + t, y);
            mid.at(x, y) = s;
        }
    Plane out(mid.w, in.h - kWin + 1);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            double s = 0.0;
            for (int t = 0; t < kWin; ++t) s += g[t] * mid.at(x, y + t);
            out.at(x, y) = s;
        }
    return out;
}

// Adjoint of valid_conv: spreads a coefficient field back over every pixel its
// windows touched, (w, h) -> (w+10, h+10).
Plane spread_conv(const Plane& in) {
    const auto& g = window1d();
    Plane mid(in.w + kWin - 1, in.h);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < mid.w; ++x) {
            double s = 0.0;
            int i0 = std::max(0, x - kWin + 1), i1 = std::min(in.w - 1, x);
            for (int i = i0; i <= i1; ++i) s += g[x - i] * in.at(i, y);
            mid.at(x, y) = s;
        }
    Plane out(mid.w, in.h + kWin - 1);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            double s = 0.0;
            int i0 = std::max(0, y - kWin + 1), i1 = std::min(in.h - 1, y);
            for (int i = i0; i <= i1; ++i) s += g[y - i] * mid.at(x, i);
            out.at(x, y) = s;
        }
    return out;
}

Plane product(const Plane& a, const Plane& b) {
    Plane out(a.w, a.h);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    check_same_size(a, b);
    if (a.data.empty()) fail(Err::SizeMismatch, "empty images");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) mse += sqr(a.data[i] - b.data[i]);
    mse /= double(a.data.size());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, Image* grad_wrt_a) {
    check_same_size(a, b);
    if (a.width < kWin || a.height < kWin)
        fail(Err::SizeMismatch, "ssim needs at least " + std::to_string(kWin) + "x" +
                                    std::to_string(kWin) + ", got " + std::to_string(a.width) +
                                    "x" + std::to_string(a.height));
    if (grad_wrt_a) *grad_wrt_a = Image(a.width, a.height);

    double total = 0.0;
    std::size_t terms = 0;
    for (int c = 0; c < 3; ++c) {
        Plane pa = channel_plane(a, c), pb = channel_plane(b, c);
        Plane mu_a = valid_conv(pa), mu_b = valid_conv(pb);
        Plane m_aa = valid_conv(product(pa, pa));
        Plane m_bb = valid_conv(product(pb, pb));
        Plane m_ab = valid_conv(product(pa, pb));

        Plane f_mu(mu_a.w, mu_a.h), f_aa(mu_a.w, mu_a.h), f_ab(mu_a.w, mu_a.h);
        for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
            double ma = mu_a.v[i], mb = mu_b.v[i];
            double va = m_aa.v[i] - ma * ma;
            double vb = m_bb.v[i] - mb * mb;
            double cab = m_ab.v[i] - ma * mb;
            double n1 = 2.0 * ma * mb + kC1, d1 = ma * ma + mb * mb + kC1;
            double n2 = 2.0 * cab + kC2, d2 = va + vb + kC2;
            double s = (n1 * n2) / (d1 * d2);
            total += s;
            ++terms;
            if (grad_wrt_a) {
                f_aa.v[i] = -s / d2;
                f_ab.v[i] = 2.0 * n1 / (d1 * d2);
                f_mu.v[i] = 2.0 * mb * n2 / (d1 * d2) - 2.0 * s * ma / d1 -
                            2.0 * ma * f_aa.v[i] - mb * f_ab.v[i];
            }
        }
        if (grad_wrt_a) {
            Plane s_mu = spread_conv(f_mu), s_aa = spread_conv(f_aa), s_ab = spread_conv(f_ab);
            double norm = 1.0 / (double(mu_a.v.size()) * 3.0);
            for (int y = 0; y < a.height; ++y)
                for (int x = 0; x < a.width; ++x)
                    grad_wrt_a->at(x, y, c) =
                        norm * (s_mu.at(x, y) + 2.0 * pa.at(x, y) * s_aa.at(x, y) +
                                pb.at(x, y) * s_ab.at(x, y));
        }
    }
    return total / double(terms);
}

double rendering_loss(const Image& pred, const Image& gt, Image* grad_wrt_pred) {
    check_same_size(pred, gt);
    double l1 = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) l1 += std::abs(pred.data[i] - gt.data[i]);
    l1 /= double(pred.data.size());

    Image ssim_grad;
    double s = ssim(pred, gt, grad_wrt_pred ? &ssim_grad : nullptr);
    double loss = 0.8 * l1 + 0.1 * (1.0 - s);
    if (grad_wrt_pred) {
        *grad_wrt_pred = Image(pred.width, pred.height);
        double w1 = 0.8 / double(pred.data.size());
        for (std::size_t i = 0; i < pred.data.size(); ++i) {
            double d = pred.data[i] - gt.data[i];
            double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            grad_wrt_pred->data[i] = w1 * sign - 0.1 * ssim_grad.data[i];
        }
    }
    return loss;
}

}  // namespace frosting
