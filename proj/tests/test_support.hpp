#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tldc/tensor.hpp"

namespace testsup {

// ---------------------------------------------------------------- randomness

inline std::mt19937_64 rng_for(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

template <typename T>
tldc::TensorT<T> random_tensor(const std::vector<std::size_t>& shape,
                               std::mt19937_64& rng, T lo = T(-1),
                               T hi = T(1)) {
    tldc::TensorT<T> t(shape);
    std::uniform_real_distribution<double> dist(static_cast<double>(lo),
                                                static_cast<double>(hi));
    for (auto& v : t.raw()) v = static_cast<T>(dist(rng));
    return t;
}

// values kept away from 0 so a finite-difference step cannot cross the relu
// kink
template <typename T>
tldc::TensorT<T> random_tensor_no_kink(const std::vector<std::size_t>& shape,
                                       std::mt19937_64& rng, double margin) {
    tldc::TensorT<T> t(shape);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : t.raw()) {
        double x = dist(rng);
        while (std::fabs(x) < margin) x = dist(rng);
        v = static_cast<T>(x);
    }
    return t;
}

// every 2x2 pooling window gets pairwise-distinct values with a gap wide
// enough that a finite-difference step cannot change the argmax
template <typename T>
tldc::TensorT<T> random_tensor_pool_safe(std::size_t n, std::size_t h,
                                         std::size_t w, std::size_t c,
                                         std::mt19937_64& rng, double gap) {
    tldc::TensorT<T> t({n, h, w, c});
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i + 1 < h; i += 2) {
            for (std::size_t j = 0; j + 1 < w; j += 2) {
                for (std::size_t ch = 0; ch < c; ++ch) {
                    double v[4];
                    bool ok = false;
                    while (!ok) {
                        for (auto& x : v) x = dist(rng);
                        ok = true;
                        for (int a = 0; a < 4 && ok; ++a)
                            for (int bb = a + 1; bb < 4; ++bb)
                                if (std::fabs(v[a] - v[bb]) < gap) {
                                    ok = false;
                                    break;
                                }
                    }
                    t.at4(b, i, j, ch) = static_cast<T>(v[0]);
                    t.at4(b, i, j + 1, ch) = static_cast<T>(v[1]);
                    t.at4(b, i + 1, j, ch) = static_cast<T>(v[2]);
                    t.at4(b, i + 1, j + 1, ch) = static_cast<T>(v[3]);
                }
            }
        }
    }
    return t;
}

// ------------------------------------------------------------------- oracles

// plain triple loop, no blocking, no library calls
template <typename T>
tldc::TensorT<T> matmul_ref(const tldc::TensorT<T>& a,
                            const tldc::TensorT<T>& b) {
    const std::size_t m = a.shape()[0];
    const std::size_t k = a.shape()[1];
    const std::size_t n = b.shape()[1];
    tldc::TensorT<T> out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            T acc = T(0);
            for (std::size_t p = 0; p < k; ++p)
                acc += a.at2(i, p) * b.at2(p, j);
            out.at2(i, j) = acc;
        }
    return out;
}

// direct 2x2 stride-1 convolution; rows/cols past the input edge read 0,
// matching a pad of 0 on top/left and 1 on bottom/right
template <typename T>
tldc::TensorT<T> conv2d_ref(const tldc::TensorT<T>& x,
                            const tldc::TensorT<T>& w,
                            const tldc::TensorT<T>& bias) {
    const std::size_t n = x.shape()[0], h = x.shape()[1], ww = x.shape()[2],
                      c = x.shape()[3];
    const std::size_t k = w.shape()[3];
    tldc::TensorT<T> out({n, h, ww, k});
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < ww; ++j)
                for (std::size_t f = 0; f < k; ++f) {
                    T acc = bias.raw()[f];
                    for (std::size_t di = 0; di < 2; ++di)
                        for (std::size_t dj = 0; dj < 2; ++dj) {
                            if (i + di >= h || j + dj >= ww) continue;
                            for (std::size_t ch = 0; ch < c; ++ch)
                                acc += x.at4(b, i + di, j + dj, ch) *
                                       w.at4(di, dj, ch, f);
                        }
                    out.at4(b, i, j, f) = acc;
                }
    return out;
}

template <typename T>
tldc::TensorT<T> maxpool_ref(const tldc::TensorT<T>& x) {
    const std::size_t n = x.shape()[0], h = x.shape()[1], w = x.shape()[2],
                      c = x.shape()[3];
    tldc::TensorT<T> out({n, h / 2, w / 2, c});
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < h / 2; ++i)
            for (std::size_t j = 0; j < w / 2; ++j)
                for (std::size_t ch = 0; ch < c; ++ch) {
                    T best = x.at4(b, 2 * i, 2 * j, ch);
                    for (std::size_t di = 0; di < 2; ++di)
                        for (std::size_t dj = 0; dj < 2; ++dj)
                            best = std::max(best,
                                            x.at4(b, 2 * i + di, 2 * j + dj,
                                                  ch));
                    out.at4(b, i, j, ch) = best;
                }
    return out;
}

// central finite difference of a scalar function with respect to one entry
template <typename F>
double fd_central(F&& f, tldc::TensorT<double>& x, std::size_t i, double eps) {
    const double orig = x.raw()[i];
    x.raw()[i] = orig + eps;
    const double fp = f();
    x.raw()[i] = orig - eps;
    const double fm = f();
    x.raw()[i] = orig;
    return (fp - fm) / (2.0 * eps);
}

// |a - b| measured against max(1, |a|, |b|): relative for large values,
// absolute near zero
inline double grad_error(double analytic, double numeric) {
    double scale = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
    return std::fabs(analytic - numeric) / scale;
}

// ----------------------------------------------------------------- fixtures

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / (tag + "-" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir for " + tag);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

// deterministic class-distinctive test image: class 0 concentrates energy in
// the top-left quadrant, class 1 in the bottom-right, plus seeded noise
inline tldc::Tensor synth_leaf_image(std::size_t h, std::size_t w,
                                     int class_id, std::uint64_t seed) {
    tldc::Tensor img({h, w, 3});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> noise(0.0f, 0.25f);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            bool top_left = y < h / 2 && x < w / 2;
            bool bottom_right = y >= h / 2 && x >= w / 2;
            bool hot = class_id == 0 ? top_left : bottom_right;
            float base = hot ? 0.75f : 0.1f;
            img.at3(y, x, 0) = std::min(1.0f, base + noise(rng));
            img.at3(y, x, 1) = std::min(1.0f, 0.5f * base + noise(rng));
            img.at3(y, x, 2) = std::min(1.0f, 0.25f * base + noise(rng));
        }
    return img;
}

}  // namespace testsup
