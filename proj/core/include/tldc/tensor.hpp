#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tldc/errors.hpp"

namespace tldc {

namespace detail {

inline std::string shape_str(const std::vector<std::size_t>& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

inline std::size_t checked_volume(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw DimensionError("tensor shape must have at least one dimension");
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_str(shape));
        n *= d;
    }
    return n;
}

}  // namespace detail

// Dense row-major N-D array. float for training/inference; double
// instantiations back the finite-difference gradient checks.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(detail::checked_volume(shape_), T{}) {}

    TensorT(std::vector<std::size_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (detail::checked_volume(shape_) != data_.size())
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape " + detail::shape_str(shape_));
    }

    static TensorT full(std::vector<std::size_t> shape, T value) {
        TensorT t(std::move(shape));
        for (T& v : t.data_) v = value;
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const T& at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    T& at3(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const T& at3(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    T& at4(std::size_t n, std::size_t h, std::size_t w, std::size_t c) {
        return data_[((n * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
    }
    const T& at4(std::size_t n, std::size_t h, std::size_t w, std::size_t c) const {
        return data_[((n * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
    }

    bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }

    // New value with the same elements laid out under a different shape.
    TensorT reshaped(std::vector<std::size_t> shape) const {
        if (detail::checked_volume(shape) != data_.size())
            throw DimensionError("reshape " + detail::shape_str(shape_) + " -> " +
                                 detail::shape_str(shape) + " changes element count");
        return TensorT(std::move(shape), data_);
    }

    std::string shape_string() const { return detail::shape_str(shape_); }

private:
    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;

// Canonical image-batch layout: N x H x W x C, every field >= 1.
struct Shape4 {
    std::size_t n = 1, h = 1, w = 1, c = 1;

    Shape4() = default;
    Shape4(std::size_t n, std::size_t h, std::size_t w, std::size_t c) : n(n), h(h), w(w), c(c) {
        if (n == 0 || h == 0 || w == 0 || c == 0)
            throw DimensionError("Shape4 fields must all be >= 1");
    }

    template <typename T>
    static Shape4 of(const TensorT<T>& t) {
        if (t.rank() != 4)
            throw DimensionError("expected a 4-D tensor, got " + t.shape_string());
        return Shape4(t.dim(0), t.dim(1), t.dim(2), t.dim(3));
    }

    std::vector<std::size_t> vec() const { return {n, h, w, c}; }
    std::size_t volume() const { return n * h * w * c; }
};

template <typename T>
using EigenMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// c[i,j] = sum_k a[i,k] * b[k,j]
template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.rank() != 2 || b.rank() != 2)
        throw DimensionError("matmul requires rank-2 tensors, got " + a.shape_string() + " and " +
                             b.shape_string());
    if (a.dim(1) != b.dim(0))
        throw DimensionError("matmul: inner dimensions disagree: " + a.shape_string() + " vs " +
                             b.shape_string());
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    TensorT<T> out({m, n});
    Eigen::Map<const EigenMat<T>> ma(a.data(), static_cast<Eigen::Index>(m),
                                     static_cast<Eigen::Index>(k));
    Eigen::Map<const EigenMat<T>> mb(b.data(), static_cast<Eigen::Index>(k),
                                     static_cast<Eigen::Index>(n));
    Eigen::Map<EigenMat<T>> mc(out.data(), static_cast<Eigen::Index>(m),
                               static_cast<Eigen::Index>(n));
    mc.noalias() = ma * mb;
    return out;
}

// Unrolls 2x2 "same"-padded stride-1 receptive fields into rows.
// Output row ((n*H)+i)*W + j holds the window anchored at (i, j); the pad is
// on the bottom/right so out-of-bounds taps read 0. Column order is
// (di*2 + dj)*C + c, matching a [2,2,C,K] kernel flattened to [4C, K].
template <typename T>
TensorT<T> im2col(const TensorT<T>& x) {
    const Shape4 s = Shape4::of(x);
    TensorT<T> out({s.n * s.h * s.w, 4 * s.c});
    const T* in = x.data();
    T* o = out.data();
    const std::size_t row_len = 4 * s.c;
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t i = 0; i < s.h; ++i) {
            for (std::size_t j = 0; j < s.w; ++j) {
                T* row = o + ((n * s.h + i) * s.w + j) * row_len;
                for (std::size_t di = 0; di < 2; ++di) {
                    const std::size_t ii = i + di;
                    for (std::size_t dj = 0; dj < 2; ++dj) {
                        const std::size_t jj = j + dj;
                        T* dst = row + (di * 2 + dj) * s.c;
                        if (ii < s.h && jj < s.w) {
                            const T* src = in + ((n * s.h + ii) * s.w + jj) * s.c;
                            for (std::size_t c = 0; c < s.c; ++c) dst[c] = src[c];
                        } else {
                            for (std::size_t c = 0; c < s.c; ++c) dst[c] = T{};
                        }
                    }
                }
            }
        }
    }
    return out;
}

// Adjoint of im2col: scatter-adds column gradients back onto the input grid,
// dropping taps that fell on the bottom/right zero pad.
template <typename T>
TensorT<T> col2im(const TensorT<T>& cols, const Shape4& s) {
    if (cols.rank() != 2 || cols.dim(0) != s.n * s.h * s.w || cols.dim(1) != 4 * s.c)
        throw DimensionError("col2im: columns " + cols.shape_string() +
                             " do not match target shape");
    TensorT<T> out(s.vec());
    const T* src = cols.data();
    T* o = out.data();
    const std::size_t row_len = 4 * s.c;
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t i = 0; i < s.h; ++i) {
            for (std::size_t j = 0; j < s.w; ++j) {
                const T* row = src + ((n * s.h + i) * s.w + j) * row_len;
                for (std::size_t di = 0; di < 2; ++di) {
                    const std::size_t ii = i + di;
                    if (ii >= s.h) continue;
                    for (std::size_t dj = 0; dj < 2; ++dj) {
                        const std::size_t jj = j + dj;
                        if (jj >= s.w) continue;
                        const T* from = row + (di * 2 + dj) * s.c;
                        T* dst = o + ((n * s.h + ii) * s.w + jj) * s.c;
                        for (std::size_t c = 0; c < s.c; ++c) dst[c] += from[c];
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace tldc
