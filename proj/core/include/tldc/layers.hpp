#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tldc/rng.hpp"
#include "tldc/tensor.hpp"

namespace tldc {

enum class Mode { Train, Infer };

// Per-forward context. `batch` keys the dropout masks so a step is
// reproducible from (seed, batch counter); `record` asks the layer to keep
// the caches backward needs (Train mode always records).
struct ForwardCtx {
    Mode mode = Mode::Infer;
    std::uint64_t batch = 0;
    bool record = false;

    bool recording() const { return record || mode == Mode::Train; }
};

// Uniform draw from [-r, r) with r = sqrt(6 / (fan_in + fan_out)).
template <typename T>
TensorT<T> glorot_uniform(std::vector<std::size_t> shape, std::size_t fan_in,
                          std::size_t fan_out, std::uint64_t seed) {
    if (fan_in == 0 || fan_out == 0)
        throw ParameterError("glorot init: fan_in and fan_out must be >= 1");
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    TensorT<T> w(std::move(shape));
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = static_cast<T>((2.0 * uniform_unit(rng) - 1.0) * r);
    return w;
}

template <typename T>
inline T glorot_bound(std::size_t fan_in, std::size_t fan_out) {
    if (fan_in == 0 || fan_out == 0)
        throw ParameterError("glorot init: fan_in and fan_out must be >= 1");
    return static_cast<T>(std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
}

template <typename T>
class LayerT {
public:
    virtual ~LayerT() = default;

    virtual std::string name() const = 0;
    virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
    virtual TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) = 0;
    // Returns the gradient w.r.t. the layer input; parameter gradients land
    // in grads(). Requires a recorded forward on the same batch.
    virtual TensorT<T> backward(const TensorT<T>& upstream) = 0;

    virtual std::vector<TensorT<T>*> params() { return {}; }
    virtual std::vector<TensorT<T>*> grads() { return {}; }
    virtual void clear_cache() {}

protected:
    void require_cache(bool have, const char* who) const {
        if (!have) throw StateError(std::string(who) + ": backward called without a recorded forward");
    }
};

// 2x2 kernel, stride 1, "same" padding (zeros on the bottom/right), so the
// spatial dimensions are preserved. Runs as im2col + GEMM; backward rebuilds
// the column matrix from the cached input instead of caching it.
template <typename T>
class Conv2dLayerT : public LayerT<T> {
public:
    Conv2dLayerT(std::size_t in_channels, std::size_t filters, std::uint64_t seed)
        : in_c_(in_channels), out_c_(filters),
          w_(glorot_uniform<T>({2, 2, in_channels, filters}, 4 * in_channels, 4 * filters, seed)),
          b_({filters}), dw_({2, 2, in_channels, filters}), db_({filters}) {}

    std::string name() const override { return "conv2d"; }

    std::size_t in_channels() const { return in_c_; }
    std::size_t filters() const { return out_c_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 4)
            throw DimensionError("conv2d expects [N,H,W,C] input, got " + detail::shape_str(in));
        if (in[3] != in_c_)
            throw DimensionError("conv2d: input has " + std::to_string(in[3]) +
                                 " channels, kernel expects " + std::to_string(in_c_));
        return {in[0], in[1], in[2], out_c_};
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        output_shape(x.shape());
        const Shape4 s = Shape4::of(x);
        TensorT<T> cols = im2col(x);
        TensorT<T> out = matmul(cols, w_.reshaped({4 * in_c_, out_c_}));
        T* o = out.data();
        const T* bias = b_.data();
        const std::size_t rows = out.dim(0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < out_c_; ++k) o[r * out_c_ + k] += bias[k];
        if (ctx.recording()) {
            in_cache_ = x;
            have_cache_ = true;
        }
        return out.reshaped({s.n, s.h, s.w, out_c_});
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "conv2d");
        const Shape4 s = Shape4::of(in_cache_);
        TensorT<T> up = upstream.reshaped({s.n * s.h * s.w, out_c_});
        TensorT<T> cols = im2col(in_cache_);

        // db[k] = sum over rows
        std::fill(db_.raw().begin(), db_.raw().end(), T{});
        const T* u = up.data();
        for (std::size_t r = 0; r < up.dim(0); ++r)
            for (std::size_t k = 0; k < out_c_; ++k) db_[k] += u[r * out_c_ + k];

        // dW = cols^T . upstream
        TensorT<T> cols_t({cols.dim(1), cols.dim(0)});
        for (std::size_t r = 0; r < cols.dim(0); ++r)
            for (std::size_t c = 0; c < cols.dim(1); ++c) cols_t.at2(c, r) = cols.at2(r, c);
        dw_ = matmul(cols_t, up).reshaped({2, 2, in_c_, out_c_});

        // dx = col2im(upstream . W^T)
        TensorT<T> w_t({out_c_, 4 * in_c_});
        TensorT<T> w2 = w_.reshaped({4 * in_c_, out_c_});
        for (std::size_t r = 0; r < w2.dim(0); ++r)
            for (std::size_t c = 0; c < w2.dim(1); ++c) w_t.at2(c, r) = w2.at2(r, c);
        return col2im(matmul(up, w_t), s);
    }

    std::vector<TensorT<T>*> params() override { return {&w_, &b_}; }
    std::vector<TensorT<T>*> grads() override { return {&dw_, &db_}; }
    void clear_cache() override { in_cache_ = TensorT<T>(); have_cache_ = false; }

    TensorT<T>& weights() { return w_; }
    TensorT<T>& bias() { return b_; }

private:
    std::size_t in_c_, out_c_;
    TensorT<T> w_, b_, dw_, db_;
    TensorT<T> in_cache_;
    bool have_cache_ = false;
};

// 2x2 window, stride 2; odd trailing row/column dropped. The argmax mask
// recorded on forward routes the upstream gradient to the winners.
template <typename T>
class MaxPool2dLayerT : public LayerT<T> {
public:
    std::string name() const override { return "maxpool2d"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 4)
            throw DimensionError("maxpool2d expects [N,H,W,C] input, got " + detail::shape_str(in));
        if (in[1] < 2 || in[2] < 2)
            throw DimensionError("maxpool2d requires H and W >= 2, got " + detail::shape_str(in));
        return {in[0], in[1] / 2, in[2] / 2, in[3]};
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        const auto out_shape = output_shape(x.shape());
        const Shape4 s = Shape4::of(x);
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        TensorT<T> out(out_shape);
        std::vector<std::size_t> mask(out.size());
        const T* in = x.data();
        T* o = out.data();
        std::size_t oi = 0;
        for (std::size_t n = 0; n < s.n; ++n) {
            for (std::size_t i = 0; i < oh; ++i) {
                for (std::size_t j = 0; j < ow; ++j) {
                    for (std::size_t c = 0; c < s.c; ++c, ++oi) {
                        std::size_t best = ((n * s.h + 2 * i) * s.w + 2 * j) * s.c + c;
                        T best_v = in[best];
                        for (std::size_t di = 0; di < 2; ++di) {
                            for (std::size_t dj = 0; dj < 2; ++dj) {
                                const std::size_t idx =
                                    ((n * s.h + 2 * i + di) * s.w + 2 * j + dj) * s.c + c;
                                if (in[idx] > best_v) {
                                    best_v = in[idx];
                                    best = idx;
                                }
                            }
                        }
                        o[oi] = best_v;
                        mask[oi] = best;
                    }
                }
            }
        }
        if (ctx.recording()) {
            mask_ = std::move(mask);
            in_shape_ = s;
            have_cache_ = true;
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "maxpool2d");
        TensorT<T> dx(in_shape_.vec());
        const T* u = upstream.data();
        for (std::size_t i = 0; i < upstream.size(); ++i) dx[mask_[i]] += u[i];
        return dx;
    }

    void clear_cache() override { mask_.clear(); have_cache_ = false; }

private:
    std::vector<std::size_t> mask_;
    Shape4 in_shape_;
    bool have_cache_ = false;
};

// Inverted dropout: at train time each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate); inference is the identity.
// The mask is a pure function of (layer seed, batch counter).
template <typename T>
class DropoutLayerT : public LayerT<T> {
public:
    DropoutLayerT(double rate, std::uint64_t seed) : rate_(rate), seed_(seed) {
        if (!(rate >= 0.0 && rate < 1.0))
            throw ParameterError("dropout rate must be in [0, 1), got " + std::to_string(rate));
    }

    std::string name() const override { return "dropout"; }
    double rate() const { return rate_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        return in;
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        if (ctx.mode == Mode::Infer) {
            if (ctx.recording()) {
                identity_ = true;
                have_cache_ = true;
            }
            return x;
        }
        const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
        TensorT<T> mask(x.shape());
        std::mt19937_64 rng(derive_seed(seed_, ctx.batch));
        for (std::size_t i = 0; i < mask.size(); ++i)
            mask[i] = uniform_unit(rng) < rate_ ? T{} : keep_scale;
        TensorT<T> out(x.shape());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * mask[i];
        if (ctx.recording()) {
            mask_ = std::move(mask);
            identity_ = false;
            have_cache_ = true;
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "dropout");
        if (identity_) return upstream;
        TensorT<T> dx(upstream.shape());
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = upstream[i] * mask_[i];
        return dx;
    }

    void clear_cache() override { mask_ = TensorT<T>(); have_cache_ = false; }

private:
    double rate_;
    std::uint64_t seed_;
    TensorT<T> mask_;
    bool identity_ = false;
    bool have_cache_ = false;
};

template <typename T>
class FlattenLayerT : public LayerT<T> {
public:
    std::string name() const override { return "flatten"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() < 2)
            throw DimensionError("flatten expects a batched input, got " + detail::shape_str(in));
        std::size_t rest = 1;
        for (std::size_t i = 1; i < in.size(); ++i) rest *= in[i];
        return {in[0], rest};
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        if (ctx.recording()) {
            in_shape_ = x.shape();
            have_cache_ = true;
        }
        return x.reshaped(output_shape(x.shape()));
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "flatten");
        return upstream.reshaped(in_shape_);
    }

    void clear_cache() override { have_cache_ = false; }

private:
    std::vector<std::size_t> in_shape_;
    bool have_cache_ = false;
};

template <typename T>
class DenseLayerT : public LayerT<T> {
public:
    DenseLayerT(std::size_t in_units, std::size_t units, std::uint64_t seed)
        : in_u_(in_units), out_u_(units),
          w_(glorot_uniform<T>({in_units, units}, in_units, units, seed)), b_({units}),
          dw_({in_units, units}), db_({units}) {}

    std::string name() const override { return "dense"; }
    std::size_t in_units() const { return in_u_; }
    std::size_t units() const { return out_u_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2)
            throw DimensionError("dense expects [N,D] input, got " + detail::shape_str(in));
        if (in[1] != in_u_)
            throw DimensionError("dense: input width " + std::to_string(in[1]) +
                                 " does not match weights [" + std::to_string(in_u_) + "x" +
                                 std::to_string(out_u_) + "]");
        return {in[0], out_u_};
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        output_shape(x.shape());
        TensorT<T> out = matmul(x, w_);
        for (std::size_t r = 0; r < out.dim(0); ++r)
            for (std::size_t k = 0; k < out_u_; ++k) out.at2(r, k) += b_[k];
        if (ctx.recording()) {
            in_cache_ = x;
            have_cache_ = true;
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "dense");
        // dW = x^T . up ; db = column sums ; dx = up . W^T
        TensorT<T> x_t({in_u_, in_cache_.dim(0)});
        for (std::size_t r = 0; r < in_cache_.dim(0); ++r)
            for (std::size_t c = 0; c < in_u_; ++c) x_t.at2(c, r) = in_cache_.at2(r, c);
        dw_ = matmul(x_t, upstream);
        std::fill(db_.raw().begin(), db_.raw().end(), T{});
        for (std::size_t r = 0; r < upstream.dim(0); ++r)
            for (std::size_t k = 0; k < out_u_; ++k) db_[k] += upstream.at2(r, k);
        TensorT<T> w_t({out_u_, in_u_});
        for (std::size_t r = 0; r < in_u_; ++r)
            for (std::size_t c = 0; c < out_u_; ++c) w_t.at2(c, r) = w_.at2(r, c);
        return matmul(upstream, w_t);
    }

    std::vector<TensorT<T>*> params() override { return {&w_, &b_}; }
    std::vector<TensorT<T>*> grads() override { return {&dw_, &db_}; }
    void clear_cache() override { in_cache_ = TensorT<T>(); have_cache_ = false; }

    TensorT<T>& weights() { return w_; }
    TensorT<T>& bias() { return b_; }

private:
    std::size_t in_u_, out_u_;
    TensorT<T> w_, b_, dw_, db_;
    TensorT<T> in_cache_;
    bool have_cache_ = false;
};

// y = max(0, x)
template <typename T>
class ReluLayerT : public LayerT<T> {
public:
    std::string name() const override { return "relu"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        return in;
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        TensorT<T> out(x.shape());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T{} ? x[i] : T{};
        if (ctx.recording()) {
            in_cache_ = x;
            have_cache_ = true;
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "relu");
        TensorT<T> dx(upstream.shape());
        for (std::size_t i = 0; i < dx.size(); ++i)
            dx[i] = in_cache_[i] > T{} ? upstream[i] : T{};
        return dx;
    }

    void clear_cache() override { in_cache_ = TensorT<T>(); have_cache_ = false; }

private:
    TensorT<T> in_cache_;
    bool have_cache_ = false;
};

// Row-wise softmax with the max subtracted for stability.
template <typename T>
class SoftmaxLayerT : public LayerT<T> {
public:
    std::string name() const override { return "softmax"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2)
            throw DimensionError("softmax expects [N,K] logits, got " + detail::shape_str(in));
        if (in[1] < 2)
            throw DimensionError("softmax requires K >= 2 classes, got " + detail::shape_str(in));
        return in;
    }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) override {
        output_shape(x.shape());
        const std::size_t n = x.dim(0), k = x.dim(1);
        TensorT<T> out(x.shape());
        for (std::size_t r = 0; r < n; ++r) {
            T mx = x.at2(r, 0);
            for (std::size_t j = 0; j < k; ++j) {
                if (!std::isfinite(static_cast<double>(x.at2(r, j))))
                    throw NumericError("softmax: non-finite logit at row " + std::to_string(r));
                mx = std::max(mx, x.at2(r, j));
            }
            T sum{};
            for (std::size_t j = 0; j < k; ++j) {
                const T e = std::exp(x.at2(r, j) - mx);
                out.at2(r, j) = e;
                sum += e;
            }
            for (std::size_t j = 0; j < k; ++j) out.at2(r, j) /= sum;
        }
        if (ctx.recording()) {
            out_cache_ = out;
            have_cache_ = true;
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& upstream) override {
        this->require_cache(have_cache_, "softmax");
        // dx_i = y_i * (u_i - sum_j u_j y_j), row-wise
        const std::size_t n = out_cache_.dim(0), k = out_cache_.dim(1);
        TensorT<T> dx(out_cache_.shape());
        for (std::size_t r = 0; r < n; ++r) {
            T dot{};
            for (std::size_t j = 0; j < k; ++j) dot += upstream.at2(r, j) * out_cache_.at2(r, j);
            for (std::size_t j = 0; j < k; ++j)
                dx.at2(r, j) = out_cache_.at2(r, j) * (upstream.at2(r, j) - dot);
        }
        return dx;
    }

    void clear_cache() override { out_cache_ = TensorT<T>(); have_cache_ = false; }

private:
    TensorT<T> out_cache_;
    bool have_cache_ = false;
};

using Conv2dLayer = Conv2dLayerT<float>;
using MaxPool2dLayer = MaxPool2dLayerT<float>;
using DropoutLayer = DropoutLayerT<float>;
using FlattenLayer = FlattenLayerT<float>;
using DenseLayer = DenseLayerT<float>;
using ReluLayer = ReluLayerT<float>;
using SoftmaxLayer = SoftmaxLayerT<float>;

}  // namespace tldc
