#pragma once

#include <cmath>

#include "tldc/tensor.hpp"

namespace tldc {

template <typename T>
struct LossGrad {
    T loss{};
    TensorT<T> grad;
};

// Mean negative log-likelihood of the true class. `pred` holds softmax
// probabilities, `target` one-hot rows; the returned gradient is taken
// w.r.t. the logits (softmax fused): (pred - target) / N.
template <typename T>
LossGrad<T> categorical_cross_entropy(const TensorT<T>& pred, const TensorT<T>& target) {
    if (pred.rank() != 2 || !pred.same_shape(target))
        throw DimensionError("cross entropy: prediction " + pred.shape_string() +
                             " and target " + target.shape_string() + " disagree");
    const std::size_t n = pred.dim(0), k = pred.dim(1);
    constexpr double kClamp = 1e-12;
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double row_sum = 0.0;
        std::size_t ones = 0;
        std::size_t true_class = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double t = static_cast<double>(target.at2(r, j));
            if (t == 1.0) {
                ++ones;
                true_class = j;
            } else if (t != 0.0) {
                throw DataError("cross entropy: target row " + std::to_string(r) +
                                " is not one-hot");
            }
            row_sum += static_cast<double>(pred.at2(r, j));
        }
        if (ones != 1)
            throw DataError("cross entropy: target row " + std::to_string(r) + " is not one-hot");
        if (std::abs(row_sum - 1.0) > 1e-4)
            throw DataError("cross entropy: prediction row " + std::to_string(r) +
                            " does not sum to 1");
        const double p = std::max(static_cast<double>(pred.at2(r, true_class)), kClamp);
        loss -= std::log(p);
    }
    LossGrad<T> out;
    out.loss = static_cast<T>(loss / static_cast<double>(n));
    out.grad = TensorT<T>(pred.shape());
    const T inv_n = static_cast<T>(1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < pred.size(); ++i)
        out.grad[i] = (pred[i] - target[i]) * inv_n;
    return out;
}

// -(1/N) sum [y ln p + (1-y) ln(1-p)] on a single probability column;
// the gradient is w.r.t. the probabilities.
template <typename T>
LossGrad<T> binary_cross_entropy(const TensorT<T>& pred, const std::vector<int>& target) {
    const bool column = pred.rank() == 2 && pred.dim(1) == 1;
    if (!(pred.rank() == 1 || column))
        throw DimensionError("binary cross entropy expects [N] or [N,1] predictions, got " +
                             pred.shape_string());
    const std::size_t n = pred.rank() == 1 ? pred.dim(0) : pred.dim(0);
    if (n != target.size())
        throw DimensionError("binary cross entropy: " + std::to_string(n) + " predictions vs " +
                             std::to_string(target.size()) + " targets");
    constexpr double kClamp = 1e-12;
    double loss = 0.0;
    LossGrad<T> out;
    out.grad = TensorT<T>(pred.shape());
    for (std::size_t i = 0; i < n; ++i) {
        const double raw = static_cast<double>(pred[i]);
        if (!std::isfinite(raw) || raw < 0.0 || raw > 1.0)
            throw NumericError("binary cross entropy: prediction " + std::to_string(raw) +
                               " outside [0, 1]");
        if (target[i] != 0 && target[i] != 1)
            throw DataError("binary cross entropy: target must be 0 or 1");
        const double p = std::min(std::max(raw, kClamp), 1.0 - kClamp);
        const double y = static_cast<double>(target[i]);
        loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        out.grad[i] = static_cast<T>((p - y) / (p * (1.0 - p)) / static_cast<double>(n));
    }
    out.loss = static_cast<T>(loss / static_cast<double>(n));
    return out;
}

}  // namespace tldc
