#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tldc/tensor.hpp"

namespace tldc {

struct OptimizerConfig {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    // alpha = 0 is admitted so frozen-weight runs can assert bit-stability.
    void validate() const {
        if (!(alpha >= 0.0)) throw ParameterError("adam: alpha must be >= 0");
        if (beta1 < 0.0 || beta1 >= 1.0) throw ParameterError("adam: beta1 must be in [0, 1)");
        if (beta2 < 0.0 || beta2 >= 1.0) throw ParameterError("adam: beta2 must be in [0, 1)");
        if (!(epsilon > 0.0)) throw ParameterError("adam: epsilon must be > 0");
    }
};

// Adam with bias correction:
//   m <- b1*m + (1-b1)*g          v <- b2*v + (1-b2)*g^2
//   mhat = m/(1-b1^t)             vhat = v/(1-b2^t)
//   theta <- theta - alpha * mhat / (sqrt(vhat) + eps)
// First/second moment tensors mirror the parameter shapes; t counts steps.
template <typename T>
class AdamT {
public:
    explicit AdamT(OptimizerConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    const OptimizerConfig& config() const { return cfg_; }
    std::uint64_t steps() const { return t_; }
    const std::vector<TensorT<T>>& first_moments() const { return m_; }
    const std::vector<TensorT<T>>& second_moments() const { return v_; }

    void step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>*>& grads) {
        if (params.size() != grads.size())
            throw DimensionError("adam: parameter and gradient lists differ in length");
        if (m_.empty()) {
            for (auto* p : params) {
                m_.emplace_back(p->shape());
                v_.emplace_back(p->shape());
            }
        }
        if (m_.size() != params.size())
            throw DimensionError("adam: state tracks " + std::to_string(m_.size()) +
                                 " tensors, got " + std::to_string(params.size()));
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!params[i]->same_shape(*grads[i]))
                throw DimensionError("adam: parameter " + params[i]->shape_string() +
                                     " vs gradient " + grads[i]->shape_string());
            if (!params[i]->same_shape(m_[i]))
                throw DimensionError("adam: parameter " + params[i]->shape_string() +
                                     " vs state " + m_[i].shape_string());
        }
        ++t_;
        const T b1 = static_cast<T>(cfg_.beta1);
        const T b2 = static_cast<T>(cfg_.beta2);
        const T bc1 = static_cast<T>(1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
        const T bc2 = static_cast<T>(1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
        const T alpha = static_cast<T>(cfg_.alpha);
        const T eps = static_cast<T>(cfg_.epsilon);
        for (std::size_t i = 0; i < params.size(); ++i) {
            TensorT<T>& p = *params[i];
            const TensorT<T>& g = *grads[i];
            TensorT<T>& m = m_[i];
            TensorT<T>& v = v_[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[j] = b1 * m[j] + (T{1} - b1) * g[j];
                v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
                const T mhat = m[j] / bc1;
                const T vhat = v[j] / bc2;
                p[j] -= alpha * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }

private:
    OptimizerConfig cfg_;
    std::vector<TensorT<T>> m_, v_;
    std::uint64_t t_ = 0;
};

using Adam = AdamT<float>;

}  // namespace tldc
