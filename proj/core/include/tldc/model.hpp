#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tldc/layers.hpp"

namespace tldc {

enum class LayerKind { Conv2d, MaxPool2d, Dropout, Flatten, Dense, Relu, Softmax };

std::string layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& name);

// Declarative layer description. Conv and pool kernels are fixed at 2x2.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    std::size_t filters = 0;      // conv
    std::size_t units = 0;        // dense
    double dropout_rate = 0.2;    // dropout

    static LayerSpec conv2d(std::size_t filters) { return {LayerKind::Conv2d, filters, 0, 0.0}; }
    static LayerSpec maxpool2d() { return {LayerKind::MaxPool2d, 0, 0, 0.0}; }
    static LayerSpec dropout(double rate = 0.2) { return {LayerKind::Dropout, 0, 0, rate}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0, 0.0}; }
    static LayerSpec dense(std::size_t units) { return {LayerKind::Dense, 0, units, 0.0}; }
    static LayerSpec relu() { return {LayerKind::Relu, 0, 0, 0.0}; }
    static LayerSpec softmax() { return {LayerKind::Softmax, 0, 0, 0.0}; }
};

struct ModelConfig {
    std::size_t input_h = 224, input_w = 224, input_c = 3;
    std::size_t classes = 2;
    std::vector<LayerSpec> layers;

    // Shapes flowing through the stack: entry 0 is the input [N,H,W,C] with
    // N left symbolic as 1, entry i+1 the output of layer i. Throws
    // DimensionError when consecutive layers do not fit together.
    std::vector<std::vector<std::size_t>> shape_trace() const;
    void validate() const;

    std::size_t num_classes() const { return classes; }
};

// The stock architecture: four conv(2x2,same)+relu+maxpool blocks with
// filter plan 16/32/64/128, dropout after pool-2, pool-3 and the hidden
// dense layer, flatten, dense(128)+relu, dense(classes), softmax.
ModelConfig default_model_config(std::size_t classes = 2, double dropout_rate = 0.2);

template <typename T>
class ModelT {
public:
    using LayerPtr = std::unique_ptr<LayerT<T>>;

    static ModelT build(const ModelConfig& cfg, std::uint64_t seed) {
        cfg.validate();
        ModelT m;
        m.config_ = cfg;
        m.seed_ = seed;
        const auto trace = cfg.shape_trace();
        for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
            const LayerSpec& spec = cfg.layers[i];
            const std::vector<std::size_t>& in = trace[i];
            const std::uint64_t lseed = derive_seed(seed, i);
            switch (spec.kind) {
                case LayerKind::Conv2d:
                    m.layers_.push_back(std::make_unique<Conv2dLayerT<T>>(in[3], spec.filters, lseed));
                    break;
                case LayerKind::MaxPool2d:
                    m.layers_.push_back(std::make_unique<MaxPool2dLayerT<T>>());
                    break;
                case LayerKind::Dropout:
                    m.layers_.push_back(std::make_unique<DropoutLayerT<T>>(spec.dropout_rate, lseed));
                    break;
                case LayerKind::Flatten:
                    m.layers_.push_back(std::make_unique<FlattenLayerT<T>>());
                    break;
                case LayerKind::Dense:
                    m.layers_.push_back(std::make_unique<DenseLayerT<T>>(in[1], spec.units, lseed));
                    break;
                case LayerKind::Relu:
                    m.layers_.push_back(std::make_unique<ReluLayerT<T>>());
                    break;
                case LayerKind::Softmax:
                    m.layers_.push_back(std::make_unique<SoftmaxLayerT<T>>());
                    break;
            }
        }
        return m;
    }

    const ModelConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t num_layers() const { return layers_.size(); }
    LayerT<T>& layer(std::size_t i) { return *layers_.at(i); }
    const LayerT<T>& layer(std::size_t i) const { return *layers_.at(i); }

    TensorT<T> forward(const TensorT<T>& x, const ForwardCtx& ctx) {
        TensorT<T> cur = x;
        if (ctx.recording()) outputs_.assign(layers_.size(), TensorT<T>());
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            cur = layers_[i]->forward(cur, ctx);
            if (ctx.recording()) outputs_[i] = cur;
        }
        return cur;
    }

    // Backward through the whole stack from a gradient w.r.t. the final
    // output. Parameter gradients land in gradients().
    TensorT<T> backward(const TensorT<T>& d_out) { return backward_range(d_out, layers_.size() - 1, 0); }

    // Training entry: the loss gradient is taken w.r.t. the logits (the
    // softmax is fused into the loss), so the chain starts below the
    // trailing softmax layer.
    TensorT<T> backward_from_logits(const TensorT<T>& d_logits) {
        if (layers_.empty() || layers_.back()->name() != "softmax")
            throw StateError("backward_from_logits requires a trailing softmax layer");
        if (layers_.size() == 1) return d_logits;
        return backward_range(d_logits, layers_.size() - 2, 0);
    }

    // Gradient w.r.t. the output of layer `target`, driven by a gradient
    // injected at the output of layer `from` (both inclusive indices).
    TensorT<T> backward_range(const TensorT<T>& grad, std::size_t from, std::size_t stop_after) {
        TensorT<T> g = grad;
        for (std::size_t i = from + 1; i > stop_after; --i) g = layers_[i - 1]->backward(g);
        return g;
    }

    // d(output of layer `from`) -> d(output of layer `target`), target < from.
    TensorT<T> gradient_at_layer(std::size_t target, std::size_t from, const TensorT<T>& grad) {
        if (target >= from) throw ParameterError("gradient_at_layer: target must precede source");
        TensorT<T> g = grad;
        for (std::size_t i = from; i > target; --i) g = layers_[i]->backward(g);
        return g;
    }

    const TensorT<T>& layer_output(std::size_t i) const {
        if (i >= outputs_.size() || outputs_[i].empty())
            throw StateError("layer_output: no recorded forward pass");
        return outputs_[i];
    }

    std::vector<TensorT<T>*> parameters() {
        std::vector<TensorT<T>*> ps;
        for (auto& l : layers_)
            for (auto* p : l->params()) ps.push_back(p);
        return ps;
    }

    std::vector<TensorT<T>*> gradients() {
        std::vector<TensorT<T>*> gs;
        for (auto& l : layers_)
            for (auto* g : l->grads()) gs.push_back(g);
        return gs;
    }

    void clear_caches() {
        for (auto& l : layers_) l->clear_cache();
        outputs_.clear();
    }

    // Index of the last conv layer, or npos when the stack has none.
    std::size_t last_conv_index() const {
        for (std::size_t i = layers_.size(); i-- > 0;)
            if (config_.layers[i].kind == LayerKind::Conv2d) return i;
        return npos;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Named parameter tensors in layer order; the checkpoint blob follows
    // this order exactly.
    struct ParamRef {
        std::string name;
        TensorT<T>* tensor;
    };
    std::vector<ParamRef> named_parameters() {
        std::vector<ParamRef> out;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            auto ps = layers_[i]->params();
            if (ps.empty()) continue;
            const std::string base = "layer" + std::to_string(i) + "." + layers_[i]->name();
            out.push_back({base + ".weight", ps[0]});
            if (ps.size() > 1) out.push_back({base + ".bias", ps[1]});
        }
        return out;
    }

private:
    ModelConfig config_;
    std::uint64_t seed_ = 0;
    std::vector<LayerPtr> layers_;
    std::vector<TensorT<T>> outputs_;
};

using Model = ModelT<float>;

}  // namespace tldc
