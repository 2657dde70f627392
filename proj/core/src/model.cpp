#include "tldc/model.hpp"

namespace tldc {

std::string layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
        case LayerKind::Relu: return "relu";
        case LayerKind::Softmax: return "softmax";
    }
    throw ParameterError("unknown layer kind");
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "conv2d") return LayerKind::Conv2d;
    if (name == "maxpool2d") return LayerKind::MaxPool2d;
    if (name == "dropout") return LayerKind::Dropout;
    if (name == "flatten") return LayerKind::Flatten;
    if (name == "dense") return LayerKind::Dense;
    if (name == "relu") return LayerKind::Relu;
    if (name == "softmax") return LayerKind::Softmax;
    throw ParameterError("unknown layer kind: " + name);
}

std::vector<std::vector<std::size_t>> ModelConfig::shape_trace() const {
    std::vector<std::vector<std::size_t>> trace;
    trace.push_back({1, input_h, input_w, input_c});
    for (const LayerSpec& spec : layers) {
        const auto& in = trace.back();
        std::vector<std::size_t> out;
        switch (spec.kind) {
            case LayerKind::Conv2d: {
                if (spec.filters == 0) throw ParameterError("conv2d needs filters >= 1");
                if (in.size() != 4)
                    throw DimensionError("conv2d after non-spatial output " + detail::shape_str(in));
                out = {in[0], in[1], in[2], spec.filters};
                break;
            }
            case LayerKind::MaxPool2d: {
                if (in.size() != 4)
                    throw DimensionError("maxpool2d after non-spatial output " + detail::shape_str(in));
                if (in[1] < 2 || in[2] < 2)
                    throw DimensionError("maxpool2d requires H and W >= 2, got " + detail::shape_str(in));
                out = {in[0], in[1] / 2, in[2] / 2, in[3]};
                break;
            }
            case LayerKind::Dropout: {
                if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0))
                    throw ParameterError("dropout rate must be in [0, 1)");
                out = in;
                break;
            }
            case LayerKind::Flatten: {
                std::size_t rest = 1;
                for (std::size_t i = 1; i < in.size(); ++i) rest *= in[i];
                out = {in[0], rest};
                break;
            }
            case LayerKind::Dense: {
                if (spec.units == 0) throw ParameterError("dense needs units >= 1");
                if (in.size() != 2)
                    throw DimensionError("dense expects a flattened [N,D] input, got " +
                                         detail::shape_str(in));
                out = {in[0], spec.units};
                break;
            }
            case LayerKind::Relu: out = in; break;
            case LayerKind::Softmax: {
                if (in.size() != 2 || in[1] < 2)
                    throw DimensionError("softmax requires [N,K] logits with K >= 2, got " +
                                         detail::shape_str(in));
                out = in;
                break;
            }
        }
        trace.push_back(std::move(out));
    }
    return trace;
}

void ModelConfig::validate() const {
    if (layers.empty()) throw ParameterError("model config has no layers");
    if (classes < 2) throw ParameterError("model config needs >= 2 classes");
    const auto trace = shape_trace();
    const auto& out = trace.back();
    if (out.size() != 2 || out[1] != classes)
        throw DimensionError("model output " + detail::shape_str(out) + " does not produce " +
                             std::to_string(classes) + " class probabilities");
}

ModelConfig default_model_config(std::size_t classes, double dropout_rate) {
    ModelConfig cfg;
    cfg.classes = classes;
    auto& L = cfg.layers;
    L.push_back(LayerSpec::conv2d(16));
    L.push_back(LayerSpec::relu());
    L.push_back(LayerSpec::maxpool2d());
    L.push_back(LayerSpec::conv2d(32));
    L.push_back(LayerSpec::relu());
    L.push_back(LayerSpec::maxpool2d());
    L.push_back(LayerSpec::dropout(dropout_rate));
    L.push_back(LayerSpec::conv2d(64));
    L.push_back(LayerSpec::relu());
    L.push_back(LayerSpec::maxpool2d());
    L.push_back(LayerSpec::dropout(dropout_rate));
    L.push_back(LayerSpec::conv2d(128));
    L.push_back(LayerSpec::relu());
    L.push_back(LayerSpec::maxpool2d());
    L.push_back(LayerSpec::flatten());
    L.push_back(LayerSpec::dense(128));
    L.push_back(LayerSpec::relu());
    L.push_back(LayerSpec::dropout(dropout_rate));
    L.push_back(LayerSpec::dense(classes));
    L.push_back(LayerSpec::softmax());
    return cfg;
}

}  // namespace tldc
