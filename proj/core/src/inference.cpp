#include "tldc/inference.hpp"

#include <nlohmann/json.hpp>

#include "tldc/metrics.hpp"

namespace tldc {

std::string PredictionResponse::to_json_text() const {
    nlohmann::json j;
    j["label"] = leaf_class_name(label);
    j["probabilities"] = probabilities;
    j["model_id"] = model_id;
    return j.dump();
}

PredictionResponse predict_image(Model& model, const Tensor& image,
                                 const std::string& model_id) {
    const ModelConfig& cfg = model.config();
    if (image.shape() !=
        std::vector<std::size_t>{cfg.input_h, cfg.input_w, cfg.input_c})
        throw DimensionError("predict: image shape " + image.shape_string() +
                             " does not match the model input");

    Tensor batch = image.reshaped({1, cfg.input_h, cfg.input_w, cfg.input_c});
    ForwardCtx ctx{Mode::Infer, 0, false};
    Tensor probs = model.forward(batch, ctx);

    PredictionResponse response;
    response.model_id = model_id;
    response.probabilities.assign(probs.raw().begin(), probs.raw().end());
    response.label = static_cast<LeafClass>(
        argmax_class(probs.raw().data(), probs.raw().size()));
    return response;
}

}  // namespace tldc
