#pragma once

#include <string>
#include <vector>

#include "tldc/dataset.hpp"
#include "tldc/model.hpp"

namespace tldc {

struct PredictionResponse {
    LeafClass label = LeafClass::Healthy;
    std::vector<double> probabilities;  // class order: Healthy, Diseased
    std::string model_id;

    std::string to_json_text() const;
};

// the one inference path: both the CLI and the service call this, so their
// answers agree by construction
PredictionResponse predict_image(Model& model, const Tensor& image,
                                 const std::string& model_id);

}  // namespace tldc
