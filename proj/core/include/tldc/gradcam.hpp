#pragma once

#include "tldc/model.hpp"
#include "tldc/tensor.hpp"

namespace tldc {

struct Heatmap {
    Tensor values;  // [H,W] in [0,1], sized like the model input
    std::size_t source_layer = 0;
    int target_class = 0;
};

// class-discriminative localization: channel weights are the spatial means of
// d(class logit)/d(feature map) at the chosen conv layer, maps combine through
// a relu, then bilinear upsample and min-max normalization
Heatmap grad_cam(Model& model, const Tensor& image, int target_class,
                 std::size_t source_layer = Model::npos);

// heatmap rendered over the image with a fixed color ramp
Tensor gradcam_overlay(const Tensor& image, const Heatmap& map,
                       float blend = 0.4f);

}  // namespace tldc
