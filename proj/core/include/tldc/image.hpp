#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tldc/dataset.hpp"
#include "tldc/tensor.hpp"

namespace tldc {

// decoded image at native resolution: [H,W,3] RGB, values in [0,1]
Tensor load_image_raw(const std::string& path);
Tensor decode_image_raw(const std::vector<unsigned char>& bytes);

// decode + bilinear resize; the standard 224x224 network input
Tensor load_image(const std::string& path, int target_h = 224,
                  int target_w = 224);
Tensor decode_image(const std::vector<unsigned char>& bytes, int target_h = 224,
                    int target_w = 224);

// crop to the union of the boxes (full frame when none), then resize
Tensor load_image_cropped(const std::string& path,
                          const std::vector<YoloBox>& boxes, int target_h = 224,
                          int target_w = 224);

// half-pixel-center bilinear; exact copy when the size already matches
Tensor resize_bilinear(const Tensor& src, int out_h, int out_w);

Tensor crop_union_box(const Tensor& src, const std::vector<YoloBox>& boxes);

// fixture + export formats
void write_image(const std::string& path, const Tensor& img);
void write_ppm(const std::string& path, const Tensor& img);
Tensor read_ppm(const std::string& path);
void write_pfm(const std::string& path, const TensorT<float>& values);
TensorT<float> read_pfm(const std::string& path);

}  // namespace tldc
