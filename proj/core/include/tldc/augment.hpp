#pragma once

#include <cstdint>

#include "tldc/tensor.hpp"

namespace tldc {

// rescale is consumed when images are decoded (bytes / 255); everything else
// here is geometry applied per sample
struct AugmentSpec {
    double rescale = 1.0 / 255.0;
    double rotation_deg = 20.0;
    double shift_frac = 0.10;
    double zoom_lo = 0.9;
    double zoom_hi = 1.1;
    double hflip_prob = 0.5;

    void validate() const;
    static AugmentSpec identity();
};

struct AugmentParams {
    bool hflip = false;
    double angle_deg = 0.0;
    double shift_x = 0.0;  // fraction of width
    double shift_y = 0.0;  // fraction of height
    double zoom = 1.0;

    bool is_identity() const {
        return !hflip && angle_deg == 0.0 && shift_x == 0.0 &&
               shift_y == 0.0 && zoom == 1.0;
    }
};

// deterministic draw: same (seed, index) always yields the same parameters
AugmentParams draw_augment_params(const AugmentSpec& spec, std::uint64_t seed,
                                  std::uint64_t index);

// flip, then rotate, then shift, then zoom, all about the image center;
// pixels pulled from outside the frame fill with 0
Tensor apply_augment(const Tensor& x, const AugmentParams& params);

Tensor augment(const Tensor& x, const AugmentSpec& spec, std::uint64_t seed,
               std::uint64_t index);

}  // namespace tldc
