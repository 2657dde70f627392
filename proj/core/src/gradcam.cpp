#include "tldc/gradcam.hpp"

#include <algorithm>
#include <cmath>

namespace tldc {

namespace {

Tensor upsample_bilinear_2d(const Tensor& src, std::size_t out_h,
                            std::size_t out_w) {
    const std::size_t in_h = src.shape()[0];
    const std::size_t in_w = src.shape()[1];
    if (in_h == out_h && in_w == out_w) return src;

    Tensor out({out_h, out_w});
    const double sy_scale = static_cast<double>(in_h) / out_h;
    const double sx_scale = static_cast<double>(in_w) / out_w;
    for (std::size_t y = 0; y < out_h; ++y) {
        double sy = (y + 0.5) * sy_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(in_h - 1));
        std::size_t y0 = static_cast<std::size_t>(sy);
        std::size_t y1 = std::min(y0 + 1, in_h - 1);
        double fy = sy - static_cast<double>(y0);
        for (std::size_t x = 0; x < out_w; ++x) {
            double sx = (x + 0.5) * sx_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(in_w - 1));
            std::size_t x0 = static_cast<std::size_t>(sx);
            std::size_t x1 = std::min(x0 + 1, in_w - 1);
            double fx = sx - static_cast<double>(x0);
            double a = src.at2(y0, x0);
            double b = src.at2(y0, x1);
            double d = src.at2(y1, x0);
            double e = src.at2(y1, x1);
            double top = a + fx * (b - a);
            double bot = d + fx * (e - d);
            out.at2(y, x) = static_cast<float>(top + fy * (bot - top));
        }
    }
    return out;
}

}  // namespace

Heatmap grad_cam(Model& model, const Tensor& image, int target_class,
                 std::size_t source_layer) {
    const ModelConfig& cfg = model.config();
    if (target_class < 0 ||
        static_cast<std::size_t>(target_class) >= cfg.classes)
        throw ParameterError("grad_cam: class id " +
                             std::to_string(target_class) + " out of range");

    std::size_t conv = source_layer;
    if (conv == Model::npos) {
        conv = model.last_conv_index();
        if (conv == Model::npos)
            throw ParameterError("grad_cam: model has no conv layer");
    } else if (conv >= cfg.layers.size() ||
               cfg.layers[conv].kind != LayerKind::Conv2d) {
        throw ParameterError("grad_cam: layer " + std::to_string(conv) +
                             " is not a conv layer");
    }

    if (image.shape() !=
        std::vector<std::size_t>{cfg.input_h, cfg.input_w, cfg.input_c})
        throw DimensionError("grad_cam: image shape " + image.shape_string() +
                             " does not match the model input");

    Tensor batch = image.reshaped(
        {1, cfg.input_h, cfg.input_w, cfg.input_c});
    ForwardCtx ctx{Mode::Infer, 0, true};
    model.forward(batch, ctx);

    // score is the pre-softmax logit, so the chain starts below a trailing
    // softmax layer
    std::size_t from = model.num_layers() - 1;
    if (model.layer(from).name() == std::string("softmax")) {
        if (from == 0) throw ParameterError("grad_cam: model is only softmax");
        from -= 1;
    }
    if (conv >= from)
        throw ParameterError("grad_cam: conv layer is not below the head");

    Tensor seed({1, cfg.classes});
    seed.at2(0, static_cast<std::size_t>(target_class)) = 1.0f;
    Tensor grad = model.gradient_at_layer(conv, from, seed);
    const Tensor& activ = model.layer_output(conv);

    const Shape4 gs = Shape4::of(grad);
    const std::size_t hc = gs.h, wc = gs.w, kc = gs.c;

    std::vector<double> alpha(kc, 0.0);
    for (std::size_t y = 0; y < hc; ++y)
        for (std::size_t x = 0; x < wc; ++x)
            for (std::size_t k = 0; k < kc; ++k)
                alpha[k] += grad.at4(0, y, x, k);
    const double cells = static_cast<double>(hc * wc);
    for (auto& a : alpha) a /= cells;

    Tensor raw({hc, wc});
    for (std::size_t y = 0; y < hc; ++y) {
        for (std::size_t x = 0; x < wc; ++x) {
            double acc = 0.0;
            for (std::size_t k = 0; k < kc; ++k)
                acc += alpha[k] * activ.at4(0, y, x, k);
            raw.at2(y, x) = static_cast<float>(std::max(acc, 0.0));
        }
    }

    Tensor up = upsample_bilinear_2d(raw, cfg.input_h, cfg.input_w);

    float lo = up.raw()[0], hi = up.raw()[0];
    for (float v : up.raw()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Heatmap map;
    map.source_layer = conv;
    map.target_class = target_class;
    if (hi <= 0.0f) {
        map.values = Tensor({cfg.input_h, cfg.input_w});
    } else if (hi == lo) {
        map.values = Tensor({cfg.input_h, cfg.input_w});
        std::fill(map.values.raw().begin(), map.values.raw().end(), 1.0f);
    } else {
        map.values = up;
        for (float& v : map.values.raw()) v = (v - lo) / (hi - lo);
    }
    return map;
}

Tensor gradcam_overlay(const Tensor& image, const Heatmap& map, float blend) {
    if (image.shape().size() != 3 || image.shape()[2] != 3)
        throw DimensionError("overlay expects [H,W,3], got " +
                             image.shape_string());
    if (map.values.shape() !=
        std::vector<std::size_t>{image.shape()[0], image.shape()[1]})
        throw DimensionError("overlay: heatmap size does not match the image");

    const std::size_t h = image.shape()[0];
    const std::size_t w = image.shape()[1];
    Tensor out({h, w, 3});
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            float t = map.values.at2(y, x);
            float ramp[3] = {
                std::clamp(1.5f - std::fabs(4.0f * t - 3.0f), 0.0f, 1.0f),
                std::clamp(1.5f - std::fabs(4.0f * t - 2.0f), 0.0f, 1.0f),
                std::clamp(1.5f - std::fabs(4.0f * t - 1.0f), 0.0f, 1.0f)};
            for (std::size_t c = 0; c < 3; ++c)
                out.at3(y, x, c) = std::clamp(
                    (1.0f - blend) * image.at3(y, x, c) + blend * ramp[c],
                    0.0f, 1.0f);
        }
    }
    return out;
}

}  // namespace tldc
