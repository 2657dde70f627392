#include "tldc/augment.hpp"

#include <cmath>

#include "tldc/errors.hpp"
#include "tldc/rng.hpp"

namespace tldc {

void AugmentSpec::validate() const {
    if (!(rescale > 0.0)) throw ParameterError("augment: rescale must be > 0");
    if (rotation_deg < 0.0)
        throw ParameterError("augment: rotation_deg must be >= 0");
    if (shift_frac < 0.0 || shift_frac > 1.0)
        throw ParameterError("augment: shift_frac must be in [0, 1]");
    if (!(zoom_lo > 0.0) || zoom_hi < zoom_lo)
        throw ParameterError("augment: zoom range must satisfy 0 < lo <= hi");
    if (hflip_prob < 0.0 || hflip_prob > 1.0)
        throw ParameterError("augment: hflip_prob must be in [0, 1]");
}

AugmentSpec AugmentSpec::identity() {
    AugmentSpec spec;
    spec.rotation_deg = 0.0;
    spec.shift_frac = 0.0;
    spec.zoom_lo = 1.0;
    spec.zoom_hi = 1.0;
    spec.hflip_prob = 0.0;
    return spec;
}

AugmentParams draw_augment_params(const AugmentSpec& spec, std::uint64_t seed,
                                  std::uint64_t index) {
    spec.validate();
    std::mt19937_64 rng(derive_seed(seed, index));
    AugmentParams p;
    // fixed draw order so parameters stay stable across code motion
    p.hflip = uniform_unit(rng) < spec.hflip_prob;
    p.angle_deg = uniform_range(rng, -spec.rotation_deg, spec.rotation_deg);
    p.shift_x = uniform_range(rng, -spec.shift_frac, spec.shift_frac);
    p.shift_y = uniform_range(rng, -spec.shift_frac, spec.shift_frac);
    p.zoom = uniform_range(rng, spec.zoom_lo, spec.zoom_hi);
    return p;
}

namespace {

// 2x3 affine on (x, y) homogeneous pixel coordinates
struct Affine {
    double m[6];  // [a b c; d e f]

    static Affine identity() { return {{1, 0, 0, 0, 1, 0}}; }

    // this ∘ other: apply other first
    Affine compose(const Affine& o) const {
        return {{m[0] * o.m[0] + m[1] * o.m[3],
                 m[0] * o.m[1] + m[1] * o.m[4],
                 m[0] * o.m[2] + m[1] * o.m[5] + m[2],
                 m[3] * o.m[0] + m[4] * o.m[3],
                 m[3] * o.m[1] + m[4] * o.m[4],
                 m[3] * o.m[2] + m[4] * o.m[5] + m[5]}};
    }

    Affine inverse() const {
        double det = m[0] * m[4] - m[1] * m[3];
        if (det == 0.0) throw NumericError("augment: singular transform");
        double ia = m[4] / det, ib = -m[1] / det;
        double id = -m[3] / det, ie = m[0] / det;
        return {{ia, ib, -(ia * m[2] + ib * m[5]),
                 id, ie, -(id * m[2] + ie * m[5])}};
    }

    void apply(double x, double y, double& ox, double& oy) const {
        ox = m[0] * x + m[1] * y + m[2];
        oy = m[3] * x + m[4] * y + m[5];
    }
};

Affine about_center(double cx, double cy, double a, double b, double d,
                    double e) {
    // conjugate a linear map by the center translation
    Affine t = {{a, b, cx - (a * cx + b * cy), d, e, cy - (d * cx + e * cy)}};
    return t;
}

float sample_bilinear_zero(const Tensor& x, int h, int w, double sy, double sx,
                           int c) {
    int x0 = static_cast<int>(std::floor(sx));
    int y0 = static_cast<int>(std::floor(sy));
    double fx = sx - x0;
    double fy = sy - y0;
    auto tap = [&](int yy, int xx) -> double {
        if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
        return x.at3(yy, xx, c);
    };
    double a = tap(y0, x0);
    double b = tap(y0, x0 + 1);
    double d = tap(y0 + 1, x0);
    double e = tap(y0 + 1, x0 + 1);
    double top = a + fx * (b - a);
    double bot = d + fx * (e - d);
    return static_cast<float>(top + fy * (bot - top));
}

}  // namespace

Tensor apply_augment(const Tensor& x, const AugmentParams& params) {
    if (x.shape().size() != 3)
        throw DimensionError("augment expects [H,W,C], got " +
                             x.shape_string());
    if (params.is_identity()) return x;

    const int h = static_cast<int>(x.shape()[0]);
    const int w = static_cast<int>(x.shape()[1]);
    const int ch = static_cast<int>(x.shape()[2]);
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;

    Affine fwd = Affine::identity();
    if (params.hflip)
        fwd = about_center(cx, cy, -1, 0, 0, 1).compose(fwd);
    if (params.angle_deg != 0.0) {
        double rad = params.angle_deg * std::acos(-1.0) / 180.0;
        double co = std::cos(rad), si = std::sin(rad);
        fwd = about_center(cx, cy, co, -si, si, co).compose(fwd);
    }
    if (params.shift_x != 0.0 || params.shift_y != 0.0) {
        Affine shift = {{1, 0, params.shift_x * w, 0, 1, params.shift_y * h}};
        fwd = shift.compose(fwd);
    }
    if (params.zoom != 1.0)
        fwd = about_center(cx, cy, params.zoom, 0, 0, params.zoom).compose(fwd);

    Affine inv = fwd.inverse();
    Tensor out(x.shape());
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
            double sx, sy;
            inv.apply(xx, y, sx, sy);
            for (int c = 0; c < ch; ++c)
                out.at3(y, xx, c) = sample_bilinear_zero(x, h, w, sy, sx, c);
        }
    }
    return out;
}

Tensor augment(const Tensor& x, const AugmentSpec& spec, std::uint64_t seed,
               std::uint64_t index) {
    return apply_augment(x, draw_augment_params(spec, seed, index));
}

}  // namespace tldc
