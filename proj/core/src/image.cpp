#include "tldc/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace tldc {

static Tensor mat_to_tensor(const cv::Mat& bgr) {
    Tensor out({static_cast<std::size_t>(bgr.rows),
                static_cast<std::size_t>(bgr.cols), 3});
    const float scale = 1.0f / 255.0f;
    for (int y = 0; y < bgr.rows; ++y) {
        const unsigned char* row = bgr.ptr<unsigned char>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            // imgcodecs hands back BGR byte triples; store RGB
            out.at3(y, x, 0) = row[x * 3 + 2] * scale;
            out.at3(y, x, 1) = row[x * 3 + 1] * scale;
            out.at3(y, x, 2) = row[x * 3 + 0] * scale;
        }
    }
    return out;
}

Tensor load_image_raw(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw IoError("cannot load image: " + path);
    return mat_to_tensor(bgr);
}

Tensor decode_image_raw(const std::vector<unsigned char>& bytes) {
    if (bytes.empty()) throw DataError("image decode failed: empty payload");
    cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1,
                const_cast<unsigned char*>(bytes.data()));
    cv::Mat bgr = cv::imdecode(buf, cv::IMREAD_COLOR);
    if (bgr.empty()) throw DataError("image decode failed");
    return mat_to_tensor(bgr);
}

Tensor load_image(const std::string& path, int target_h, int target_w) {
    return resize_bilinear(load_image_raw(path), target_h, target_w);
}

Tensor decode_image(const std::vector<unsigned char>& bytes, int target_h,
                    int target_w) {
    return resize_bilinear(decode_image_raw(bytes), target_h, target_w);
}

Tensor load_image_cropped(const std::string& path,
                          const std::vector<YoloBox>& boxes, int target_h,
                          int target_w) {
    Tensor raw = load_image_raw(path);
    if (!boxes.empty()) raw = crop_union_box(raw, boxes);
    return resize_bilinear(raw, target_h, target_w);
}

Tensor resize_bilinear(const Tensor& src, int out_h, int out_w) {
    if (src.shape().size() != 3 || src.shape()[2] != 3)
        throw DimensionError("resize expects [H,W,3], got " +
                             src.shape_string());
    if (out_h < 1 || out_w < 1)
        throw ParameterError("resize target must be at least 1x1");

    const int in_h = static_cast<int>(src.shape()[0]);
    const int in_w = static_cast<int>(src.shape()[1]);
    if (in_h == out_h && in_w == out_w) return src;

    Tensor out({static_cast<std::size_t>(out_h),
                static_cast<std::size_t>(out_w), 3});
    const double sy_scale = static_cast<double>(in_h) / out_h;
    const double sx_scale = static_cast<double>(in_w) / out_w;

    for (int y = 0; y < out_h; ++y) {
        double sy = (y + 0.5) * sy_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(in_h - 1));
        int y0 = static_cast<int>(sy);
        int y1 = std::min(y0 + 1, in_h - 1);
        double fy = sy - y0;
        for (int x = 0; x < out_w; ++x) {
            double sx = (x + 0.5) * sx_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(in_w - 1));
            int x0 = static_cast<int>(sx);
            int x1 = std::min(x0 + 1, in_w - 1);
            double fx = sx - x0;
            for (int c = 0; c < 3; ++c) {
                // nested lerp keeps constant regions bit-exact
                double a = src.at3(y0, x0, c);
                double b = src.at3(y0, x1, c);
                double d = src.at3(y1, x0, c);
                double e = src.at3(y1, x1, c);
                double top = a + fx * (b - a);
                double bot = d + fx * (e - d);
                out.at3(y, x, c) = static_cast<float>(top + fy * (bot - top));
            }
        }
    }
    return out;
}

Tensor crop_union_box(const Tensor& src, const std::vector<YoloBox>& boxes) {
    if (boxes.empty()) return src;
    const int h = static_cast<int>(src.shape()[0]);
    const int w = static_cast<int>(src.shape()[1]);

    double u_x0 = 1.0, u_y0 = 1.0, u_x1 = 0.0, u_y1 = 0.0;
    for (const auto& b : boxes) {
        u_x0 = std::min(u_x0, b.cx - b.w / 2.0);
        u_y0 = std::min(u_y0, b.cy - b.h / 2.0);
        u_x1 = std::max(u_x1, b.cx + b.w / 2.0);
        u_y1 = std::max(u_y1, b.cy + b.h / 2.0);
    }
    int px0 = std::clamp(static_cast<int>(std::floor(u_x0 * w)), 0, w - 1);
    int py0 = std::clamp(static_cast<int>(std::floor(u_y0 * h)), 0, h - 1);
    int px1 = std::clamp(static_cast<int>(std::ceil(u_x1 * w)), px0 + 1, w);
    int py1 = std::clamp(static_cast<int>(std::ceil(u_y1 * h)), py0 + 1, h);

    Tensor out({static_cast<std::size_t>(py1 - py0),
                static_cast<std::size_t>(px1 - px0), 3});
    for (int y = py0; y < py1; ++y)
        for (int x = px0; x < px1; ++x)
            for (int c = 0; c < 3; ++c)
                out.at3(y - py0, x - px0, c) = src.at3(y, x, c);
    return out;
}

// ----------------------------------------------------------------- file forms

static unsigned char to_byte(float v) {
    float scaled = std::clamp(v, 0.0f, 1.0f) * 255.0f;
    return static_cast<unsigned char>(std::lround(scaled));
}

void write_image(const std::string& path, const Tensor& img) {
    if (img.shape().size() != 3 || img.shape()[2] != 3)
        throw DimensionError("write_image expects [H,W,3], got " +
                             img.shape_string());
    const int h = static_cast<int>(img.shape()[0]);
    const int w = static_cast<int>(img.shape()[1]);
    cv::Mat bgr(h, w, CV_8UC3);
    for (int y = 0; y < h; ++y) {
        unsigned char* row = bgr.ptr<unsigned char>(y);
        for (int x = 0; x < w; ++x) {
            row[x * 3 + 0] = to_byte(img.at3(y, x, 2));
            row[x * 3 + 1] = to_byte(img.at3(y, x, 1));
            row[x * 3 + 2] = to_byte(img.at3(y, x, 0));
        }
    }
    if (!cv::imwrite(path, bgr)) throw IoError("cannot write image: " + path);
}

void write_ppm(const std::string& path, const Tensor& img) {
    if (img.shape().size() != 3 || img.shape()[2] != 3)
        throw DimensionError("write_ppm expects [H,W,3], got " +
                             img.shape_string());
    const int h = static_cast<int>(img.shape()[0]);
    const int w = static_cast<int>(img.shape()[1]);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write ppm: " + path);
    out << "P6\n" << w << ' ' << h << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                row[x * 3 + c] = to_byte(img.at3(y, x, c));
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw IoError("ppm write failed: " + path);
}

Tensor read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open ppm: " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || w < 1 || h < 1 || maxval != 255)
        throw ParseError("not a maxval-255 P6 ppm: " + path);
    in.get();
    Tensor img({static_cast<std::size_t>(h), static_cast<std::size_t>(w), 3});
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), row.size());
        if (!in) throw ParseError("truncated ppm: " + path);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at3(y, x, c) = row[x * 3 + c] / 255.0f;
    }
    return img;
}

void write_pfm(const std::string& path, const TensorT<float>& values) {
    if (values.shape().size() != 2)
        throw DimensionError("write_pfm expects [H,W], got " +
                             values.shape_string());
    const int h = static_cast<int>(values.shape()[0]);
    const int w = static_cast<int>(values.shape()[1]);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write pfm: " + path);
    // negative scale marks little-endian; rows run bottom to top
    out << "Pf\n" << w << ' ' << h << "\n-1.0\n";
    for (int y = h - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(&values.at2(y, 0)),
                  static_cast<std::streamsize>(sizeof(float)) * w);
    if (!out) throw IoError("pfm write failed: " + path);
}

TensorT<float> read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pfm: " + path);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0.0;
    in >> magic >> w >> h >> scale;
    if (magic != "Pf" || w < 1 || h < 1 || scale >= 0.0)
        throw ParseError("not a little-endian grayscale pfm: " + path);
    in.get();
    TensorT<float> values({static_cast<std::size_t>(h),
                           static_cast<std::size_t>(w)});
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(&values.at2(y, 0)),
                static_cast<std::streamsize>(sizeof(float)) * w);
        if (!in) throw ParseError("truncated pfm: " + path);
    }
    return values;
}

}  // namespace tldc
