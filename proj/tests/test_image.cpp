#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "tldc/image.hpp"
#include "test_support.hpp"

using namespace tldc;
using namespace testsup;

TEST_SUITE("image") {

TEST_CASE("png round-trip through disk") {
    TempDir dir("img");
    // quantized-friendly values: multiples of 1/255 survive the u8 detour
    Tensor img({4, 5, 3});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = float((i * 7) % 256) / 255.0f;
    const std::string path = dir.file("t.png");
    write_image(path, img);

    Tensor back = load_image_raw(path);
    REQUIRE(back.shape() == img.shape());
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(back[i] == doctest::Approx(img[i]).epsilon(1e-6));
}

TEST_CASE("load_image resizes to 224 and stays in range") {
    TempDir dir("img2");
    Tensor img = synth_leaf_image(37, 61, 1, 5);
    write_image(dir.file("leaf.png"), img);
    Tensor t = load_image(dir.file("leaf.png"));
    REQUIRE(t.shape() == std::vector<std::size_t>{224, 224, 3});
    for (std::size_t i = 0; i < t.size(); ++i) {
        REQUIRE(t[i] >= 0.0f);
        REQUIRE(t[i] <= 1.0f);
    }
}

TEST_CASE("solid color upsamples to a bit-equal solid color") {
    TempDir dir("img3");
    Tensor img({50, 50, 3});
    for (std::size_t i = 0; i < img.size(); i += 3) {
        img[i] = 100.0f / 255.0f;
        img[i + 1] = 150.0f / 255.0f;
        img[i + 2] = 200.0f / 255.0f;
    }
    write_image(dir.file("solid.png"), img);
    Tensor t = load_image(dir.file("solid.png"));
    REQUIRE(t.shape() == std::vector<std::size_t>{224, 224, 3});
    for (std::size_t i = 0; i < t.size(); i += 3) {
        CHECK(t[i] == t[0]);
        CHECK(t[i + 1] == t[1]);
        CHECK(t[i + 2] == t[2]);
    }
    CHECK(t[0] == doctest::Approx(100.0 / 255.0).epsilon(1e-6));
    CHECK(t[1] == doctest::Approx(150.0 / 255.0).epsilon(1e-6));
    CHECK(t[2] == doctest::Approx(200.0 / 255.0).epsilon(1e-6));
}

TEST_CASE("resize at the native size is the identity") {
    auto rng = rng_for(1401);
    Tensor img = random_tensor<float>({224, 224, 3}, rng, 0.0f, 1.0f);
    Tensor out = resize_bilinear(img, 224, 224);
    REQUIRE(out.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i) REQUIRE(out[i] == img[i]);
}

TEST_CASE("resize interpolates known values") {
    // 1x2 -> 1x4 with half-pixel centers: x_src = (x+0.5)/2 - 0.5
    Tensor img({1, 2, 3});
    for (int c = 0; c < 3; ++c) {
        img.at3(0, 0, c) = 0.0f;
        img.at3(0, 1, c) = 1.0f;
    }
    Tensor out = resize_bilinear(img, 1, 4);
    CHECK(out.at3(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(out.at3(0, 1, 0) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(out.at3(0, 2, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(out.at3(0, 3, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("resize averages on 2x downsample") {
    Tensor img({2, 2, 3});
    for (int c = 0; c < 3; ++c) {
        img.at3(0, 0, c) = 0.0f;
        img.at3(0, 1, c) = 1.0f;
        img.at3(1, 0, c) = 1.0f;
        img.at3(1, 1, c) = 0.0f;
    }
    Tensor out = resize_bilinear(img, 1, 1);
    CHECK(out.at3(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("resize rejects non-image tensors") {
    CHECK_THROWS_AS(resize_bilinear(Tensor({5, 5}), 2, 2), DimensionError);
    CHECK_THROWS_AS(resize_bilinear(Tensor({5, 5, 1}), 2, 2), DimensionError);
    CHECK_THROWS_AS(resize_bilinear(Tensor({5, 5, 3}), 0, 2), ParameterError);
}

TEST_CASE("missing or corrupt files raise IoError with the path") {
    CHECK_THROWS_AS(load_image_raw("/nonexistent/leaf.png"), IoError);
    try {
        load_image_raw("/nonexistent/leaf.png");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/leaf.png") != std::string::npos);
    }

    TempDir dir("img4");
    {
        std::ofstream f(dir.file("junk.png"), std::ios::binary);
        f << "not an image at all";
    }
    CHECK_THROWS_AS(load_image_raw(dir.file("junk.png")), IoError);
}

TEST_CASE("decode_image mirrors load_image on the same bytes") {
    TempDir dir("img5");
    Tensor img = synth_leaf_image(30, 40, 0, 9);
    write_image(dir.file("x.png"), img);

    std::ifstream f(dir.file("x.png"), std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    Tensor a = load_image(dir.file("x.png"), 32, 32);
    Tensor b = decode_image(bytes, 32, 32);
    REQUIRE(a.same_shape(b));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("decode_image rejects garbage") {
    std::vector<unsigned char> junk{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_image_raw(junk), DataError);
    CHECK_THROWS_AS(decode_image_raw({}), DataError);
}

TEST_CASE("ppm round-trip") {
    TempDir dir("ppm");
    Tensor img({3, 5, 3});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = float((i * 11) % 256) / 255.0f;
    write_ppm(dir.file("t.ppm"), img);
    Tensor back = read_ppm(dir.file("t.ppm"));
    REQUIRE(back.shape() == img.shape());
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(back[i] == doctest::Approx(img[i]).epsilon(1e-6));
}

TEST_CASE("pfm round-trip is exact") {
    TempDir dir("pfm");
    auto rng = rng_for(1501);
    TensorT<float> vals = random_tensor<float>({7, 9}, rng, -3.0f, 3.0f);
    write_pfm(dir.file("t.pfm"), vals);
    TensorT<float> back = read_pfm(dir.file("t.pfm"));
    REQUIRE(back.shape() == vals.shape());
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(back[i] == vals[i]);
}

TEST_CASE("crop_union_box extracts the covered region") {
    Tensor img({10, 10, 3});
    for (std::size_t y = 0; y < 10; ++y)
        for (std::size_t x = 0; x < 10; ++x)
            for (std::size_t c = 0; c < 3; ++c) img.at3(y, x, c) = float(y * 10 + x);

    // box centered (0.5, 0.5), size 0.4x0.4: x,y in [0.3,0.7] -> px [3,7)
    YoloBox box{0, 0.5, 0.5, 0.4, 0.4};
    Tensor crop = crop_union_box(img, {box});
    REQUIRE(crop.dim(0) == 4);
    REQUIRE(crop.dim(1) == 4);
    CHECK(crop.at3(0, 0, 0) == img.at3(3, 3, 0));
    CHECK(crop.at3(3, 3, 0) == img.at3(6, 6, 0));
}

TEST_CASE("crop_union_box unions multiple boxes and clamps") {
    Tensor img({8, 8, 3});
    YoloBox a{0, 0.125, 0.125, 0.25, 0.25};  // x,y in [0, 0.25]
    YoloBox b{0, 0.875, 0.875, 0.5, 0.5};    // x,y in [0.625, 1.125] -> clamp
    Tensor crop = crop_union_box(img, {a, b});
    CHECK(crop.dim(0) == 8);
    CHECK(crop.dim(1) == 8);

    // no boxes: full frame unchanged
    Tensor same = crop_union_box(img, {});
    CHECK(same.same_shape(img));
}

TEST_CASE("load_image_cropped = crop then resize") {
    TempDir dir("crop");
    Tensor img = synth_leaf_image(40, 40, 1, 3);
    write_image(dir.file("c.png"), img);
    YoloBox box{1, 0.5, 0.5, 0.5, 0.5};

    Tensor direct = load_image_cropped(dir.file("c.png"), {box}, 16, 16);
    Tensor manual = resize_bilinear(crop_union_box(load_image_raw(dir.file("c.png")), {box}), 16, 16);
    REQUIRE(direct.same_shape(manual));
    for (std::size_t i = 0; i < direct.size(); ++i) CHECK(direct[i] == manual[i]);
}

}
