#include "tldc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tldc/rng.hpp"

namespace fs = std::filesystem;

namespace tldc {

const char* leaf_class_name(LeafClass c) {
    return c == LeafClass::Healthy ? "Healthy" : "Diseased";
}

LeafClass leaf_class_from_name(const std::string& name) {
    if (name == "Healthy") return LeafClass::Healthy;
    if (name == "Diseased") return LeafClass::Diseased;
    throw ParseError("unknown class name: " + name);
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        default: return "unassigned";
    }
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    if (name == "unassigned") return Split::Unassigned;
    throw ParseError("unknown split name: " + name);
}

// ---------------------------------------------------------------- yolo labels

YoloBox parse_yolo_label(const std::string& line, int line_no) {
    auto fail = [&](const std::string& what) {
        throw ParseError("label line " + std::to_string(line_no) + ": " + what);
    };

    std::istringstream in(line);
    std::vector<std::string> fields;
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    if (fields.size() != 5)
        fail("expected 5 fields, got " + std::to_string(fields.size()));

    YoloBox box;
    try {
        std::size_t used = 0;
        box.class_id = std::stoi(fields[0], &used);
        if (used != fields[0].size()) throw std::invalid_argument(fields[0]);
        double* coords[4] = {&box.cx, &box.cy, &box.w, &box.h};
        for (int i = 0; i < 4; ++i) {
            *coords[i] = std::stod(fields[i + 1], &used);
            if (used != fields[i + 1].size())
                throw std::invalid_argument(fields[i + 1]);
        }
    } catch (const std::exception&) {
        fail("non-numeric field");
    }

    const char* names[4] = {"cx", "cy", "w", "h"};
    const double vals[4] = {box.cx, box.cy, box.w, box.h};
    for (int i = 0; i < 4; ++i) {
        if (!(vals[i] >= 0.0 && vals[i] <= 1.0))
            fail(std::string(names[i]) + " out of range [0,1]");
    }
    return box;
}

std::string format_yolo_label(const YoloBox& box) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g %.17g", box.class_id,
                  box.cx, box.cy, box.w, box.h);
    return buf;
}

std::vector<YoloBox> read_yolo_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file: " + path);
    std::vector<YoloBox> boxes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        boxes.push_back(parse_yolo_label(line, line_no));
    }
    return boxes;
}

// ------------------------------------------------------------------ manifests

void SplitRatios::validate() const {
    if (train < 0.0 || val < 0.0 || test < 0.0)
        throw ParameterError("split ratios must be non-negative");
    if (std::abs(train + val + test - 1.0) > 1e-6)
        throw ParameterError("split ratios must sum to 1");
}

std::size_t DatasetManifest::count(Split s) const {
    std::size_t n = 0;
    for (const auto& sample : samples)
        if (sample.split == s) ++n;
    return n;
}

std::size_t DatasetManifest::count(Split s, LeafClass c) const {
    std::size_t n = 0;
    for (const auto& sample : samples)
        if (sample.split == s && sample.label == c) ++n;
    return n;
}

std::vector<Sample> DatasetManifest::subset(Split s) const {
    std::vector<Sample> out;
    for (const auto& sample : samples)
        if (sample.split == s) out.push_back(sample);
    return out;
}

static bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

static std::string sibling_label_path(const std::string& image_path) {
    fs::path p(image_path);
    p.replace_extension(".txt");
    return p.string();
}

std::vector<Sample> scan_dataset_dir(const std::string& root) {
    if (!fs::is_directory(root))
        throw IoError("dataset root is not a directory: " + root);

    std::vector<Sample> samples;
    for (LeafClass cls : {LeafClass::Healthy, LeafClass::Diseased}) {
        fs::path dir = fs::path(root) / leaf_class_name(cls);
        if (!fs::is_directory(dir))
            throw DataError("missing class directory: " + dir.string());

        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && has_image_extension(entry.path()))
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());

        for (const auto& file : files) {
            Sample sample;
            sample.path = file;
            sample.label = cls;
            std::string label_path = sibling_label_path(file);
            if (fs::is_regular_file(label_path))
                sample.boxes = read_yolo_file(label_path);
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

DatasetManifest split_dataset(std::vector<Sample> samples, SplitRatios ratios,
                              std::uint64_t seed) {
    ratios.validate();

    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.ratios = ratios;

    for (LeafClass cls : {LeafClass::Healthy, LeafClass::Diseased}) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].label == cls) indices.push_back(i);
        if (indices.empty())
            throw DataError(std::string("empty class: ") + leaf_class_name(cls));

        std::uint64_t class_seed =
            derive_seed(seed, static_cast<std::uint64_t>(cls));
        shuffle_in_place(indices, class_seed);

        // floor per split; whatever the floors leave over goes to train
        std::size_t n = indices.size();
        std::size_t n_train = static_cast<std::size_t>(
            std::floor(ratios.train * static_cast<double>(n) + 1e-9));
        std::size_t n_val = static_cast<std::size_t>(
            std::floor(ratios.val * static_cast<double>(n) + 1e-9));
        std::size_t n_test = static_cast<std::size_t>(
            std::floor(ratios.test * static_cast<double>(n) + 1e-9));
        n_train += n - (n_train + n_val + n_test);

        for (std::size_t k = 0; k < n; ++k) {
            Split s = k < n_train                 ? Split::Train
                      : k < n_train + n_val       ? Split::Val
                                                  : Split::Test;
            samples[indices[k]].split = s;
        }
    }

    manifest.samples = std::move(samples);
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    for (const auto& sample : manifest.samples) {
        out << sample.path << '\t' << leaf_class_name(sample.label) << '\t'
            << split_name(sample.split) << '\n';
    }
    if (!out) throw IoError("manifest write failed: " + path);
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);

    DatasetManifest manifest;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&](const std::string& what) {
            throw ParseError("manifest line " + std::to_string(line_no) + ": " +
                             what);
        };
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            fail("expected path<TAB>label<TAB>split");
        if (line.find('\t', t2 + 1) != std::string::npos) fail("extra field");

        Sample sample;
        sample.path = line.substr(0, t1);
        try {
            sample.label = leaf_class_from_name(line.substr(t1 + 1, t2 - t1 - 1));
            sample.split = split_from_name(line.substr(t2 + 1));
        } catch (const ParseError& e) {
            fail(e.what());
        }
        std::string label_path = sibling_label_path(sample.path);
        if (fs::is_regular_file(label_path))
            sample.boxes = read_yolo_file(label_path);
        manifest.samples.push_back(std::move(sample));
    }
    return manifest;
}

}  // namespace tldc
