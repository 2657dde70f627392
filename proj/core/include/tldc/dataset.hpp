#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tldc/errors.hpp"

namespace tldc {

enum class LeafClass : int { Healthy = 0, Diseased = 1 };

const char* leaf_class_name(LeafClass c);
LeafClass leaf_class_from_name(const std::string& name);

// one normalized bounding box: center + extent, all in [0,1]
struct YoloBox {
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

YoloBox parse_yolo_label(const std::string& line, int line_no = 1);
std::string format_yolo_label(const YoloBox& box);
std::vector<YoloBox> read_yolo_file(const std::string& path);

enum class Split : int { Unassigned = 0, Train = 1, Val = 2, Test = 3 };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct Sample {
    std::string path;
    LeafClass label = LeafClass::Healthy;
    std::vector<YoloBox> boxes;
    Split split = Split::Unassigned;
};

struct SplitRatios {
    double train = 0.80;
    double val = 0.15;
    double test = 0.05;

    void validate() const;
};

struct DatasetManifest {
    std::vector<Sample> samples;
    std::uint64_t seed = 0;
    SplitRatios ratios;

    std::size_t count(Split s) const;
    std::size_t count(Split s, LeafClass c) const;
    std::vector<Sample> subset(Split s) const;
};

// walks <root>/Healthy and <root>/Diseased for jpg/jpeg/png files, sorted by
// name within each class, and attaches any sibling .txt label file
std::vector<Sample> scan_dataset_dir(const std::string& root);

DatasetManifest split_dataset(std::vector<Sample> samples, SplitRatios ratios,
                              std::uint64_t seed);

void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

}  // namespace tldc
