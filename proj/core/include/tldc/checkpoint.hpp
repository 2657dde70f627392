#pragma once

#include <cstdint>
#include <string>

#include "tldc/model.hpp"

namespace tldc {

struct CheckpointMeta {
    int epoch = 0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    std::uint64_t seed = 0;
};

struct LoadedCheckpoint {
    Model model;
    CheckpointMeta meta;
    std::string digest;  // 64-bit fnv-1a over the file bytes, hex
    std::string manifest_json;
};

void save_checkpoint(Model& model, const std::string& path,
                     const CheckpointMeta& meta);

LoadedCheckpoint load_checkpoint(const std::string& path);

// digest of an arbitrary byte string; exposed so the service can identify a
// model without re-reading the file
std::string fnv1a64_hex(const void* bytes, std::size_t n);

}  // namespace tldc
