#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tldc/augment.hpp"
#include "tldc/optimizer.hpp"
#include "tldc/train.hpp"

namespace tldc {

// everything the command-line workflow needs in one place; file values
// override the defaults, command-line flags override both
struct AppConfig {
    std::string data_root;
    std::string manifest_path;
    std::string model_path;
    std::string history_path;
    int service_port = 8080;
    bool augment_enabled = true;
    bool crop_boxes = false;
    TrainConfig train;
    OptimizerConfig optimizer;
    AugmentSpec augment;

    void validate() const;
};

// strict parse: any key the schema does not know is an error naming the key
AppConfig load_app_config(const std::string& path);

struct CliOverrides {
    std::optional<std::string> data_root;
    std::optional<std::string> manifest_path;
    std::optional<std::string> model_path;
    std::optional<std::string> history_path;
    std::optional<std::string> checkpoint_path;
    std::optional<std::string> loss;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<int> service_port;
    std::optional<bool> augment_enabled;
    std::optional<bool> crop_boxes;
};

AppConfig resolve_config(const std::optional<std::string>& config_path,
                         const CliOverrides& overrides);

}  // namespace tldc
