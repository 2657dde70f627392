#include "tldc/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace tldc {

using nlohmann::json;

void AppConfig::validate() const {
    train.validate();
    optimizer.validate();
    augment.validate();
    if (service_port < 1 || service_port > 65535)
        throw ParameterError("config: service_port out of range");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ParseError("config: unknown key: " + where + it.key());
}

template <typename T>
void take(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

void apply_train(const json& j, TrainConfig& cfg) {
    reject_unknown(j, {"epochs", "batch_size", "loss", "seed",
                       "checkpoint_path"},
                   "train.");
    take(j, "epochs", cfg.epochs);
    take(j, "batch_size", cfg.batch_size);
    take(j, "seed", cfg.seed);
    take(j, "checkpoint_path", cfg.checkpoint_path);
    if (j.contains("loss"))
        cfg.loss = loss_kind_from_name(j.at("loss").get<std::string>());
}

void apply_optimizer(const json& j, OptimizerConfig& cfg) {
    reject_unknown(j, {"alpha", "beta1", "beta2", "epsilon"}, "optimizer.");
    take(j, "alpha", cfg.alpha);
    take(j, "beta1", cfg.beta1);
    take(j, "beta2", cfg.beta2);
    take(j, "epsilon", cfg.epsilon);
}

void apply_augment(const json& j, AugmentSpec& cfg) {
    reject_unknown(j, {"rescale", "rotation_deg", "shift_frac", "zoom_lo",
                       "zoom_hi", "hflip_prob"},
                   "augment.");
    take(j, "rescale", cfg.rescale);
    take(j, "rotation_deg", cfg.rotation_deg);
    take(j, "shift_frac", cfg.shift_frac);
    take(j, "zoom_lo", cfg.zoom_lo);
    take(j, "zoom_hi", cfg.zoom_hi);
    take(j, "hflip_prob", cfg.hflip_prob);
}

}  // namespace

AppConfig load_app_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);

    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top level must be an object");

    AppConfig cfg;
    try {
        reject_unknown(j,
                       {"data_root", "manifest_path", "model_path",
                        "history_path", "service_port", "augment_enabled",
                        "crop_boxes", "train", "optimizer", "augment"},
                       "");
        take(j, "data_root", cfg.data_root);
        take(j, "manifest_path", cfg.manifest_path);
        take(j, "model_path", cfg.model_path);
        take(j, "history_path", cfg.history_path);
        take(j, "service_port", cfg.service_port);
        take(j, "augment_enabled", cfg.augment_enabled);
        take(j, "crop_boxes", cfg.crop_boxes);
        if (j.contains("train")) apply_train(j.at("train"), cfg.train);
        if (j.contains("optimizer"))
            apply_optimizer(j.at("optimizer"), cfg.optimizer);
        if (j.contains("augment")) apply_augment(j.at("augment"), cfg.augment);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

AppConfig resolve_config(const std::optional<std::string>& config_path,
                         const CliOverrides& overrides) {
    AppConfig cfg;
    if (config_path) cfg = load_app_config(*config_path);

    if (overrides.data_root) cfg.data_root = *overrides.data_root;
    if (overrides.manifest_path) cfg.manifest_path = *overrides.manifest_path;
    if (overrides.model_path) cfg.model_path = *overrides.model_path;
    if (overrides.history_path) cfg.history_path = *overrides.history_path;
    if (overrides.checkpoint_path)
        cfg.train.checkpoint_path = *overrides.checkpoint_path;
    if (overrides.loss) cfg.train.loss = loss_kind_from_name(*overrides.loss);
    if (overrides.epochs) cfg.train.epochs = *overrides.epochs;
    if (overrides.batch_size) cfg.train.batch_size = *overrides.batch_size;
    if (overrides.alpha) cfg.optimizer.alpha = *overrides.alpha;
    if (overrides.seed) cfg.train.seed = *overrides.seed;
    if (overrides.service_port) cfg.service_port = *overrides.service_port;
    if (overrides.augment_enabled)
        cfg.augment_enabled = *overrides.augment_enabled;
    if (overrides.crop_boxes) cfg.crop_boxes = *overrides.crop_boxes;

    cfg.validate();
    return cfg;
}

}  // namespace tldc
