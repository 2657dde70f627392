#include "tldc/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tldc {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "TLDC1";

json layer_to_json(const LayerSpec& spec) {
    json j;
    j["kind"] = layer_kind_name(spec.kind);
    switch (spec.kind) {
        case LayerKind::Conv2d: j["filters"] = spec.filters; break;
        case LayerKind::Dense: j["units"] = spec.units; break;
        case LayerKind::Dropout: j["rate"] = spec.dropout_rate; break;
        default: break;
    }
    return j;
}

LayerSpec layer_from_json(const json& j) {
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ManifestError("layer entry missing kind");
    LayerKind kind = layer_kind_from_name(j["kind"].get<std::string>());
    switch (kind) {
        case LayerKind::Conv2d:
            if (!j.contains("filters"))
                throw ManifestError("conv2d layer missing filters");
            return LayerSpec::conv2d(j["filters"].get<std::size_t>());
        case LayerKind::Dense:
            if (!j.contains("units"))
                throw ManifestError("dense layer missing units");
            return LayerSpec::dense(j["units"].get<std::size_t>());
        case LayerKind::Dropout:
            if (!j.contains("rate"))
                throw ManifestError("dropout layer missing rate");
            return LayerSpec::dropout(j["rate"].get<double>());
        case LayerKind::MaxPool2d: return LayerSpec::maxpool2d();
        case LayerKind::Flatten: return LayerSpec::flatten();
        case LayerKind::Relu: return LayerSpec::relu();
        case LayerKind::Softmax: return LayerSpec::softmax();
    }
    throw ManifestError("unknown layer kind");
}

}  // namespace

std::string fnv1a64_hex(const void* bytes, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

void save_checkpoint(Model& model, const std::string& path,
                     const CheckpointMeta& meta) {
    const ModelConfig& cfg = model.config();

    json manifest;
    json cfg_json;
    cfg_json["input_h"] = cfg.input_h;
    cfg_json["input_w"] = cfg.input_w;
    cfg_json["input_c"] = cfg.input_c;
    cfg_json["classes"] = cfg.classes;
    cfg_json["layers"] = json::array();
    for (const auto& spec : cfg.layers)
        cfg_json["layers"].push_back(layer_to_json(spec));
    manifest["config"] = cfg_json;

    manifest["tensors"] = json::array();
    auto params = model.named_parameters();
    for (const auto& ref : params) {
        json t;
        t["name"] = ref.name;
        t["shape"] = ref.tensor->shape();
        manifest["tensors"].push_back(t);
    }

    manifest["epoch"] = meta.epoch;
    manifest["val_loss"] = meta.val_loss;
    manifest["val_acc"] = meta.val_acc;
    manifest["seed"] = meta.seed;

    std::string manifest_text = manifest.dump(2);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out << kMagic << '\n' << manifest_text.size() << '\n' << manifest_text;
    for (const auto& ref : params) {
        const auto& data = ref.tensor->raw();
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
    if (!out) throw IoError("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string file = buffer.str();

    std::size_t pos = file.find('\n');
    if (pos == std::string::npos || file.substr(0, pos) != kMagic)
        throw BadMagicError("checkpoint magic mismatch: " + path);

    std::size_t len_end = file.find('\n', pos + 1);
    if (len_end == std::string::npos)
        throw ManifestError("checkpoint missing manifest length: " + path);
    std::size_t manifest_len = 0;
    try {
        std::size_t used = 0;
        std::string len_text = file.substr(pos + 1, len_end - pos - 1);
        manifest_len = std::stoull(len_text, &used);
        if (used != len_text.size()) throw std::invalid_argument(len_text);
    } catch (const std::exception&) {
        throw ManifestError("checkpoint manifest length is not a number: " +
                            path);
    }
    if (len_end + 1 + manifest_len > file.size())
        throw ManifestError("checkpoint manifest truncated: " + path);

    std::string manifest_text = file.substr(len_end + 1, manifest_len);
    json manifest;
    try {
        manifest = json::parse(manifest_text);
    } catch (const json::exception& e) {
        throw ManifestError(std::string("checkpoint manifest unparsable: ") +
                            e.what());
    }

    LoadedCheckpoint loaded;
    try {
        const json& cfg_json = manifest.at("config");
        ModelConfig cfg;
        cfg.input_h = cfg_json.at("input_h").get<std::size_t>();
        cfg.input_w = cfg_json.at("input_w").get<std::size_t>();
        cfg.input_c = cfg_json.at("input_c").get<std::size_t>();
        cfg.classes = cfg_json.at("classes").get<std::size_t>();
        for (const auto& lj : cfg_json.at("layers"))
            cfg.layers.push_back(layer_from_json(lj));
        cfg.validate();

        loaded.meta.epoch = manifest.at("epoch").get<int>();
        loaded.meta.val_loss = manifest.at("val_loss").get<double>();
        loaded.meta.val_acc = manifest.at("val_acc").get<double>();
        loaded.meta.seed = manifest.at("seed").get<std::uint64_t>();

        loaded.model = Model::build(cfg, loaded.meta.seed);
    } catch (const json::exception& e) {
        throw ManifestError(std::string("checkpoint manifest incomplete: ") +
                            e.what());
    } catch (const Error& e) {
        throw ManifestError(std::string("checkpoint config invalid: ") +
                            e.what());
    }

    auto params = loaded.model.named_parameters();
    std::size_t blob_floats = 0;
    try {
        const json& tensors = manifest.at("tensors");
        if (!tensors.is_array() || tensors.size() != params.size())
            throw ManifestError(
                "checkpoint tensor list does not match the model");
        for (std::size_t i = 0; i < params.size(); ++i) {
            const json& t = tensors[i];
            std::string name = t.at("name").get<std::string>();
            std::vector<std::size_t> shape =
                t.at("shape").get<std::vector<std::size_t>>();
            if (name != params[i].name)
                throw ManifestError(
                    "checkpoint tensor name mismatch: expected " +
                    params[i].name + ", got " + name);
            if (shape != params[i].tensor->shape())
                throw ManifestError("checkpoint tensor shape mismatch for " +
                                    name);
            blob_floats += params[i].tensor->size();
        }
    } catch (const json::exception& e) {
        throw ManifestError(std::string("checkpoint tensor list malformed: ") +
                            e.what());
    }

    std::size_t blob_offset = len_end + 1 + manifest_len;
    std::size_t blob_bytes = file.size() - blob_offset;
    if (blob_bytes != blob_floats * sizeof(float))
        throw BlobLengthError(
            "checkpoint blob is " + std::to_string(blob_bytes) +
            " bytes, manifest implies " +
            std::to_string(blob_floats * sizeof(float)));

    const char* blob = file.data() + blob_offset;
    for (auto& ref : params) {
        auto& data = ref.tensor->raw();
        std::memcpy(data.data(), blob, data.size() * sizeof(float));
        blob += data.size() * sizeof(float);
    }

    loaded.digest = fnv1a64_hex(file.data(), file.size());
    loaded.manifest_json = std::move(manifest_text);
    return loaded;
}

}  // namespace tldc
