#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tldc/checkpoint.hpp"
#include "tldc/config.hpp"
#include "tldc/dataset.hpp"
#include "tldc/gradcam.hpp"
#include "tldc/image.hpp"
#include "tldc/inference.hpp"
#include "tldc/metrics.hpp"
#include "tldc/service.hpp"
#include "tldc/train.hpp"

namespace {

using namespace tldc;

int cmd_split(const std::string& data, std::uint64_t seed,
              const std::string& out) {
    auto samples = scan_dataset_dir(data);
    DatasetManifest manifest = split_dataset(std::move(samples), SplitRatios{},
                                             seed);
    write_manifest(manifest, out);

    for (LeafClass cls : {LeafClass::Healthy, LeafClass::Diseased}) {
        std::printf("%s: train=%zu val=%zu test=%zu\n", leaf_class_name(cls),
                    manifest.count(Split::Train, cls),
                    manifest.count(Split::Val, cls),
                    manifest.count(Split::Test, cls));
    }
    std::printf("total: train=%zu val=%zu test=%zu\n",
                manifest.count(Split::Train), manifest.count(Split::Val),
                manifest.count(Split::Test));
    std::printf("manifest written to %s\n", out.c_str());
    return 0;
}

int cmd_train(const AppConfig& cfg) {
    if (cfg.manifest_path.empty())
        throw ParameterError("train needs --manifest");
    if (cfg.train.checkpoint_path.empty())
        throw ParameterError("train needs --out");

    DatasetManifest manifest = read_manifest(cfg.manifest_path);
    ModelConfig model_cfg = default_model_config();

    ImageFileProvider train_data(manifest.subset(Split::Train),
                                 static_cast<int>(model_cfg.input_h),
                                 static_cast<int>(model_cfg.input_w),
                                 cfg.crop_boxes);
    if (cfg.augment_enabled)
        train_data.enable_augment(cfg.augment, cfg.train.seed);
    ImageFileProvider val_data(manifest.subset(Split::Val),
                               static_cast<int>(model_cfg.input_h),
                               static_cast<int>(model_cfg.input_w),
                               cfg.crop_boxes);

    Model model = Model::build(model_cfg, cfg.train.seed);
    TrainingHistory history = fit(
        model, train_data, val_data, cfg.train, cfg.optimizer,
        [](const EpochStats& e) {
            std::printf(
                "epoch %d train_loss=%.6f train_acc=%.4f val_loss=%.6f "
                "val_acc=%.4f\n",
                e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc);
            std::fflush(stdout);
        });

    std::string history_path = cfg.history_path.empty()
                                   ? cfg.train.checkpoint_path + ".history.csv"
                                   : cfg.history_path;
    history.write_csv(history_path);

    const EpochStats& last = history.epochs.back();
    std::printf("final val_loss=%.6f val_acc=%.4f\n", last.val_loss,
                last.val_acc);
    std::printf("best epoch %d val_loss=%.6f\n", history.best_epoch,
                history.best_val_loss);
    std::printf("checkpoint written to %s\n",
                cfg.train.checkpoint_path.c_str());
    std::printf("history written to %s\n", history_path.c_str());
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& manifest_path,
             const std::string& split, const std::string& format,
             bool crop_boxes) {
    LoadedCheckpoint loaded = load_checkpoint(model_path);
    DatasetManifest manifest = read_manifest(manifest_path);
    auto samples = manifest.subset(split_from_name(split));
    if (samples.empty())
        throw DataError("split has no samples: " + split);

    EvalOptions opts;
    opts.crop_boxes = crop_boxes;
    MetricsReport report = evaluate_model(loaded.model, samples, opts);
    if (format == "csv")
        std::fputs(report_csv(report).c_str(), stdout);
    else
        std::fputs(report_text(report).c_str(), stdout);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& image_path,
                const std::string& gradcam_path,
                const std::string& heatmap_path) {
    LoadedCheckpoint loaded = load_checkpoint(model_path);
    Tensor img = load_image(image_path,
                            static_cast<int>(loaded.model.config().input_h),
                            static_cast<int>(loaded.model.config().input_w));
    PredictionResponse response =
        predict_image(loaded.model, img, loaded.digest);
    std::printf("%s\n", response.to_json_text().c_str());

    if (!gradcam_path.empty() || !heatmap_path.empty()) {
        Heatmap map = grad_cam(loaded.model, img,
                               static_cast<int>(response.label));
        if (!heatmap_path.empty()) write_pfm(heatmap_path, map.values);
        if (!gradcam_path.empty()) {
            Tensor overlay = gradcam_overlay(img, map);
            if (gradcam_path.size() >= 4 &&
                gradcam_path.substr(gradcam_path.size() - 4) == ".ppm")
                write_ppm(gradcam_path, overlay);
            else
                write_image(gradcam_path, overlay);
        }
    }
    return 0;
}

int cmd_serve(const std::string& model_path, int port) {
    LoadedCheckpoint loaded = load_checkpoint(model_path);
    PredictionService service(std::move(loaded.model), loaded.digest);
    std::printf("model %s ready, listening on port %d\n",
                loaded.digest.c_str(), port);
    std::fflush(stdout);
    service.run("0.0.0.0", port);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tomato leaf disease classifier"};
    app.require_subcommand(1);

    // split
    auto* split = app.add_subcommand("split", "scan a dataset directory and "
                                              "write a stratified split");
    std::string split_data, split_out;
    std::uint64_t split_seed = 42;
    split->add_option("--data", split_data, "dataset root directory")
        ->required();
    split->add_option("--seed", split_seed, "shuffle seed");
    split->add_option("--out", split_out, "manifest output path")->required();

    // train
    auto* train = app.add_subcommand("train", "train a model from a manifest");
    CliOverrides over;
    std::string train_manifest, train_out, train_config_path;
    train->add_option("--manifest", train_manifest, "dataset manifest")
        ->required();
    train->add_option("--config", train_config_path, "config file (json)");
    train->add_option("--out", train_out, "checkpoint output path")->required();
    train->add_option("--history", [&over](const CLI::results_t& r) {
        over.history_path = r[0];
        return true;
    }, "history csv path");
    train->add_option("--epochs", [&over](const CLI::results_t& r) {
        over.epochs = std::stoull(r[0]);
        return true;
    }, "epoch count");
    train->add_option("--batch", [&over](const CLI::results_t& r) {
        over.batch_size = std::stoull(r[0]);
        return true;
    }, "batch size");
    train->add_option("--lr", [&over](const CLI::results_t& r) {
        over.alpha = std::stod(r[0]);
        return true;
    }, "learning rate");
    train->add_option("--seed", [&over](const CLI::results_t& r) {
        over.seed = std::stoull(r[0]);
        return true;
    }, "training seed");
    train->add_option("--loss", [&over](const CLI::results_t& r) {
        over.loss = r[0];
        return true;
    }, "categorical_ce or binary_ce");
    train->add_flag_function("--no-augment", [&over](std::int64_t) {
        over.augment_enabled = false;
    }, "train on unmodified images");
    train->add_flag_function("--crop-boxes", [&over](std::int64_t) {
        over.crop_boxes = true;
    }, "crop each image to the union of its boxes");

    // eval
    auto* eval = app.add_subcommand("eval", "measure a model on one split");
    std::string eval_model, eval_manifest, eval_split = "test",
                eval_format = "text";
    bool eval_crop = false;
    eval->add_option("--model", eval_model, "checkpoint path")->required();
    eval->add_option("--manifest", eval_manifest, "dataset manifest")
        ->required();
    eval->add_option("--split", eval_split, "train, val or test");
    eval->add_option("--format", eval_format, "text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
    eval->add_flag("--crop-boxes", eval_crop,
                   "crop each image to the union of its boxes");

    // predict
    auto* predict = app.add_subcommand("predict", "classify one image");
    std::string predict_model, predict_image_path, predict_gradcam,
        predict_heatmap;
    predict->add_option("--model", predict_model, "checkpoint path")
        ->required();
    predict->add_option("--image", predict_image_path, "image file")
        ->required();
    predict->add_option("--gradcam", predict_gradcam,
                        "write the heatmap overlay image here");
    predict->add_option("--heatmap", predict_heatmap,
                        "write the raw heatmap (pfm) here");

    // serve
    auto* serve = app.add_subcommand("serve", "run the prediction service");
    std::string serve_model;
    int serve_port = 8080;
    serve->add_option("--model", serve_model, "checkpoint path")->required();
    serve->add_option("--port", serve_port, "listen port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (split->parsed()) return cmd_split(split_data, split_seed, split_out);
        if (train->parsed()) {
            over.manifest_path = train_manifest;
            over.checkpoint_path = train_out;
            std::optional<std::string> config_file;
            if (!train_config_path.empty()) config_file = train_config_path;
            AppConfig cfg = resolve_config(config_file, over);
            return cmd_train(cfg);
        }
        if (eval->parsed())
            return cmd_eval(eval_model, eval_manifest, eval_split, eval_format,
                            eval_crop);
        if (predict->parsed())
            return cmd_predict(predict_model, predict_image_path,
                               predict_gradcam, predict_heatmap);
        if (serve->parsed()) return cmd_serve(serve_model, serve_port);
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
