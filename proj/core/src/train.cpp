#include "tldc/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>

#include "tldc/checkpoint.hpp"
#include "tldc/image.hpp"
#include "tldc/loss.hpp"
#include "tldc/metrics.hpp"
#include "tldc/rng.hpp"

namespace tldc {

const char* loss_kind_name(LossKind k) {
    return k == LossKind::CategoricalCrossEntropy ? "categorical_ce"
                                                  : "binary_ce";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "categorical_ce") return LossKind::CategoricalCrossEntropy;
    if (name == "binary_ce") return LossKind::BinaryCrossEntropy;
    throw ParseError("unknown loss: " + name);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ParameterError("train: epochs must be >= 1");
    if (batch_size < 1) throw ParameterError("train: batch_size must be >= 1");
}

std::string TrainingHistory::to_csv() const {
    std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
    char buf[256];
    for (const auto& e : epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch,
                      e.train_loss, e.train_acc, e.val_loss, e.val_acc);
        out += buf;
    }
    return out;
}

void TrainingHistory::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write history: " + path);
    out << to_csv();
    if (!out) throw IoError("history write failed: " + path);
}

// ------------------------------------------------------------------ providers

InMemoryProvider::InMemoryProvider(std::vector<Tensor> images,
                                   std::vector<int> labels)
    : images_(std::move(images)), labels_(std::move(labels)) {
    if (images_.size() != labels_.size())
        throw DataError("provider: image/label count mismatch");
}

void InMemoryProvider::enable_augment(const AugmentSpec& spec,
                                      std::uint64_t seed) {
    spec.validate();
    augment_ = true;
    spec_ = spec;
    seed_ = seed;
}

ProvidedSample InMemoryProvider::at(std::size_t index, int epoch) const {
    ProvidedSample s{images_.at(index), labels_.at(index)};
    if (augment_) {
        std::uint64_t epoch_seed =
            derive_seed(seed_, static_cast<std::uint64_t>(epoch));
        s.image = augment(s.image, spec_, epoch_seed, index);
    }
    return s;
}

ImageFileProvider::ImageFileProvider(std::vector<Sample> samples, int target_h,
                                     int target_w, bool crop_boxes)
    : samples_(std::move(samples)),
      target_h_(target_h),
      target_w_(target_w),
      crop_boxes_(crop_boxes) {}

void ImageFileProvider::enable_augment(const AugmentSpec& spec,
                                       std::uint64_t seed) {
    spec.validate();
    augment_ = true;
    spec_ = spec;
    seed_ = seed;
}

ProvidedSample ImageFileProvider::at(std::size_t index, int epoch) const {
    const Sample& sample = samples_.at(index);
    Tensor img = crop_boxes_ && !sample.boxes.empty()
                     ? load_image_cropped(sample.path, sample.boxes, target_h_,
                                          target_w_)
                     : load_image(sample.path, target_h_, target_w_);
    if (augment_) {
        std::uint64_t epoch_seed =
            derive_seed(seed_, static_cast<std::uint64_t>(epoch));
        img = augment(img, spec_, epoch_seed, index);
    }
    return {std::move(img), static_cast<int>(sample.label)};
}

// ------------------------------------------------------------------ fit loop

namespace {

struct Batch {
    Tensor x;        // [n,H,W,C]
    Tensor onehot;   // [n,K]
    std::vector<int> labels;
};

Batch assemble(const SampleProvider& data,
               const std::vector<std::size_t>& order, std::size_t start,
               std::size_t stop, int epoch, const ModelConfig& cfg) {
    const std::size_t n = stop - start;
    Batch b;
    b.x = Tensor({n, cfg.input_h, cfg.input_w, cfg.input_c});
    b.onehot = Tensor({n, cfg.classes});
    b.labels.resize(n);

    const std::size_t plane = cfg.input_h * cfg.input_w * cfg.input_c;
    for (std::size_t k = 0; k < n; ++k) {
        ProvidedSample s = data.at(order[start + k], epoch);
        if (s.image.shape() !=
            std::vector<std::size_t>{cfg.input_h, cfg.input_w, cfg.input_c})
            throw DimensionError("sample " + std::to_string(order[start + k]) +
                                 " has shape " + s.image.shape_string() +
                                 ", model expects [" +
                                 std::to_string(cfg.input_h) + "," +
                                 std::to_string(cfg.input_w) + "," +
                                 std::to_string(cfg.input_c) + "]");
        if (s.label < 0 || static_cast<std::size_t>(s.label) >= cfg.classes)
            throw DataError("sample label " + std::to_string(s.label) +
                            " out of range for " +
                            std::to_string(cfg.classes) + " classes");
        std::copy(s.image.raw().begin(), s.image.raw().end(),
                  b.x.raw().begin() + static_cast<std::ptrdiff_t>(k * plane));
        b.onehot.at2(k, static_cast<std::size_t>(s.label)) = 1.0f;
        b.labels[k] = s.label;
    }
    return b;
}

// loss over a forward result; gradient w.r.t. logits is (p - t)/n either way
// because the two-class binary form is the categorical form in disguise
double batch_loss(LossKind kind, const Tensor& probs, const Batch& b) {
    if (kind == LossKind::CategoricalCrossEntropy)
        return categorical_cross_entropy(probs, b.onehot).loss;
    const std::size_t n = probs.shape()[0];
    Tensor col({n});
    for (std::size_t i = 0; i < n; ++i) col.raw()[i] = probs.at2(i, 1);
    return binary_cross_entropy(col, b.labels).loss;
}

std::size_t count_correct(const Tensor& probs, const std::vector<int>& labels) {
    const std::size_t n = probs.shape()[0];
    const std::size_t k = probs.shape()[1];
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (argmax_class(&probs.raw()[i * k], k) == labels[i]) ++correct;
    return correct;
}

}  // namespace

std::pair<double, double> evaluate_provider(Model& model,
                                            const SampleProvider& data,
                                            std::size_t batch_size,
                                            LossKind loss) {
    const std::size_t n = data.size();
    if (n == 0) throw DataError("evaluate: empty split");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
        std::size_t stop = std::min(n, start + batch_size);
        Batch b = assemble(data, order, start, stop, 0, model.config());
        ForwardCtx ctx{Mode::Infer, 0, false};
        Tensor probs = model.forward(b.x, ctx);
        loss_sum += batch_loss(loss, probs, b) * static_cast<double>(stop - start);
        correct += count_correct(probs, b.labels);
    }
    return {loss_sum / static_cast<double>(n),
            static_cast<double>(correct) / static_cast<double>(n)};
}

TrainingHistory fit(Model& model, const SampleProvider& train,
                    const SampleProvider& val, const TrainConfig& train_cfg,
                    const OptimizerConfig& opt_cfg,
                    const EpochCallback& on_epoch) {
    train_cfg.validate();
    opt_cfg.validate();
    if (train.size() == 0) throw DataError("fit: empty train split");
    if (val.size() == 0) throw DataError("fit: empty val split");
    if (train_cfg.loss == LossKind::BinaryCrossEntropy &&
        model.config().classes != 2)
        throw ParameterError("binary loss needs exactly 2 classes");

    Adam adam(opt_cfg);
    auto params = model.parameters();
    auto grads = model.gradients();

    TrainingHistory history;
    double best_val = std::numeric_limits<double>::infinity();
    std::uint64_t global_batch = 0;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t e = 0; e < train_cfg.epochs; ++e) {
        const int epoch = static_cast<int>(e) + 1;
        shuffle_in_place(order, derive_seed(train_cfg.seed, 1,
                                            static_cast<std::uint64_t>(epoch)));

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t batch_in_epoch = 0;
        for (std::size_t start = 0; start < order.size();
             start += train_cfg.batch_size) {
            std::size_t stop =
                std::min(order.size(), start + train_cfg.batch_size);
            Batch b =
                assemble(train, order, start, stop, epoch, model.config());

            ForwardCtx ctx{Mode::Train, global_batch, false};
            Tensor probs;
            double loss = 0.0;
            try {
                probs = model.forward(b.x, ctx);
                loss = batch_loss(train_cfg.loss, probs, b);
            } catch (const NumericError&) {
                // exploded weights surface as non-finite activations
                throw DivergenceError(static_cast<std::size_t>(epoch),
                                      batch_in_epoch + 1);
            }
            if (!std::isfinite(loss))
                throw DivergenceError(static_cast<std::size_t>(epoch),
                                      batch_in_epoch + 1);
            loss_sum += loss * static_cast<double>(stop - start);
            correct += count_correct(probs, b.labels);

            auto lg = categorical_cross_entropy(probs, b.onehot);
            model.backward_from_logits(lg.grad);
            adam.step(params, grads);

            ++global_batch;
            ++batch_in_epoch;
        }

        double val_loss = 0.0, val_acc = 0.0;
        try {
            std::tie(val_loss, val_acc) = evaluate_provider(
                model, val, train_cfg.batch_size, train_cfg.loss);
        } catch (const NumericError&) {
            throw DivergenceError(static_cast<std::size_t>(epoch), 0);
        }
        if (!std::isfinite(val_loss))
            throw DivergenceError(static_cast<std::size_t>(epoch), 0);

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(train.size());
        stats.train_acc =
            static_cast<double>(correct) / static_cast<double>(train.size());
        stats.val_loss = val_loss;
        stats.val_acc = val_acc;
        history.epochs.push_back(stats);

        if (val_loss < best_val) {
            best_val = val_loss;
            history.best_epoch = epoch;
            history.best_val_loss = val_loss;
            if (!train_cfg.checkpoint_path.empty()) {
                CheckpointMeta meta;
                meta.epoch = epoch;
                meta.val_loss = val_loss;
                meta.val_acc = val_acc;
                meta.seed = train_cfg.seed;
                save_checkpoint(model, train_cfg.checkpoint_path, meta);
            }
        }

        if (on_epoch) on_epoch(stats);
    }
    return history;
}

}  // namespace tldc
