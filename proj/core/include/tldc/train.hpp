#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tldc/augment.hpp"
#include "tldc/dataset.hpp"
#include "tldc/model.hpp"
#include "tldc/optimizer.hpp"

namespace tldc {

enum class LossKind { CategoricalCrossEntropy, BinaryCrossEntropy };

const char* loss_kind_name(LossKind k);
LossKind loss_kind_from_name(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    LossKind loss = LossKind::CategoricalCrossEntropy;
    std::uint64_t seed = 42;
    std::string checkpoint_path;  // empty: no checkpoint file written

    void validate() const;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainingHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;

    void write_csv(const std::string& path) const;
    std::string to_csv() const;
};

struct ProvidedSample {
    Tensor image;  // [H,W,C]
    int label = 0;
};

class SampleProvider {
public:
    virtual ~SampleProvider() = default;
    virtual std::size_t size() const = 0;
    virtual ProvidedSample at(std::size_t index, int epoch) const = 0;
};

class InMemoryProvider : public SampleProvider {
public:
    InMemoryProvider(std::vector<Tensor> images, std::vector<int> labels);

    // re-draws augmentation parameters each epoch from (seed, epoch, index)
    void enable_augment(const AugmentSpec& spec, std::uint64_t seed);

    std::size_t size() const override { return images_.size(); }
    ProvidedSample at(std::size_t index, int epoch) const override;

private:
    std::vector<Tensor> images_;
    std::vector<int> labels_;
    bool augment_ = false;
    AugmentSpec spec_;
    std::uint64_t seed_ = 0;
};

// loads images from manifest samples on demand
class ImageFileProvider : public SampleProvider {
public:
    ImageFileProvider(std::vector<Sample> samples, int target_h, int target_w,
                      bool crop_boxes);

    void enable_augment(const AugmentSpec& spec, std::uint64_t seed);

    std::size_t size() const override { return samples_.size(); }
    ProvidedSample at(std::size_t index, int epoch) const override;

private:
    std::vector<Sample> samples_;
    int target_h_;
    int target_w_;
    bool crop_boxes_;
    bool augment_ = false;
    AugmentSpec spec_;
    std::uint64_t seed_ = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// epoch loop: seeded shuffle, mini-batches (final short batch trained too),
// forward/backward/adam step, inference-mode validation, checkpoint overwrite
// on every strict validation-loss improvement
TrainingHistory fit(Model& model, const SampleProvider& train,
                    const SampleProvider& val, const TrainConfig& train_cfg,
                    const OptimizerConfig& opt_cfg,
                    const EpochCallback& on_epoch = {});

// inference-mode loss/accuracy over a provider; the validation half of fit
std::pair<double, double> evaluate_provider(Model& model,
                                            const SampleProvider& data,
                                            std::size_t batch_size,
                                            LossKind loss);

}  // namespace tldc
