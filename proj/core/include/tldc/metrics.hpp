#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tldc/dataset.hpp"
#include "tldc/model.hpp"

namespace tldc {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }

    ConfusionMatrix operator+(const ConfusionMatrix& o) const {
        return {tp + o.tp, fp + o.fp, tn + o.tn, fn + o.fn};
    }
};

struct ClassMetrics {
    LeafClass positive = LeafClass::Healthy;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // actual members of the class
};

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // some denominator was zero; that metric is 0
    ConfusionMatrix cm;
    std::vector<ClassMetrics> per_class;
    double macro_f1 = 0.0;
};

ConfusionMatrix confusion_matrix(const std::vector<LeafClass>& predictions,
                                 const std::vector<LeafClass>& truths,
                                 LeafClass positive = LeafClass::Diseased);

MetricsReport compute_metrics(const ConfusionMatrix& cm);

// one-vs-rest counts for class k of K (class labels as plain ints)
ConfusionMatrix one_vs_rest(const std::vector<int>& predictions,
                            const std::vector<int>& truths, int k);
double macro_f1(const std::vector<ConfusionMatrix>& per_class);

// probability argmax with ties resolved to the higher class index, so an
// exact 0.5/0.5 pair answers Diseased
int argmax_class(const float* probs, std::size_t k);

struct EvalOptions {
    bool crop_boxes = false;
};

MetricsReport evaluate_predictions(const std::vector<LeafClass>& predictions,
                                   const std::vector<LeafClass>& truths,
                                   LeafClass positive = LeafClass::Diseased);

template <typename Infer>
MetricsReport evaluate_with(Infer&& infer, const std::vector<Sample>& samples,
                            LeafClass positive = LeafClass::Diseased) {
    if (samples.empty()) throw DataError("evaluate: no samples");
    std::vector<LeafClass> preds, truths;
    preds.reserve(samples.size());
    truths.reserve(samples.size());
    for (const auto& sample : samples) {
        std::vector<float> probs = infer(sample);
        preds.push_back(static_cast<LeafClass>(
            argmax_class(probs.data(), probs.size())));
        truths.push_back(sample.label);
    }
    return evaluate_predictions(preds, truths, positive);
}

MetricsReport evaluate_model(Model& model, const std::vector<Sample>& samples,
                             const EvalOptions& opts = {});

std::string report_text(const MetricsReport& report);
std::string report_csv(const MetricsReport& report);

}  // namespace tldc
