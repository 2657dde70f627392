#include "tldc/metrics.hpp"

#include <cstdio>

#include "tldc/image.hpp"

namespace tldc {

ConfusionMatrix confusion_matrix(const std::vector<LeafClass>& predictions,
                                 const std::vector<LeafClass>& truths,
                                 LeafClass positive) {
    if (predictions.size() != truths.size())
        throw DataError("confusion matrix: prediction/truth length mismatch");
    if (predictions.empty())
        throw DataError("confusion matrix: no predictions");

    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        bool pred_pos = predictions[i] == positive;
        bool true_pos = truths[i] == positive;
        if (pred_pos && true_pos) ++cm.tp;
        else if (pred_pos && !true_pos) ++cm.fp;
        else if (!pred_pos && true_pos) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

static double f1_of(double p, double r, bool& degenerate) {
    if (p + r == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

static ClassMetrics class_metrics(const ConfusionMatrix& cm, LeafClass positive,
                                  bool& degenerate) {
    ClassMetrics m;
    m.positive = positive;
    m.support = cm.tp + cm.fn;
    if (cm.tp + cm.fp == 0) {
        degenerate = true;
        m.precision = 0.0;
    } else {
        m.precision = static_cast<double>(cm.tp) / (cm.tp + cm.fp);
    }
    if (cm.tp + cm.fn == 0) {
        degenerate = true;
        m.recall = 0.0;
    } else {
        m.recall = static_cast<double>(cm.tp) / (cm.tp + cm.fn);
    }
    m.f1 = f1_of(m.precision, m.recall, degenerate);
    return m;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("metrics: empty confusion matrix");

    MetricsReport report;
    report.cm = cm;
    report.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();

    // headline metrics take Diseased as positive; swapping roles gives the
    // Healthy row of the per-class breakdown
    ConfusionMatrix healthy{cm.tn, cm.fn, cm.tp, cm.fp};
    report.per_class.push_back(
        class_metrics(healthy, LeafClass::Healthy, report.degenerate));
    report.per_class.push_back(
        class_metrics(cm, LeafClass::Diseased, report.degenerate));

    report.precision = report.per_class[1].precision;
    report.recall = report.per_class[1].recall;
    report.f1 = report.per_class[1].f1;
    report.macro_f1 =
        (report.per_class[0].f1 + report.per_class[1].f1) / 2.0;
    return report;
}

ConfusionMatrix one_vs_rest(const std::vector<int>& predictions,
                            const std::vector<int>& truths, int k) {
    if (predictions.size() != truths.size())
        throw DataError("one_vs_rest: prediction/truth length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        bool pred_pos = predictions[i] == k;
        bool true_pos = truths[i] == k;
        if (pred_pos && true_pos) ++cm.tp;
        else if (pred_pos && !true_pos) ++cm.fp;
        else if (!pred_pos && true_pos) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

double macro_f1(const std::vector<ConfusionMatrix>& per_class) {
    if (per_class.empty()) throw DataError("macro_f1: no classes");
    double sum = 0.0;
    for (const auto& cm : per_class) {
        bool degenerate = false;
        ClassMetrics m = class_metrics(cm, LeafClass::Healthy, degenerate);
        sum += m.f1;
    }
    return sum / static_cast<double>(per_class.size());
}

int argmax_class(const float* probs, std::size_t k) {
    if (k == 0) throw DataError("argmax over empty probabilities");
    int best = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (probs[i] >= probs[best]) best = static_cast<int>(i);
    return best;
}

MetricsReport evaluate_predictions(const std::vector<LeafClass>& predictions,
                                   const std::vector<LeafClass>& truths,
                                   LeafClass positive) {
    return compute_metrics(confusion_matrix(predictions, truths, positive));
}

MetricsReport evaluate_model(Model& model, const std::vector<Sample>& samples,
                             const EvalOptions& opts) {
    const auto in_h = static_cast<int>(model.config().input_h);
    const auto in_w = static_cast<int>(model.config().input_w);
    return evaluate_with(
        [&](const Sample& sample) {
            Tensor img = opts.crop_boxes && !sample.boxes.empty()
                             ? load_image_cropped(sample.path, sample.boxes,
                                                  in_h, in_w)
                             : load_image(sample.path, in_h, in_w);
            Tensor batch = img.reshaped({1, img.shape()[0], img.shape()[1],
                                         img.shape()[2]});
            ForwardCtx ctx{Mode::Infer, 0, false};
            Tensor probs = model.forward(batch, ctx);
            return std::vector<float>(probs.raw().begin(),
                                      probs.raw().end());
        },
        samples);
}

std::string report_text(const MetricsReport& report) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "accuracy  %.4f\nprecision %.4f\nrecall    %.4f\nf1        "
                  "%.4f\n",
                  report.accuracy, report.precision, report.recall, report.f1);
    out += buf;
    std::snprintf(buf, sizeof buf, "confusion tp=%zu fp=%zu tn=%zu fn=%zu\n",
                  report.cm.tp, report.cm.fp, report.cm.tn, report.cm.fn);
    out += buf;
    for (const auto& c : report.per_class) {
        std::snprintf(buf, sizeof buf,
                      "%-9s precision=%.4f recall=%.4f f1=%.4f n=%zu\n",
                      leaf_class_name(c.positive), c.precision, c.recall, c.f1,
                      c.support);
        out += buf;
    }
    if (report.degenerate)
        out += "note: degenerate confusion matrix, zero-denominator metrics reported as 0\n";
    return out;
}

std::string report_csv(const MetricsReport& report) {
    char buf[512];
    std::string out = "accuracy,precision,recall,f1,tp,fp,tn,fn\n";
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%zu,%zu,%zu,%zu\n",
                  report.accuracy, report.precision, report.recall, report.f1,
                  report.cm.tp, report.cm.fp, report.cm.tn, report.cm.fn);
    out += buf;
    return out;
}

}  // namespace tldc
