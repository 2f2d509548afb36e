#pragma once

// Training loop (batch size 1, optional horizontal-flip doubling, early
// stopping on validation MAE) and blob-count inference.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/dataset.hpp"
#include "lccount/fcn.hpp"
#include "lccount/loss.hpp"
#include "lccount/metrics.hpp"

namespace lccount {

struct TrainConfig {
    AdamConfig adam;  // defaults: lr 1e-5, weight decay 5e-5
    int max_epochs = 200;
    int patience = 10;
    std::uint64_t seed = 0;
    bool flip = true;
    LossConfig loss;
    std::array<int, 4> widths{16, 16, 32, 32};

    void validate() const {
        if (!(adam.learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
        if (adam.weight_decay < 0.0) throw InvalidInput("weight decay must be non-negative");
        if (patience < 1) throw InvalidInput("patience must be >= 1");
        if (max_epochs < 0) throw InvalidInput("max epochs must be non-negative");
        loss.validate();
    }
};

/// Blob counts per class (index 0 unused) and the per-class labelings
/// (`blobs[c - 1]` for class c).
struct Prediction {
    std::vector<int> counts;
    std::vector<BlobLabeling> blobs;
};

/// Argmax each pixel, label connected components per object class and count
/// them. No splitting or false-positive removal happens here.
inline Prediction predict_from_probs(const ProbMap& s) {
    const Grid<int> argmax = argmax_class(s);
    Prediction out;
    out.counts.assign(static_cast<std::size_t>(s.classes()), 0);
    for (int c = 1; c < s.classes(); ++c) {
        out.blobs.push_back(connected_components(class_mask(argmax, c)));
        out.counts[c] = out.blobs.back().count();
    }
    return out;
}

template <class T>
Prediction predict_counts(const FcnParams<T>& params, const InputImage& image) {
    return predict_from_probs(softmax(forward(params, image)));
}

/// Predicts every sample, using up to `threads` workers.
template <class T>
std::vector<EvalRecord> evaluate_samples(const FcnParams<T>& params, const std::vector<Sample>& samples,
                                         unsigned threads = 1) {
    std::vector<EvalRecord> records(samples.size());
    const auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < samples.size(); i += stride)
            records[i] = make_record(samples[i].points, predict_counts(params, samples[i].image).blobs);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    return records;
}

struct TrainLogEntry {
    int epoch = 0;
    LossBreakdown mean_loss;  // averaged over the epoch's training steps
    double val_mae = 0.0;
    double val_fscore = 0.0;
};

struct TrainResult {
    FcnParams<float> params;  // best validation MAE
    std::vector<TrainLogEntry> log;
    double initial_val_mae = 0.0;
    double best_val_mae = 0.0;
    int best_epoch = 0;  // 0 = initial parameters
};

using EpochCallback = std::function<void(const TrainLogEntry&)>;

namespace train_detail {

inline double val_mae_of(const std::vector<EvalRecord>& records) {
    double sum = 0.0;
    for (const EvalRecord& r : records)
        for (int c = 1; c < r.classes(); ++c) sum += std::abs(r.predicted_counts[c] - r.true_counts[c]);
    return sum / static_cast<double>(records.size());
}

}  // namespace train_detail

/// One optimisation step on one image; returns the loss before the update.
inline LossBreakdown train_step(FcnParams<float>& params, AdamState<float>& state, const InputImage& image,
                                const PointAnnotations& points, const TrainConfig& cfg) {
    const FcnTrace<float> trace = forward_trace(params, image);
    const ProbMap s = softmax(trace.logits);
    const LossPlan plan = plan_loss(s, points, cfg.loss);
    const LossBreakdown loss = evaluate_loss(s, plan);
    if (!std::isfinite(loss.total)) throw NumericError("non-finite training loss");
    const FcnParams<float> grads = backward(params, trace, plan_gradient(s, plan));
    AdamUpdate<float> upd = adam_step(params, grads, state, cfg.adam);
    params = std::move(upd.params);
    state = std::move(upd.state);
    return loss;
}

/// Trains from a seeded initialisation. Each epoch visits every training
/// image (and its mirror when flipping is on) once in a seeded random order.
/// Validation MAE after each epoch drives early stopping; the best-scoring
/// parameters are returned. The class count comes from `classes`.
inline TrainResult train(const std::vector<Sample>& train_set, const std::vector<Sample>& val_set, int classes,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
    cfg.validate();
    if (train_set.empty() || val_set.empty()) throw InvalidInput("training needs non-empty train and validation sets");
    const int in_channels = train_set.front().image.channels;

    std::vector<InputImage> images;
    std::vector<PointAnnotations> points;
    for (const Sample& s : train_set) {
        if (s.image.channels != in_channels) throw InvalidInput("training images disagree on channel count");
        images.push_back(s.image);
        points.push_back(s.points);
        if (cfg.flip) {
            auto [img, pts] = flip_horizontal(s.image, s.points);
            images.push_back(std::move(img));
            points.push_back(std::move(pts));
        }
    }

    FcnShape shape{in_channels, classes, cfg.widths};
    FcnParams<float> params = init_params<float>(shape, cfg.seed);
    AdamState<float> state = AdamState<float>::for_params(params);

    TrainResult result;
    result.params = params;
    result.initial_val_mae = train_detail::val_mae_of(evaluate_samples(params, val_set));
    result.best_val_mae = result.initial_val_mae;

    std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66Dull);
    std::vector<std::size_t> order(images.size());
    int since_best = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        // Fisher-Yates with an explicit draw so the order is portable.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

        TrainLogEntry entry;
        entry.epoch = epoch;
        for (std::size_t idx : order) {
            const LossBreakdown l = train_step(params, state, images[idx], points[idx], cfg);
            entry.mean_loss.image_level += l.image_level;
            entry.mean_loss.point_level += l.point_level;
            entry.mean_loss.split_level += l.split_level;
            entry.mean_loss.false_positive += l.false_positive;
            entry.mean_loss.total += l.total;
        }
        const double n = static_cast<double>(order.size());
        entry.mean_loss.image_level /= n;
        entry.mean_loss.point_level /= n;
        entry.mean_loss.split_level /= n;
        entry.mean_loss.false_positive /= n;
        entry.mean_loss.total /= n;

        const auto records = evaluate_samples(params, val_set);
        entry.val_mae = train_detail::val_mae_of(records);
        entry.val_fscore = fscore(records);
        result.log.push_back(entry);
        if (on_epoch) on_epoch(entry);

        if (entry.val_mae < result.best_val_mae) {
            result.best_val_mae = entry.val_mae;
            result.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return result;
}

}  // namespace lccount
