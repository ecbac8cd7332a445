#pragma once

#include <chrono>
#include <cstddef>

#include "txnn/dataset.hpp"
#include "txnn/loss.hpp"
#include "txnn/model.hpp"
#include "txnn/optimizer.hpp"

namespace txnn {

// One row of a training log.
struct MetricsRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
    double wall_seconds = 0.0;
};

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

// One shuffled pass over the training set: forward, loss, backward, step per
// minibatch. Returns the sample-weighted mean training loss and the wall time
// of the pass; epoch and test columns are left for the caller.
inline MetricsRecord train_epoch(Model& model, const Dataset& data, TrainState& state, Rng& rng,
                                 std::size_t batch_size = 128) {
    if (data.size() == 0) throw ArgumentError("train_epoch: empty dataset");
    const auto t0 = std::chrono::steady_clock::now();
    model.set_training(true);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (const auto& idx : batch_indices(data.size(), batch_size, &rng, true)) {
        Batch batch = gather_batch(data, idx);
        Matrix logits = model.forward(batch.x, &rng);
        auto [lv, grad] = softmax_cross_entropy(logits, batch.y);
        model.backward(grad);
        state.step(model);
        loss_sum += lv.loss * static_cast<double>(idx.size());
        seen += idx.size();
    }
    MetricsRecord rec;
    rec.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

// Eval-mode pass; touches no parameters or running statistics.
inline EvalResult evaluate(Model& model, const Dataset& data, std::size_t batch_size = 256) {
    if (data.size() == 0) throw ArgumentError("evaluate: empty dataset");
    const bool was_training = model.training();
    model.set_training(false);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (const auto& idx : batch_indices(data.size(), batch_size, nullptr, false)) {
        Batch batch = gather_batch(data, idx);
        Matrix logits = model.forward(batch.x);
        auto [lv, grad] = softmax_cross_entropy(logits, batch.y);
        loss_sum += lv.loss * static_cast<double>(idx.size());
        correct += lv.correct;
    }
    model.set_training(was_training);
    return {loss_sum / static_cast<double>(data.size()),
            static_cast<double>(correct) / static_cast<double>(data.size())};
}

}  // namespace txnn
