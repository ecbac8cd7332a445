#pragma once

#include <cstddef>
#include <vector>

#include "txnn/layers.hpp"

namespace txnn {

// One trainable tensor together with its gradient slot, in a fixed
// traversal order (layer by layer, weights before biases).
struct ParamRef {
    Matrix* value;
    Matrix* grad;
};

// Ordered layer stack with a train/eval switch. Mutable single-owner object:
// forward caches live inside the layers and are consumed by backward.
class Model {
public:
    void add(Layer layer) { layers_.push_back(std::move(layer)); }

    std::size_t num_layers() const { return layers_.size(); }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    bool training() const { return train_; }
    void set_training(bool train) { train_ = train; }

    Matrix forward(const Matrix& input, Rng* rng = nullptr) {
        ForwardCtx ctx{train_, rng};
        Matrix x = input;
        for (Layer& l : layers_) x = layer_forward(l, x, ctx);
        return x;
    }

    // Walks the stack in reverse, filling parameter gradients.
    void backward(const Matrix& grad_output) {
        Matrix g = grad_output;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = layer_backward(*it, g);
        grads_pending_ = true;
    }

    bool grads_pending() const { return grads_pending_; }
    void clear_grads_pending() { grads_pending_ = false; }

    std::vector<ParamRef> params() {
        std::vector<ParamRef> refs;
        for (Layer& l : layers_) {
            if (auto* d = std::get_if<Dense>(&l)) {
                refs.push_back({&d->w, &d->grad_w});
                refs.push_back({&d->b, &d->grad_b});
            } else if (auto* bn = std::get_if<BatchNorm>(&l)) {
                refs.push_back({&bn->gamma, &bn->grad_gamma});
                refs.push_back({&bn->beta, &bn->grad_beta});
            }
        }
        return refs;
    }

    std::size_t num_trainable_params() {
        std::size_t n = 0;
        for (const ParamRef& p : params()) n += p.value->size();
        return n;
    }

private:
    std::vector<Layer> layers_;
    bool train_ = true;
    bool grads_pending_ = false;
};

// Which stochastic regularizer the block builder inserts.
enum class NoiseMode {
    none,      // inverted dropout everywhere
    gaussian,  // multiplicative gaussian noise everywhere
    alpha,     // first dropout swapped for alpha dropout, rest unchanged
};

// The dense MNIST-family stack: an input projection to width 500 followed by
// repeated [batchnorm -> activation -> dropout(0.25) -> dense] blocks and a
// 10-way head. num_blocks counts the 4-part blocks; the default 12 yields 13
// dense layers.
inline Model build_mnist_net(const ActivationKind& activation, std::size_t num_blocks, Rng& rng,
                             NoiseMode noise = NoiseMode::none, double alpha_rate = 0.2) {
    if (num_blocks < 1) throw ArgumentError("build_mnist_net: num_blocks must be >= 1");
    constexpr std::size_t kInput = 784;
    constexpr std::size_t kWidth = 500;
    constexpr std::size_t kClasses = 10;
    constexpr double kDropRate = 0.25;

    auto make_noise = [&](bool first) -> Layer {
        switch (noise) {
            case NoiseMode::gaussian: return GaussianDropout(kDropRate);
            case NoiseMode::alpha:
                if (first) return AlphaDropout(alpha_rate);
                return Dropout(kDropRate);
            case NoiseMode::none: break;
        }
        return Dropout(kDropRate);
    };

    Model m;
    m.add(Dense(kInput, kWidth, rng));
    for (std::size_t i = 0; i + 1 < num_blocks; ++i) {
        m.add(BatchNorm(kWidth));
        m.add(ActivationLayer(activation));
        m.add(make_noise(i == 0));
        m.add(Dense(kWidth, kWidth, rng));
    }
    m.add(BatchNorm(kWidth));
    m.add(ActivationLayer(activation));
    m.add(make_noise(num_blocks == 1));
    m.add(Dense(kWidth, kClasses, rng));
    return m;
}

// Small scalar-output net used to sample the induced function over a 2-D
// input grid: 2 -> 16 -> 16 -> 16 -> 16 -> 1, activations between the five
// dense layers, no normalization or dropout.
inline Model build_landscape_net(const ActivationKind& activation, Rng& rng) {
    constexpr std::size_t kWidth = 16;
    Model m;
    m.add(Dense(2, kWidth, rng));
    for (int i = 0; i < 3; ++i) {
        m.add(ActivationLayer(activation));
        m.add(Dense(kWidth, kWidth, rng));
    }
    m.add(ActivationLayer(activation));
    m.add(Dense(kWidth, 1, rng));
    m.set_training(false);
    return m;
}

}  // namespace txnn
