#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "txnn/errors.hpp"
#include "txnn/model.hpp"

namespace txnn {

enum class OptimizerKind { sgd, adam };

inline std::string optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::sgd ? "sgd" : "adam";
}

// Optimizer state: learning rate plus, for adam, per-parameter moment
// buffers allocated lazily to match the model's parameter shapes.
//
// sgd applies w <- w - lr * grad verbatim; adam the bias-corrected update
// with beta1 = 0.9, beta2 = 0.999, eps = 1e-8. Gradients are zeroed after
// every step.
class TrainState {
public:
    explicit TrainState(OptimizerKind kind, double learning_rate)
        : kind_(kind), lr_(learning_rate) {
        if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
    }

    OptimizerKind kind() const { return kind_; }
    double learning_rate() const { return lr_; }

    void step(Model& model) {
        if (!model.grads_pending())
            throw StateError("optimizer step without a completed backward pass");
        std::vector<ParamRef> params = model.params();
        if (kind_ == OptimizerKind::sgd) {
            for (ParamRef& p : params) {
                double* w = p.value->data();
                double* g = p.grad->data();
                for (std::size_t i = 0; i < p.value->size(); ++i) w[i] = w[i] - lr_ * g[i];
            }
        } else {
            if (m_.empty()) init_moments(params);
            if (m_.size() != params.size())
                throw StateError("optimizer state does not match model parameters");
            ++t_;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
            for (std::size_t pi = 0; pi < params.size(); ++pi) {
                double* w = params[pi].value->data();
                double* g = params[pi].grad->data();
                double* m = m_[pi].data();
                double* v = v_[pi].data();
                for (std::size_t i = 0; i < params[pi].value->size(); ++i) {
                    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
                    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
                    double m_hat = m[i] / bc1;
                    double v_hat = v[i] / bc2;
                    w[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
                }
            }
        }
        for (ParamRef& p : params) *p.grad = Matrix(p.grad->rows(), p.grad->cols());
        model.clear_grads_pending();
    }

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

private:
    void init_moments(const std::vector<ParamRef>& params) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const ParamRef& p : params) {
            m_.emplace_back(p.value->rows(), p.value->cols());
            v_.emplace_back(p.value->rows(), p.value->cols());
        }
    }

    OptimizerKind kind_;
    double lr_;
    long t_ = 0;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
};

}  // namespace txnn
