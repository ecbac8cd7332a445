#pragma once

#include <cmath>
#include <cstdint>
#include <variant>

#include "txnn/activations.hpp"
#include "txnn/errors.hpp"
#include "txnn/matrix.hpp"
#include "txnn/rng.hpp"

namespace txnn {

// Passed down through forward(): training vs inference, plus the rng the
// stochastic layers draw from (required in train mode, ignored in eval).
struct ForwardCtx {
    bool train = false;
    Rng* rng = nullptr;
};

// The backward pass follows the mean-loss convention: the gradient flowing
// between layers is d(mean batch loss)/d(activation), so parameter gradients
// come out as plain products/sums with no extra batch scaling.

// Affine layer y = xW + b with W (in x out) and bias b (1 x out).
struct Dense {
    Matrix w;
    Matrix b;
    Matrix grad_w;
    Matrix grad_b;
    Matrix cached_input;

    // Glorot-uniform init: W ~ U(-limit, limit), limit = sqrt(6/(in+out)).
    Dense(std::size_t in, std::size_t out, Rng& rng)
        : b(1, out), grad_w(in, out), grad_b(1, out) {
        double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        w = rng.uniform_matrix(-limit, limit, in, out);
    }

    Dense() = default;

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (x.cols() != w.rows())
            throw ShapeError("dense: input " + x.shape_str() + " incompatible with weights " +
                             w.shape_str());
        if (ctx.train) cached_input = x;
        Matrix y = matmul(x, w);
        y.add_row_vector(b);
        return y;
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_input.empty())
            throw StateError("dense: backward called without a preceding train-mode forward");
        if (grad_out.rows() != cached_input.rows() || grad_out.cols() != w.cols())
            throw ShapeError("dense: grad_out " + grad_out.shape_str() + " incompatible with " +
                             cached_input.shape_str() + " forward");
        grad_w = matmul_tn(cached_input, grad_out);
        grad_b = grad_out.col_sums();
        Matrix grad_in = matmul_nt(grad_out, w);
        cached_input = Matrix();
        return grad_in;
    }
};

// Per-feature standardization by batch statistics (train) or running
// statistics (eval), with learned scale gamma and shift beta.
struct BatchNorm {
    Matrix gamma;
    Matrix beta;
    Matrix running_mean;
    Matrix running_var;
    double epsilon = 1e-5;
    double momentum = 0.9;  // running = momentum * running + (1 - momentum) * batch

    Matrix grad_gamma;
    Matrix grad_beta;
    Matrix cached_xhat;
    Matrix cached_inv_std;

    explicit BatchNorm(std::size_t features, double eps = 1e-5, double mom = 0.9)
        : gamma(1, features, 1.0),
          beta(1, features),
          running_mean(1, features),
          running_var(1, features, 1.0),
          epsilon(eps),
          momentum(mom),
          grad_gamma(1, features),
          grad_beta(1, features) {
        if (eps <= 0.0) throw ArgumentError("batchnorm: epsilon must be > 0");
    }

    BatchNorm() = default;

    std::size_t features() const { return gamma.cols(); }

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (x.cols() != features())
            throw ShapeError("batchnorm: input " + x.shape_str() + " has wrong feature count, " +
                             "expected " + std::to_string(features()));
        const std::size_t n = x.rows();
        const std::size_t f = features();
        Matrix y(n, f);
        if (ctx.train) {
            if (n < 2) throw ArgumentError("batchnorm: train-mode batch must hold >= 2 samples");
            Matrix mean = x.col_means();
            Matrix var(1, f);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < f; ++c) {
                    double d = x(r, c) - mean(0, c);
                    var(0, c) += d * d;
                }
            var *= 1.0 / static_cast<double>(n);  // biased variance
            cached_inv_std = Matrix(1, f);
            for (std::size_t c = 0; c < f; ++c)
                cached_inv_std(0, c) = 1.0 / std::sqrt(var(0, c) + epsilon);
            cached_xhat = Matrix(n, f);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < f; ++c) {
                    double xh = (x(r, c) - mean(0, c)) * cached_inv_std(0, c);
                    cached_xhat(r, c) = xh;
                    y(r, c) = gamma(0, c) * xh + beta(0, c);
                }
            for (std::size_t c = 0; c < f; ++c) {
                running_mean(0, c) = momentum * running_mean(0, c) + (1.0 - momentum) * mean(0, c);
                running_var(0, c) = momentum * running_var(0, c) + (1.0 - momentum) * var(0, c);
            }
        } else {
            for (std::size_t c = 0; c < f; ++c) {
                double inv = 1.0 / std::sqrt(running_var(0, c) + epsilon);
                for (std::size_t r = 0; r < n; ++r)
                    y(r, c) = gamma(0, c) * (x(r, c) - running_mean(0, c)) * inv + beta(0, c);
            }
        }
        return y;
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_xhat.empty())
            throw StateError("batchnorm: backward called without a preceding train-mode forward");
        const std::size_t n = grad_out.rows();
        const std::size_t f = features();
        grad_gamma = grad_out.hadamard(cached_xhat).col_sums();
        grad_beta = grad_out.col_sums();

        // dxhat = grad_out * gamma;  dx = inv_std/N * (N dxhat - sum(dxhat)
        //                                              - xhat * sum(dxhat . xhat))
        Matrix dxhat(n, f);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < f; ++c) dxhat(r, c) = grad_out(r, c) * gamma(0, c);
        Matrix sum_dxhat = dxhat.col_sums();
        Matrix sum_dxhat_xhat = dxhat.hadamard(cached_xhat).col_sums();
        Matrix grad_in(n, f);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < f; ++c)
                grad_in(r, c) = cached_inv_std(0, c) * inv_n *
                                (static_cast<double>(n) * dxhat(r, c) - sum_dxhat(0, c) -
                                 cached_xhat(r, c) * sum_dxhat_xhat(0, c));
        cached_xhat = Matrix();
        cached_inv_std = Matrix();
        return grad_in;
    }
};

// Elementwise nonlinearity; the only layer with no parameters.
struct ActivationLayer {
    ActivationKind kind;
    Matrix cached_input;

    explicit ActivationLayer(ActivationKind k) : kind(k) {}

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (ctx.train) cached_input = x;
        return activate(kind, x);
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_input.empty())
            throw StateError("activation: backward called without a preceding train-mode forward");
        Matrix grad_in = activate_prime(kind, cached_input).hadamard_inplace(grad_out);
        cached_input = Matrix();
        return grad_in;
    }
};

inline void check_dropout_rate(double rate) {
    if (!(rate >= 0.0) || rate >= 1.0)
        throw ArgumentError("dropout rate must lie in [0, 1)");
}

// Inverted dropout: kept units are scaled by 1/(1-rate) at train time so the
// eval path is the identity.
struct Dropout {
    double rate;
    Matrix cached_mask;  // 0 or 1/(1-rate)

    explicit Dropout(double r) : rate((check_dropout_rate(r), r)) {}

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (!ctx.train) return x;
        if (!ctx.rng) throw StateError("dropout: train-mode forward requires an rng");
        const double keep = 1.0 - rate;
        const double inv_keep = 1.0 / keep;
        cached_mask = Matrix(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.size(); ++i)
            cached_mask.data()[i] = ctx.rng->next_unit() < keep ? inv_keep : 0.0;
        return x.hadamard(cached_mask);
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_mask.empty())
            throw StateError("dropout: backward called without a preceding train-mode forward");
        Matrix grad_in = grad_out.hadamard(cached_mask);
        cached_mask = Matrix();
        return grad_in;
    }
};

// Multiplicative 1-centered Gaussian noise with stddev rate/(1-rate).
// No rescaling: the noise already has unit mean.
struct GaussianDropout {
    double rate;
    Matrix cached_noise;

    explicit GaussianDropout(double r) : rate((check_dropout_rate(r), r)) {}

    double stddev() const { return rate / (1.0 - rate); }

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (!ctx.train) return x;
        if (!ctx.rng) throw StateError("gaussian dropout: train-mode forward requires an rng");
        cached_noise = ctx.rng->normal_matrix(1.0, stddev(), x.rows(), x.cols());
        return x.hadamard(cached_noise);
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_noise.empty())
            throw StateError(
                "gaussian dropout: backward called without a preceding train-mode forward");
        Matrix grad_in = grad_out.hadamard(cached_noise);
        cached_noise = Matrix();
        return grad_in;
    }
};

// SELU-compatible dropout: dropped units saturate to alpha' = -lambda*alpha
// and an affine correction (a, b) restores zero mean and unit variance.
struct AlphaDropout {
    static constexpr double kSeluLambda = 1.0507009873554805;
    static constexpr double kSeluAlpha = 1.6732632423543772;
    static constexpr double kAlphaPrime = -kSeluLambda * kSeluAlpha;  // ~ -1.7581

    double rate;
    double scale_a;
    double shift_b;
    Matrix cached_mask;  // 1 = kept

    explicit AlphaDropout(double r) : rate((check_dropout_rate(r), r)) {
        const double q = 1.0 - rate;
        scale_a = 1.0 / std::sqrt(q * (1.0 + rate * kAlphaPrime * kAlphaPrime));
        shift_b = -scale_a * kAlphaPrime * rate;
    }

    Matrix forward(const Matrix& x, const ForwardCtx& ctx) {
        if (!ctx.train) return x;
        if (!ctx.rng) throw StateError("alpha dropout: train-mode forward requires an rng");
        const double keep = 1.0 - rate;
        cached_mask = Matrix(x.rows(), x.cols());
        Matrix y(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.size(); ++i) {
            bool kept = ctx.rng->next_unit() < keep;
            cached_mask.data()[i] = kept ? 1.0 : 0.0;
            double v = kept ? x.data()[i] : kAlphaPrime;
            y.data()[i] = scale_a * v + shift_b;
        }
        return y;
    }

    Matrix backward(const Matrix& grad_out) {
        if (cached_mask.empty())
            throw StateError(
                "alpha dropout: backward called without a preceding train-mode forward");
        Matrix grad_in(grad_out.rows(), grad_out.cols());
        for (std::size_t i = 0; i < grad_out.size(); ++i)
            grad_in.data()[i] = grad_out.data()[i] * cached_mask.data()[i] * scale_a;
        cached_mask = Matrix();
        return grad_in;
    }
};

using Layer = std::variant<Dense, BatchNorm, ActivationLayer, Dropout, GaussianDropout,
                           AlphaDropout>;

inline Matrix layer_forward(Layer& layer, const Matrix& x, const ForwardCtx& ctx) {
    return std::visit([&](auto& l) { return l.forward(x, ctx); }, layer);
}

inline Matrix layer_backward(Layer& layer, const Matrix& grad_out) {
    return std::visit([&](auto& l) { return l.backward(grad_out); }, layer);
}

}  // namespace txnn
