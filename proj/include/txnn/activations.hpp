#pragma once

#include <cmath>
#include <string>

#include "txnn/errors.hpp"
#include "txnn/matrix.hpp"

namespace txnn {

// Numerically stable logistic function, valid over the whole double range.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// ln(1 + e^x) without overflow.
inline double softplus(double x) {
    if (x > 30.0) return x;  // e^-30 below double epsilon of x
    return std::log1p(std::exp(x));
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// Subgradient at 0 is taken as 0.
inline double relu_prime(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline double swish(double x, double beta = 1.0) { return x * sigmoid(beta * x); }

// d/dx [x sigmoid(bx)] = sigmoid(bx) (1 + bx (1 - sigmoid(bx)))
inline double swish_prime(double x, double beta = 1.0) {
    double s = sigmoid(beta * x);
    return s * (1.0 + beta * x * (1.0 - s));
}

inline double mish(double x) {
    if (x > 20.0) return x;  // tanh(softplus(x)) rounds to 1
    return x * std::tanh(softplus(x));
}

// First derivative of mish in the self-gated form
//   tanh(sp) + x sigmoid(x) (1 - tanh^2(sp)),  sp = softplus(x),
// which stays finite over the whole double range.
inline double mish_prime(double x) {
    double t = std::tanh(softplus(x));
    return t + x * sigmoid(x) * (1.0 - t * t);
}

// The same derivative as one rational expression in e^x:
//   e^x (4(x+1) + 4e^2x + e^3x + e^x(4x+6)) / (2e^x + e^2x + 2)^2
// Kept as an independent algebraic route for cross-checking mish_prime;
// e^3x overflows past x ~ 236, so large inputs take the saturated branch.
inline double mish_prime_closed_form(double x) {
    if (x > 30.0) return 1.0;
    double e = std::exp(x);
    double e2 = e * e;
    double e3 = e2 * e;
    double num = e * (4.0 * (x + 1.0) + 4.0 * e2 + e3 + e * (4.0 * x + 6.0));
    double den = 2.0 * e + e2 + 2.0;
    return num / (den * den);
}

inline double tanhexp(double x) {
    if (x > 20.0) return x;  // tanh(e^x) rounds to 1
    return x * std::tanh(std::exp(x));
}

// f'(x) = tanh(e^x) - x e^x (tanh^2(e^x) - 1); reuses tanh(e^x).
// Past x ~ 20 the sech^2 term underflows and the derivative is 1; the branch
// also avoids the inf * 0 at the point where e^x itself overflows.
inline double tanhexp_prime(double x) {
    if (x > 20.0) return 1.0;
    double e = std::exp(x);
    double t = std::tanh(e);
    return t - x * e * (t * t - 1.0);
}

// Which nonlinearity a layer or kernel applies. Swish carries its gate
// sharpness beta (fixed at construction, conventionally 1).
class ActivationKind {
public:
    enum Fn { kReLU, kSwish, kMish, kTanhExp };

    static ActivationKind relu() { return ActivationKind(kReLU, 1.0); }
    static ActivationKind swish(double beta = 1.0) {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ArgumentError("swish beta must be finite and > 0");
        return ActivationKind(kSwish, beta);
    }
    static ActivationKind mish() { return ActivationKind(kMish, 1.0); }
    static ActivationKind tanhexp() { return ActivationKind(kTanhExp, 1.0); }

    Fn fn() const { return fn_; }
    double beta() const { return beta_; }

    std::string name() const {
        switch (fn_) {
            case kReLU: return "relu";
            case kSwish: return "swish";
            case kMish: return "mish";
            case kTanhExp: return "tanhexp";
        }
        return "?";
    }

    friend bool operator==(const ActivationKind& a, const ActivationKind& b) {
        return a.fn_ == b.fn_ && a.beta_ == b.beta_;
    }

private:
    ActivationKind(Fn fn, double beta) : fn_(fn), beta_(beta) {}

    Fn fn_;
    double beta_;
};

inline double activate(const ActivationKind& kind, double x) {
    switch (kind.fn()) {
        case ActivationKind::kReLU: return relu(x);
        case ActivationKind::kSwish: return swish(x, kind.beta());
        case ActivationKind::kMish: return mish(x);
        case ActivationKind::kTanhExp: return tanhexp(x);
    }
    return 0.0;
}

inline double activate_prime(const ActivationKind& kind, double x) {
    switch (kind.fn()) {
        case ActivationKind::kReLU: return relu_prime(x);
        case ActivationKind::kSwish: return swish_prime(x, kind.beta());
        case ActivationKind::kMish: return mish_prime(x);
        case ActivationKind::kTanhExp: return tanhexp_prime(x);
    }
    return 0.0;
}

// Second derivative via central difference of the analytic first derivative.
// ReLU is rejected: its second derivative is identically zero away from the
// kink and undefined at it.
inline double activate_second(const ActivationKind& kind, double x, double h = 1e-5) {
    if (kind.fn() == ActivationKind::kReLU)
        throw ArgumentError("activate_second: unsupported for relu");
    return (activate_prime(kind, x + h) - activate_prime(kind, x - h)) / (2.0 * h);
}

inline Matrix activate(const ActivationKind& kind, const Matrix& m) {
    return m.map([&](double v) { return activate(kind, v); });
}

inline Matrix activate_prime(const ActivationKind& kind, const Matrix& m) {
    return m.map([&](double v) { return activate_prime(kind, v); });
}

}  // namespace txnn
