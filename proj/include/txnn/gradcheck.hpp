#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "txnn/activations.hpp"
#include "txnn/loss.hpp"
#include "txnn/model.hpp"
#include "txnn/rng.hpp"

namespace txnn {

inline constexpr double kScalarGradTol = 1e-6;   // grid check, absolute
inline constexpr double kNetworkGradTol = 1e-5;  // end-to-end check, relative
inline constexpr double kMishFormTol = 1e-9;     // gated vs rational derivative

struct ScalarCheckResult {
    double max_abs_dev = 0.0;
    double worst_x = 0.0;
};

// Compares activate_prime against a central difference of activate
// (h = 1e-5) at every x on the grid [-5, 5] step 0.01. derivative_bias
// shifts the analytic side; it exists only so negative tests can prove the
// check actually fails on a wrong derivative.
inline ScalarCheckResult check_scalar_gradient(const ActivationKind& kind,
                                               double derivative_bias = 0.0) {
    constexpr double kH = 1e-5;
    ScalarCheckResult r;
    for (int i = 0; i <= 1000; ++i) {
        double x = -5.0 + 0.01 * static_cast<double>(i);
        // A central difference straddling relu's kink measures the mean of the
        // one-sided slopes, not a derivative; the kink is not differentiable,
        // so it is excluded rather than compared.
        if (kind.fn() == ActivationKind::kReLU && std::abs(x) <= kH) continue;
        double analytic = activate_prime(kind, x) + derivative_bias;
        double numeric = (activate(kind, x + kH) - activate(kind, x - kH)) / (2.0 * kH);
        double dev = std::abs(analytic - numeric);
        if (dev > r.max_abs_dev) {
            r.max_abs_dev = dev;
            r.worst_x = x;
        }
    }
    return r;
}

// Max deviation between the two algebraic routes to the mish derivative
// (gated form vs rational-in-e^x form) over the same grid.
inline double mish_form_agreement() {
    double max_dev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double x = -5.0 + 0.01 * static_cast<double>(i);
        max_dev = std::max(max_dev, std::abs(mish_prime(x) - mish_prime_closed_form(x)));
    }
    return max_dev;
}

struct NetworkCheckResult {
    double max_rel_dev = 0.0;
    std::size_t params_checked = 0;
};

// End-to-end check on a small stack: 784 -> 8 -> 8 -> 10 with batchnorm and
// the given activation after each hidden dense layer, no dropout. One batch
// of 4 runs forward + backward to collect analytic gradients, then every
// parameter entry is wiggled by +-h and the loss re-evaluated. Deviation is
// |analytic - numeric| / max(1, |analytic|, |numeric|) so near-zero gradients
// compare absolutely.
inline NetworkCheckResult check_network_gradient(const ActivationKind& kind,
                                                 std::uint64_t seed = 42) {
    constexpr double kH = 1e-5;
    constexpr std::size_t kBatch = 4;
    Rng rng(seed);
    Model net;
    net.add(Dense(784, 8, rng));
    net.add(BatchNorm(8));
    net.add(ActivationLayer(kind));
    net.add(Dense(8, 8, rng));
    net.add(BatchNorm(8));
    net.add(ActivationLayer(kind));
    net.add(Dense(8, 10, rng));
    net.set_training(true);

    Matrix x = rng.normal_matrix(0.0, 1.0, kBatch, 784);
    std::vector<std::uint8_t> labels(kBatch);
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng.below(10));

    net.backward(softmax_cross_entropy(net.forward(x), labels).second);
    std::vector<ParamRef> refs = net.params();
    std::vector<Matrix> analytic;
    analytic.reserve(refs.size());
    for (const ParamRef& p : refs) analytic.push_back(*p.grad);

    auto loss_at = [&] { return softmax_cross_entropy(net.forward(x), labels).first.loss; };

    NetworkCheckResult r;
    for (std::size_t pi = 0; pi < refs.size(); ++pi) {
        double* vals = refs[pi].value->data();
        const double* a = analytic[pi].data();
        for (std::size_t i = 0; i < refs[pi].value->size(); ++i) {
            const double saved = vals[i];
            vals[i] = saved + kH;
            const double lp = loss_at();
            vals[i] = saved - kH;
            const double lm = loss_at();
            vals[i] = saved;
            const double numeric = (lp - lm) / (2.0 * kH);
            const double dev = std::abs(a[i] - numeric) /
                               std::max({1.0, std::abs(a[i]), std::abs(numeric)});
            if (dev > r.max_rel_dev) r.max_rel_dev = dev;
            ++r.params_checked;
        }
    }
    return r;
}

struct GradCheckReport {
    std::string activation;
    double scalar_max_dev = 0.0;
    double network_max_rel_dev = 0.0;
    bool pass = false;
};

inline GradCheckReport run_gradcheck(const ActivationKind& kind, std::uint64_t seed = 42,
                                     double derivative_bias = 0.0) {
    GradCheckReport rep;
    rep.activation = kind.name();
    rep.scalar_max_dev = check_scalar_gradient(kind, derivative_bias).max_abs_dev;
    rep.network_max_rel_dev = check_network_gradient(kind, seed).max_rel_dev;
    rep.pass = rep.scalar_max_dev < kScalarGradTol && rep.network_max_rel_dev < kNetworkGradTol;
    return rep;
}

}  // namespace txnn
