#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "txnn/errors.hpp"
#include "txnn/matrix.hpp"

namespace txnn {

// Mean cross-entropy over the batch plus the argmax hit count.
struct LossValue {
    double loss = 0.0;
    std::size_t correct = 0;
};

// Softmax + categorical cross-entropy, fused for numerical stability.
// L = mean_i [logsumexp(z_i) - z_i[label_i]], grad = (softmax - onehot)/batch,
// i.e. the exact gradient of the mean loss with respect to the logits.
inline std::pair<LossValue, Matrix> softmax_cross_entropy(const Matrix& logits,
                                                          const std::vector<std::uint8_t>& labels) {
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    if (labels.size() != n)
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(n) + " rows");
    if (n == 0) throw ArgumentError("softmax_cross_entropy: empty batch");

    Matrix grad(n, c);
    LossValue lv;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] >= c)
            throw ArgumentError("softmax_cross_entropy: label " + std::to_string(labels[i]) +
                                " out of range for " + std::to_string(c) + " classes");
        double max_z = logits(i, 0);
        std::size_t argmax = 0;
        for (std::size_t j = 1; j < c; ++j)
            if (logits(i, j) > max_z) {
                max_z = logits(i, j);
                argmax = j;
            }
        double sum_exp = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum_exp += std::exp(logits(i, j) - max_z);
        const double log_sum = std::log(sum_exp) + max_z;
        lv.loss += log_sum - logits(i, labels[i]);
        if (argmax == labels[i]) ++lv.correct;
        for (std::size_t j = 0; j < c; ++j) {
            double p = std::exp(logits(i, j) - log_sum);
            grad(i, j) = (p - (j == labels[i] ? 1.0 : 0.0)) * inv_n;
        }
    }
    lv.loss *= inv_n;
    return {lv, std::move(grad)};
}

}  // namespace txnn
