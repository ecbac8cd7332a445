#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "txnn/activations.hpp"
#include "txnn/csv.hpp"
#include "txnn/errors.hpp"
#include "txnn/rng.hpp"

namespace txnn {

enum class BenchVariant { forward, first_derivative, second_derivative };

inline std::string bench_variant_str(BenchVariant v) {
    switch (v) {
        case BenchVariant::forward: return "forward";
        case BenchVariant::first_derivative: return "first_derivative";
        case BenchVariant::second_derivative: return "second_derivative";
    }
    return "?";
}

struct BenchResult {
    std::string function_name;
    BenchVariant variant;
    std::size_t iterations = 0;
    double mean_ns = 0.0;    // mean per-call time across passes
    double stddev_ns = 0.0;  // stddev of the per-pass means
    double checksum = 0.0;   // sum of kernel outputs over one pass
};

namespace detail {

constexpr double kBenchDiffStep = 1e-5;

inline double swish1(double x) { return swish(x, 1.0); }
inline double swish1_prime(double x) { return swish_prime(x, 1.0); }
inline double swish1_second(double x) {
    return (swish_prime(x + kBenchDiffStep, 1.0) - swish_prime(x - kBenchDiffStep, 1.0)) /
           (2.0 * kBenchDiffStep);
}
inline double mish_second(double x) {
    return (mish_prime(x + kBenchDiffStep) - mish_prime(x - kBenchDiffStep)) /
           (2.0 * kBenchDiffStep);
}
inline double tanhexp_second(double x) {
    return (tanhexp_prime(x + kBenchDiffStep) - tanhexp_prime(x - kBenchDiffStep)) /
           (2.0 * kBenchDiffStep);
}

using ScalarKernel = double (*)(double);

inline ScalarKernel bench_kernel_fn(const ActivationKind& kind, BenchVariant variant) {
    switch (variant) {
        case BenchVariant::forward:
            switch (kind.fn()) {
                case ActivationKind::kReLU: return relu;
                case ActivationKind::kSwish: return swish1;
                case ActivationKind::kMish: return mish;
                case ActivationKind::kTanhExp: return tanhexp;
            }
            break;
        case BenchVariant::first_derivative:
            switch (kind.fn()) {
                case ActivationKind::kReLU: return relu_prime;
                case ActivationKind::kSwish: return swish1_prime;
                case ActivationKind::kMish: return mish_prime;
                case ActivationKind::kTanhExp: return tanhexp_prime;
            }
            break;
        case BenchVariant::second_derivative:
            switch (kind.fn()) {
                case ActivationKind::kReLU:
                    throw ArgumentError("bench: relu has no second-derivative kernel");
                case ActivationKind::kSwish: return swish1_second;
                case ActivationKind::kMish: return mish_second;
                case ActivationKind::kTanhExp: return tanhexp_second;
            }
            break;
    }
    throw ArgumentError("bench: unknown kernel");
}

}  // namespace detail

// Times one scalar kernel over `iterations` pre-drawn inputs from U(-5, 5).
// 10% of the iterations run untimed as warmup, then the whole pass repeats
// kNumPasses times; mean_ns/stddev_ns summarize the per-pass mean time per
// call. Outputs accumulate into the checksum so the loop cannot be elided.
// Strictly single-threaded.
inline BenchResult bench_kernel(const ActivationKind& kind, BenchVariant variant,
                                std::size_t iterations, Rng& rng) {
    if (iterations < 1) throw ArgumentError("bench: iterations must be >= 1");
    constexpr int kNumPasses = 10;
    detail::ScalarKernel kernel = detail::bench_kernel_fn(kind, variant);

    std::vector<double> inputs(iterations);
    for (double& v : inputs) v = rng.uniform(-5.0, 5.0);

    double sink = 0.0;
    const std::size_t warmup = iterations / 10;
    for (std::size_t i = 0; i < warmup; ++i) sink += kernel(inputs[i]);

    double checksum = 0.0;
    std::vector<double> per_call_ns(kNumPasses);
    for (int pass = 0; pass < kNumPasses; ++pass) {
        double acc = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < iterations; ++i) acc += kernel(inputs[i]);
        const auto t1 = std::chrono::steady_clock::now();
        per_call_ns[pass] =
            std::chrono::duration<double, std::nano>(t1 - t0).count() /
            static_cast<double>(iterations);
        checksum = acc;
    }
    asm volatile("" : : "g"(&sink) : "memory");

    double mean = 0.0;
    for (double v : per_call_ns) mean += v;
    mean /= kNumPasses;
    double var = 0.0;
    for (double v : per_call_ns) var += (v - mean) * (v - mean);
    var /= kNumPasses;

    BenchResult r;
    r.function_name = kind.name();
    r.variant = variant;
    r.iterations = iterations;
    r.mean_ns = mean;
    r.stddev_ns = std::sqrt(var);
    r.checksum = checksum;
    return r;
}

// All kind x variant pairs except relu/second (identically zero, an
// assignment rather than a computation). Every kernel sees the same input
// stream: the rng is re-seeded per kernel.
inline std::vector<BenchResult> bench_suite(std::size_t iterations, std::uint64_t seed) {
    const ActivationKind kinds[] = {ActivationKind::tanhexp(), ActivationKind::relu(),
                                    ActivationKind::mish(), ActivationKind::swish()};
    std::vector<BenchResult> results;
    for (BenchVariant variant : {BenchVariant::forward, BenchVariant::first_derivative,
                                 BenchVariant::second_derivative}) {
        for (const ActivationKind& kind : kinds) {
            if (variant == BenchVariant::second_derivative &&
                kind.fn() == ActivationKind::kReLU)
                continue;
            Rng rng(seed);
            results.push_back(bench_kernel(kind, variant, iterations, rng));
        }
    }
    return results;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& results,
                            const Provenance& prov) {
    write_csv_provenance(out, prov);
    out << "function,variant,iterations,mean_ns,stddev_ns,checksum\n";
    for (const BenchResult& r : results)
        out << r.function_name << "," << bench_variant_str(r.variant) << "," << r.iterations
            << "," << fmt_double(r.mean_ns) << "," << fmt_double(r.stddev_ns) << ","
            << fmt_double(r.checksum) << "\n";
}

}  // namespace txnn
