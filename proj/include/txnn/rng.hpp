#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "txnn/errors.hpp"
#include "txnn/matrix.hpp"

namespace txnn {

// Seeded 64-bit generator with a fixed, portable recurrence (splitmix64,
// Vigna's public-domain constants). Every stream in the project derives from
// this so that a seed fully determines a run, bit for bit:
//
//   state += 0x9e3779b97f4a7c15
//   z = state; z ^= z >> 30; z *= 0xbf58476d1ce4e5b9
//   z ^= z >> 27; z *= 0x94d049bb133111eb; z ^= z >> 31
//
// Uniform doubles take the top 53 bits: (z >> 11) * 2^-53, giving [0, 1).
// Normal draws use Box-Muller and always consume exactly two uniforms:
//   z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (lo > hi) throw ArgumentError("uniform: lo > hi");
        return lo + (hi - lo) * next_unit();
    }

    double normal(double mean, double stddev) {
        if (stddev < 0.0) throw ArgumentError("normal: negative stddev");
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + stddev * (r * std::cos(2.0 * std::numbers::pi * u2));
    }

    // Integer in [0, n). n == 0 is an error.
    std::size_t below(std::size_t n) {
        if (n == 0) throw ArgumentError("below: n must be positive");
        return static_cast<std::size_t>(next_u64() % n);
    }

    // Fisher-Yates.
    template <class RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

    Matrix uniform_matrix(double lo, double hi, std::size_t rows, std::size_t cols) {
        if (lo > hi) throw ArgumentError("uniform_matrix: lo > hi");
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows * cols; ++i)
            m.data()[i] = lo + (hi - lo) * next_unit();
        return m;
    }

    Matrix normal_matrix(double mean, double stddev, std::size_t rows, std::size_t cols) {
        if (stddev < 0.0) throw ArgumentError("normal_matrix: negative stddev");
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = normal(mean, stddev);
        return m;
    }

private:
    std::uint64_t state_;
};

}  // namespace txnn
