#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "txnn/errors.hpp"
#include "txnn/model.hpp"

namespace txnn {

// Model checkpoint, little-endian throughout:
//   "TXNN" | u32 version | u64 layer count | per-layer [u32 tag | payload]
// Tags: 1 dense (u64 in, u64 out, W, b), 2 batchnorm (u64 features, f64 eps,
// f64 momentum, gamma, beta, running_mean, running_var), 3 activation
// (u32 fn, f64 beta), 4 dropout / 5 gaussian dropout / 6 alpha dropout
// (f64 rate). Parameter blocks are raw f64 arrays in row-major order.

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace detail {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kCheckpointMagic[4] = {'T', 'X', 'N', 'N'};

template <class T>
void write_pod(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T read_pod(std::ifstream& f, const std::string& path) {
    T v{};
    if (!f.read(reinterpret_cast<char*>(&v), sizeof v))
        throw FormatError("truncated checkpoint " + path);
    return v;
}

inline void write_matrix(std::ofstream& f, const Matrix& m) {
    f.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

inline void read_matrix(std::ifstream& f, Matrix& m, const std::string& path) {
    if (!f.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double))))
        throw FormatError("truncated checkpoint " + path);
}

}  // namespace detail

inline void save_model(const Model& model, const std::string& path) {
    using namespace detail;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot write checkpoint " + path);
    f.write(kCheckpointMagic, 4);
    write_pod<std::uint32_t>(f, kCheckpointVersion);
    write_pod<std::uint64_t>(f, model.layers().size());
    for (const Layer& layer : model.layers()) {
        if (const auto* d = std::get_if<Dense>(&layer)) {
            write_pod<std::uint32_t>(f, 1);
            write_pod<std::uint64_t>(f, d->w.rows());
            write_pod<std::uint64_t>(f, d->w.cols());
            write_matrix(f, d->w);
            write_matrix(f, d->b);
        } else if (const auto* bn = std::get_if<BatchNorm>(&layer)) {
            write_pod<std::uint32_t>(f, 2);
            write_pod<std::uint64_t>(f, bn->features());
            write_pod<double>(f, bn->epsilon);
            write_pod<double>(f, bn->momentum);
            write_matrix(f, bn->gamma);
            write_matrix(f, bn->beta);
            write_matrix(f, bn->running_mean);
            write_matrix(f, bn->running_var);
        } else if (const auto* a = std::get_if<ActivationLayer>(&layer)) {
            write_pod<std::uint32_t>(f, 3);
            write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(a->kind.fn()));
            write_pod<double>(f, a->kind.beta());
        } else if (const auto* dr = std::get_if<Dropout>(&layer)) {
            write_pod<std::uint32_t>(f, 4);
            write_pod<double>(f, dr->rate);
        } else if (const auto* g = std::get_if<GaussianDropout>(&layer)) {
            write_pod<std::uint32_t>(f, 5);
            write_pod<double>(f, g->rate);
        } else if (const auto* al = std::get_if<AlphaDropout>(&layer)) {
            write_pod<std::uint32_t>(f, 6);
            write_pod<double>(f, al->rate);
        }
    }
}

inline Model load_model(const std::string& path) {
    using namespace detail;
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open checkpoint " + path);
    char magic[4];
    if (!f.read(magic, 4)) throw FormatError("truncated checkpoint " + path);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw FormatError("bad checkpoint magic in " + path);
    auto version = read_pod<std::uint32_t>(f, path);
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version) + " in " +
                          path);
    auto layer_count = read_pod<std::uint64_t>(f, path);
    Model m;
    for (std::uint64_t i = 0; i < layer_count; ++i) {
        auto tag = read_pod<std::uint32_t>(f, path);
        switch (tag) {
            case 1: {
                auto in = read_pod<std::uint64_t>(f, path);
                auto out = read_pod<std::uint64_t>(f, path);
                Dense d;
                d.w = Matrix(in, out);
                d.b = Matrix(1, out);
                d.grad_w = Matrix(in, out);
                d.grad_b = Matrix(1, out);
                read_matrix(f, d.w, path);
                read_matrix(f, d.b, path);
                m.add(std::move(d));
                break;
            }
            case 2: {
                auto features = read_pod<std::uint64_t>(f, path);
                auto eps = read_pod<double>(f, path);
                auto momentum = read_pod<double>(f, path);
                BatchNorm bn(features, eps, momentum);
                read_matrix(f, bn.gamma, path);
                read_matrix(f, bn.beta, path);
                read_matrix(f, bn.running_mean, path);
                read_matrix(f, bn.running_var, path);
                m.add(std::move(bn));
                break;
            }
            case 3: {
                auto fn = read_pod<std::uint32_t>(f, path);
                auto beta = read_pod<double>(f, path);
                switch (fn) {
                    case ActivationKind::kReLU: m.add(ActivationLayer(ActivationKind::relu())); break;
                    case ActivationKind::kSwish:
                        m.add(ActivationLayer(ActivationKind::swish(beta)));
                        break;
                    case ActivationKind::kMish: m.add(ActivationLayer(ActivationKind::mish())); break;
                    case ActivationKind::kTanhExp:
                        m.add(ActivationLayer(ActivationKind::tanhexp()));
                        break;
                    default: throw FormatError("unknown activation id in " + path);
                }
                break;
            }
            case 4: m.add(Dropout(read_pod<double>(f, path))); break;
            case 5: m.add(GaussianDropout(read_pod<double>(f, path))); break;
            case 6: m.add(AlphaDropout(read_pod<double>(f, path))); break;
            default: throw FormatError("unknown layer tag " + std::to_string(tag) + " in " + path);
        }
    }
    return m;
}

}  // namespace txnn
