#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "txnn/errors.hpp"
#include "txnn/idx.hpp"
#include "txnn/matrix.hpp"
#include "txnn/rng.hpp"

namespace txnn {

enum class DatasetName { mnist, fashion, kmnist };

inline std::string dataset_name_str(DatasetName n) {
    switch (n) {
        case DatasetName::mnist: return "mnist";
        case DatasetName::fashion: return "fashion";
        case DatasetName::kmnist: return "kmnist";
    }
    return "?";
}

// Immutable after load; images are one flattened 28x28 picture per row.
struct Dataset {
    Matrix images;  // n x 784, values in [0,1]
    std::vector<std::uint8_t> labels;
    DatasetName name = DatasetName::mnist;

    std::size_t size() const { return labels.size(); }
};

struct Batch {
    Matrix x;
    std::vector<std::uint8_t> y;
};

inline Dataset make_dataset(Matrix images, std::vector<std::uint8_t> labels, DatasetName name) {
    if (images.rows() != labels.size())
        throw ShapeError("dataset: " + std::to_string(images.rows()) + " images vs " +
                         std::to_string(labels.size()) + " labels");
    for (std::uint8_t l : labels)
        if (l >= 10)
            throw FormatError("dataset: label " + std::to_string(l) + " out of range [0,9]");
    return Dataset{std::move(images), std::move(labels), name};
}

namespace detail {

inline std::string find_split_file(const std::string& dir, const std::string& stem) {
    namespace fs = std::filesystem;
    const std::string plain = (fs::path(dir) / stem).string();
    const std::string gz = plain + ".gz";
    if (fs::exists(plain)) return plain;
    if (fs::exists(gz)) return gz;
    throw FormatError("missing dataset file: expected " + plain + " or " + gz);
}

}  // namespace detail

// Loads one split from the canonical IDX file pair in `dir`
// (train-*/t10k-*-idx[13]-ubyte, optionally .gz). All three dataset families
// ship the same layout, so they share this path.
inline Dataset load_dataset_split(DatasetName name, const std::string& dir, bool train) {
    const std::string prefix = train ? "train" : "t10k";
    const std::string images_path = detail::find_split_file(dir, prefix + "-images-idx3-ubyte");
    const std::string labels_path = detail::find_split_file(dir, prefix + "-labels-idx1-ubyte");
    return make_dataset(load_idx_images(images_path), load_idx_labels(labels_path), name);
}

inline Dataset dataset_head(const Dataset& ds, std::size_t n) {
    if (n >= ds.size()) return ds;
    Matrix images(n, ds.images.cols());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < ds.images.cols(); ++c) images(r, c) = ds.images(r, c);
    return Dataset{std::move(images),
                   std::vector<std::uint8_t>(ds.labels.begin(),
                                             ds.labels.begin() + static_cast<std::ptrdiff_t>(n)),
                   ds.name};
}

// Index partition for one pass over n samples. With an rng the order is a
// seeded permutation. A trailing batch of size 1 is dropped only when
// drop_trailing_single is set (train mode, where batchnorm needs >= 2).
inline std::vector<std::vector<std::uint32_t>> batch_indices(std::size_t n,
                                                             std::size_t batch_size,
                                                             Rng* shuffle_rng,
                                                             bool drop_trailing_single) {
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    if (shuffle_rng) shuffle_rng->shuffle(order.begin(), order.end());
    std::vector<std::vector<std::uint32_t>> out;
    for (std::size_t start = 0; start < n; start += batch_size) {
        std::size_t end = std::min(n, start + batch_size);
        if (drop_trailing_single && end - start == 1 && start != 0) continue;
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

inline Batch gather_batch(const Dataset& ds, const std::vector<std::uint32_t>& idx) {
    Batch b;
    b.x = Matrix(idx.size(), ds.images.cols());
    b.y.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < ds.images.cols(); ++c) b.x(r, c) = ds.images(idx[r], c);
        b.y[r] = ds.labels[idx[r]];
    }
    return b;
}

}  // namespace txnn
