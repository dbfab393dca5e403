#include "pcn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "pcn/errors.hpp"
#include "pcn/random.hpp"

namespace fs = std::filesystem;

namespace pcn {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.num_classes = num_classes;
    out.inputs = Matrix(indices.size(), input_dim());
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        if (src >= size()) throw ArgumentError("subset index out of range");
        const auto row = inputs.row(src);
        std::copy(row.begin(), row.end(), out.inputs.row(i).begin());
        out.labels.push_back(labels[src]);
    }
    return out;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw ArgumentError("slice out of range");
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    return subset(idx);
}

Dataset load_cifar10(std::span<const fs::path> paths) {
    std::vector<unsigned char> bytes;
    std::vector<std::size_t> file_start;  // record offset of each file
    std::size_t records = 0;
    for (const fs::path& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path.string());
        std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
        if (buf.size() % kCifarRecordBytes != 0) {
            const std::size_t expected =
                (buf.size() / kCifarRecordBytes + 1) * kCifarRecordBytes;
            throw FormatError(path.string() + ": size " + std::to_string(buf.size()) +
                                  " is not a multiple of " +
                                  std::to_string(kCifarRecordBytes) + " (expected " +
                                  std::to_string(expected) + " for a whole record count)",
                              expected, buf.size());
        }
        file_start.push_back(records);
        records += buf.size() / kCifarRecordBytes;
        bytes.insert(bytes.end(), buf.begin(), buf.end());
    }

    Dataset ds;
    ds.num_classes = kCifarClasses;
    ds.inputs = Matrix(records, kCifarImageBytes);
    ds.labels.resize(records);
    for (std::size_t r = 0; r < records; ++r) {
        const unsigned char* rec = bytes.data() + r * kCifarRecordBytes;
        if (rec[0] >= kCifarClasses) {
            const auto file = static_cast<std::size_t>(
                std::upper_bound(file_start.begin(), file_start.end(), r) -
                file_start.begin() - 1);
            throw CorruptRecordError(paths[file].string() + ": record " +
                                         std::to_string(r - file_start[file]) +
                                         " has label byte " + std::to_string(rec[0]) +
                                         " (> 9)",
                                     r);
        }
        ds.labels[r] = rec[0];
        auto row = ds.inputs.row(r);
        for (std::size_t p = 0; p < kCifarImageBytes; ++p) row[p] = rec[1 + p] / 255.0;
    }
    return ds;
}

void write_cifar10(const Dataset& dataset, const fs::path& path) {
    if (dataset.input_dim() != kCifarImageBytes)
        throw DimensionError("CIFAR-10 layout needs 3072 values per sample, dataset has " +
                             std::to_string(dataset.input_dim()));
    std::vector<unsigned char> bytes(dataset.size() * kCifarRecordBytes);
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (dataset.labels[r] > 255) throw ArgumentError("label does not fit in one byte");
        unsigned char* rec = bytes.data() + r * kCifarRecordBytes;
        rec[0] = static_cast<unsigned char>(dataset.labels[r]);
        const auto row = dataset.inputs.row(r);
        for (std::size_t p = 0; p < kCifarImageBytes; ++p) {
            const double v = std::clamp(row[p], 0.0, 1.0);
            rec[1 + p] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<fs::path> existing(const fs::path& dir, std::initializer_list<const char*> names) {
    std::vector<fs::path> out;
    for (const char* n : names) {
        fs::path p = dir / n;
        if (fs::is_regular_file(p)) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<fs::path> cifar10_train_files(const fs::path& dir) {
    return existing(dir, {"data_batch_1.bin", "data_batch_2.bin", "data_batch_3.bin",
                          "data_batch_4.bin", "data_batch_5.bin"});
}

std::vector<fs::path> cifar10_test_files(const fs::path& dir) {
    return existing(dir, {"test_batch.bin"});
}

Dataset synth_blobs(std::size_t num_classes, std::size_t samples_per_class,
                    std::size_t input_dim, double separation, std::uint64_t seed) {
    if (num_classes == 0 || samples_per_class == 0 || input_dim == 0)
        throw ArgumentError("synth_blobs: counts and dimension must be positive");
    if (!(separation > 0.0) || !std::isfinite(separation))
        throw ArgumentError("synth_blobs: separation must be positive");

    // Scaled simplex vertices when they fit, otherwise evenly spaced on a line.
    Matrix means(num_classes, input_dim);
    if (num_classes <= input_dim) {
        for (std::size_t c = 0; c < num_classes; ++c) means(c, c) = separation / std::sqrt(2.0);
    } else {
        for (std::size_t c = 0; c < num_classes; ++c)
            means(c, 0) = separation * static_cast<double>(c);
    }

    const std::size_t n = num_classes * samples_per_class;
    Dataset ds;
    ds.num_classes = num_classes;
    ds.inputs = Matrix(n, input_dim);
    ds.labels.resize(n);
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % num_classes;
        ds.labels[i] = c;
        auto row = ds.inputs.row(i);
        const auto mean = means.row(c);
        for (std::size_t j = 0; j < input_dim; ++j) row[j] = mean[j] + noise(rng);
    }

    const auto [lo, hi] = std::minmax_element(ds.inputs.values().begin(),
                                              ds.inputs.values().end());
    const double min = *lo, range = *hi - *lo;
    for (double& v : ds.inputs.values()) v = range > 0.0 ? (v - min) / range : 0.0;
    return ds;
}

Matrix one_hot(std::span<const std::size_t> labels, std::size_t num_classes) {
    Matrix y(labels.size(), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes)
            throw ArgumentError("label " + std::to_string(labels[i]) + " out of range for " +
                                std::to_string(num_classes) + " classes");
        y(i, labels[i]) = 1.0;
    }
    return y;
}

BatchPlan::BatchPlan(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                     bool drop_last, bool shuffle)
    : batch_size_(batch_size), drop_last_(drop_last), permutation_(n) {
    if (batch_size == 0) throw ArgumentError("batch size must be at least 1");
    if (batch_size > n)
        throw ArgumentError("batch size " + std::to_string(batch_size) +
                            " exceeds dataset size " + std::to_string(n));
    std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
    if (shuffle) {
        Rng rng(seed);
        std::shuffle(permutation_.begin(), permutation_.end(), rng);
    }
}

std::size_t BatchPlan::num_batches() const noexcept {
    const std::size_t n = permutation_.size();
    return drop_last_ ? n / batch_size_ : (n + batch_size_ - 1) / batch_size_;
}

std::span<const std::size_t> BatchPlan::batch_indices(std::size_t b) const {
    if (b >= num_batches()) throw ArgumentError("batch index out of range");
    const std::size_t begin = b * batch_size_;
    const std::size_t end = std::min(begin + batch_size_, permutation_.size());
    return std::span<const std::size_t>(permutation_).subspan(begin, end - begin);
}

Batch gather_batch(const Dataset& dataset, const BatchPlan& plan, std::size_t b) {
    if (plan.permutation().size() != dataset.size())
        throw ArgumentError("batch plan was built for a different dataset size");
    Dataset part = dataset.subset(plan.batch_indices(b));
    return {std::move(part.inputs), std::move(part.labels)};
}

std::vector<Batch> batches(const Dataset& dataset, const BatchPlan& plan) {
    std::vector<Batch> out;
    out.reserve(plan.num_batches());
    for (std::size_t b = 0; b < plan.num_batches(); ++b) out.push_back(gather_batch(dataset, plan, b));
    return out;
}

}  // namespace pcn
