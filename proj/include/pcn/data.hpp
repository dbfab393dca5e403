#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcn/matrix.hpp"

namespace pcn {

inline constexpr std::size_t kCifarImageBytes = 3072;  // 3 planes of 32×32
inline constexpr std::size_t kCifarRecordBytes = kCifarImageBytes + 1;
inline constexpr std::size_t kCifarClasses = 10;

// N samples: inputs is N × d_0 with values in [0, 1], labels in [0, C).
struct Dataset {
    Matrix inputs;
    std::vector<std::size_t> labels;
    std::size_t num_classes = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t input_dim() const noexcept { return inputs.cols(); }

    // Rows in the order given.
    Dataset subset(std::span<const std::size_t> indices) const;
    // Rows [begin, end).
    Dataset slice(std::size_t begin, std::size_t end) const;
};

// Parses CIFAR-10 binary files and concatenates them in order. Pixels are
// divided by 255. Throws IoError (unreadable), FormatError (size not a
// multiple of 3073) or CorruptRecordError (label byte > 9).
Dataset load_cifar10(std::span<const std::filesystem::path> paths);

// Writes the dataset in CIFAR-10 binary layout; pixels are rounded to the
// nearest of 256 levels. Requires d_0 == 3072 and labels < 256.
void write_cifar10(const Dataset& dataset, const std::filesystem::path& path);

// Standard file names inside a cifar-10-batches-bin directory. Only files
// that exist are returned; an empty result means the split is absent.
std::vector<std::filesystem::path> cifar10_train_files(const std::filesystem::path& dir);
std::vector<std::filesystem::path> cifar10_test_files(const std::filesystem::path& dir);

// Gaussian class blobs (unit within-class deviation) whose means are
// pairwise at least `separation` apart, mapped into [0, 1] by a single
// affine transform. Sample i has label i % num_classes.
Dataset synth_blobs(std::size_t num_classes, std::size_t samples_per_class,
                    std::size_t input_dim, double separation, std::uint64_t seed);

Matrix one_hot(std::span<const std::size_t> labels, std::size_t num_classes);

// Order in which samples are visited for one pass over a dataset.
class BatchPlan {
public:
    // Seeded shuffle of 0..n-1 (identity order when shuffle is false).
    // Throws ArgumentError if batch_size is 0 or exceeds n.
    BatchPlan(std::size_t n, std::size_t batch_size, std::uint64_t seed,
              bool drop_last = true, bool shuffle = true);

    std::size_t batch_size() const noexcept { return batch_size_; }
    bool drop_last() const noexcept { return drop_last_; }
    std::span<const std::size_t> permutation() const noexcept { return permutation_; }

    std::size_t num_batches() const noexcept;
    std::span<const std::size_t> batch_indices(std::size_t b) const;

private:
    std::size_t batch_size_;
    bool drop_last_;
    std::vector<std::size_t> permutation_;
};

struct Batch {
    Matrix inputs;
    std::vector<std::size_t> labels;
};

Batch gather_batch(const Dataset& dataset, const BatchPlan& plan, std::size_t b);
std::vector<Batch> batches(const Dataset& dataset, const BatchPlan& plan);

}  // namespace pcn
