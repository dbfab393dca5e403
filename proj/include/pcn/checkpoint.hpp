#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcn/model.hpp"

namespace pcn {

// Binary layout, all integers u32 little-endian, floats f64 little-endian:
//
//   "PCN1" | version | L | d_0..d_L | d_out | act_0..act_{L-1}
//   | latent_init_scale (f64)
//   | for W^(0..L-1), W^out: rows | cols | rows*cols values, row-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig config;
    GenerativeStack stack;
};

std::vector<std::uint8_t> encode_checkpoint(const GenerativeStack& stack,
                                            const ModelConfig& config);
// Throws BadMagicError, VersionMismatchError, TruncatedCheckpointError or
// ShapeContradictionError.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const GenerativeStack& stack, const ModelConfig& config,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pcn
