#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcn/trainer.hpp"

namespace pcn {

// YAML config holding the TrainConfig fields:
//
//   model:
//     dims: [3072, 1000, 500, 10]
//     output_dim: 10
//     activation: relu            # or per layer: activations: [relu, tanh, ...]
//     latent_init_scale: 1.0
//   infer:
//     steps: 50
//     eta: 0.05
//     early_stop: {threshold: 1.0e-6, patience: 3}   # optional
//   learn:
//     steps: 500                  # optional, defaults to batch_size
//     eta: 0.005
//   batch_size: 500
//   epochs: 4
//   seed: 0
//   eval_seed: 0
//   eval_mode: unsupervised_inference
//
// Overrides are "dotted.key=value" strings applied before conversion, so
// "infer.eta=0.1" replaces infer.eta. Missing keys keep the
// TrainConfig::cifar10_reference() values. Throws ConfigError.
TrainConfig parse_train_config(std::string_view text,
                               const std::vector<std::string>& overrides = {});
TrainConfig load_train_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

std::string to_yaml(const TrainConfig& config);

}  // namespace pcn
