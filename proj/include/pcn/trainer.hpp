#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pcn/data.hpp"
#include "pcn/energy.hpp"
#include "pcn/inference.hpp"
#include "pcn/learning.hpp"
#include "pcn/model.hpp"

namespace pcn {

// How test-time inference treats the label.
//  - unsupervised_inference: top error is zero; no label information used.
//  - label_clamped: the supervised error participates in inference exactly
//    as during training. Diagnostic only, since it reads the true label.
enum class EvalMode { unsupervised_inference, label_clamped };

std::string_view to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view name);

struct TrainConfig {
    ModelConfig model;
    InferenceSettings infer;
    LearnSettings learn;
    std::size_t batch_size = 500;
    std::size_t epochs = 4;
    std::uint64_t seed = 0;
    EvalMode eval_mode = EvalMode::unsupervised_inference;
    std::uint64_t eval_seed = 0;

    // CIFAR-10 setup: dims [3072,1000,500,10], relu, B=500, T_infer=50,
    // η_infer=0.05, T_learn=500, η_learn=0.005, 4 epochs.
    static TrainConfig cifar10_reference();

    void validate() const;
};

struct EpochSummary {
    std::size_t epoch = 0;
    // Mean over batches of the energy after the last learning step.
    double mean_final_energy = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    GenerativeStack stack;
    EnergyTrace trace;
    std::vector<EpochSummary> epochs;
};

using EpochCallback = std::function<void(const EpochSummary&)>;

// Supervised training over epochs × batches. Each batch gets fresh latents,
// runs inference with the labels clamped, then t_learn weight updates.
// Divergence errors are rethrown with (epoch, batch) attached.
TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const EpochCallback& on_epoch = {});

// Continues training from an existing stack (epochs numbered from 0).
TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  GenerativeStack initial, const EpochCallback& on_epoch = {});

struct EvalReport {
    double top1 = 0.0;
    double top3 = 0.0;
    std::vector<std::size_t> per_class_counts;   // samples per true class
    std::vector<std::size_t> per_class_correct;  // top-1 hits per true class
    std::size_t samples = 0;
    EvalMode mode = EvalMode::unsupervised_inference;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Frozen-weight evaluation with config.eval_mode and config.eval_seed.
EvalReport evaluate(const GenerativeStack& stack, const TrainConfig& config,
                    const Dataset& dataset);
EvalReport evaluate(const GenerativeStack& stack, const TrainConfig& config,
                    const Dataset& dataset, EvalMode mode, std::uint64_t seed);

// True iff `label` is among the k largest scores; ties go to the lower index.
bool top_k_hit(std::span<const double> scores, std::size_t label, std::size_t k);

}  // namespace pcn
