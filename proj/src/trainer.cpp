#include "pcn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "pcn/errors.hpp"
#include "pcn/random.hpp"

namespace pcn {

std::string_view to_string(EvalMode mode) {
    return mode == EvalMode::label_clamped ? "label_clamped" : "unsupervised_inference";
}

EvalMode parse_eval_mode(std::string_view name) {
    if (name == "unsupervised_inference") return EvalMode::unsupervised_inference;
    if (name == "label_clamped") return EvalMode::label_clamped;
    throw ArgumentError("unknown eval mode '" + std::string(name) +
                        "' (expected unsupervised_inference or label_clamped)");
}

TrainConfig TrainConfig::cifar10_reference() {
    TrainConfig c;
    c.model = ModelConfig::uniform({3072, 1000, 500, 10}, 10, Activation::relu, 1.0);
    c.infer.t_infer = 50;
    c.infer.eta_infer = 0.05;
    c.learn.t_learn = 500;
    c.learn.eta_learn = 0.005;
    c.batch_size = 500;
    c.epochs = 4;
    return c;
}

void TrainConfig::validate() const {
    model.validate();
    infer.validate();
    learn.validate();
    if (batch_size < 1) throw ArgumentError("batch_size must be at least 1");
    if (epochs < 1) throw ArgumentError("epochs must be at least 1");
}

namespace {

void check_dataset(const ModelConfig& model, const Dataset& dataset) {
    if (dataset.input_dim() != model.input_dim())
        throw DimensionError("dataset has " + std::to_string(dataset.input_dim()) +
                             " input features, model expects " +
                             std::to_string(model.input_dim()));
    for (std::size_t label : dataset.labels)
        if (label >= model.output_dim)
            throw ArgumentError("label " + std::to_string(label) +
                                " out of range for output_dim " +
                                std::to_string(model.output_dim));
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const EpochCallback& on_epoch) {
    config.validate();
    return train(config, dataset, init_weights(config.model, config.seed), on_epoch);
}

TrainResult train(const TrainConfig& config, const Dataset& dataset, GenerativeStack initial,
                  const EpochCallback& on_epoch) {
    config.validate();
    check_stack(config.model, initial);
    check_dataset(config.model, dataset);

    using Clock = std::chrono::steady_clock;
    TrainResult result;
    result.stack = std::move(initial);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto started = Clock::now();
        const BatchPlan plan(dataset.size(), config.batch_size, config.seed ^ epoch);
        double final_energy_sum = 0.0;
        for (std::size_t b = 0; b < plan.num_batches(); ++b) {
            const Batch batch = gather_batch(dataset, plan, b);
            const Matrix targets = one_hot(batch.labels, config.model.output_dim);
            const std::size_t rows = batch.labels.size();
            try {
                LatentBatch latents = init_latents(config.model, rows,
                                                   derive_seed(config.seed, {epoch, b}));
                InferenceResult inferred =
                    run_inference(config.model, result.stack, batch.inputs,
                                  std::move(latents), &targets, config.infer);
                std::size_t step = 0;
                for (double e : inferred.energies)
                    result.trace.record(epoch, b, step++, Phase::infer, e);

                LearningResult learned =
                    run_learning(config.model, std::move(result.stack), batch.inputs,
                                 inferred.latents, &targets, config.learn);
                for (double e : learned.energies)
                    result.trace.record(epoch, b, step++, Phase::learn, e);
                final_energy_sum += learned.energies.empty() ? learned.initial_energy
                                                             : learned.energies.back();
                result.stack = std::move(learned.stack);
            } catch (const DivergenceError& e) {
                throw e.with_location(epoch, b);
            }
        }
        EpochSummary summary;
        summary.epoch = epoch;
        summary.mean_final_energy =
            plan.num_batches() ? final_energy_sum / static_cast<double>(plan.num_batches()) : 0.0;
        summary.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
        result.epochs.push_back(summary);
        if (on_epoch) on_epoch(summary);
    }
    return result;
}

bool top_k_hit(std::span<const double> scores, std::size_t label, std::size_t k) {
    if (label >= scores.size()) return false;
    const double target = scores[label];
    std::size_t rank = 0;
    for (std::size_t j = 0; j < scores.size(); ++j)
        if (scores[j] > target || (scores[j] == target && j < label)) ++rank;
    return rank < k;
}

EvalReport evaluate(const GenerativeStack& stack, const TrainConfig& config,
                    const Dataset& dataset) {
    return evaluate(stack, config, dataset, config.eval_mode, config.eval_seed);
}

EvalReport evaluate(const GenerativeStack& stack, const TrainConfig& config,
                    const Dataset& dataset, EvalMode mode, std::uint64_t seed) {
    config.validate();
    check_stack(config.model, stack);
    check_dataset(config.model, dataset);
    if (dataset.size() == 0) throw ArgumentError("cannot evaluate an empty dataset");

    const std::size_t classes = config.model.output_dim;
    const std::size_t k3 = std::min<std::size_t>(3, classes);
    EvalReport report;
    report.mode = mode;
    report.per_class_counts.assign(classes, 0);
    report.per_class_correct.assign(classes, 0);
    std::size_t hits1 = 0, hits3 = 0;

    const BatchPlan plan(dataset.size(), std::min(config.batch_size, dataset.size()), 0,
                         /*drop_last=*/false, /*shuffle=*/false);
    for (std::size_t b = 0; b < plan.num_batches(); ++b) {
        const Batch batch = gather_batch(dataset, plan, b);
        const std::size_t rows = batch.labels.size();
        const Matrix targets = one_hot(batch.labels, classes);
        const Matrix* clamp = mode == EvalMode::label_clamped ? &targets : nullptr;
        LatentBatch latents = init_latents(config.model, rows, derive_seed(seed, {b}));
        const InferenceResult inferred = run_inference(config.model, stack, batch.inputs,
                                                       std::move(latents), clamp, config.infer);
        const Matrix scores = matmul_abt(inferred.latents.top(), stack.readout);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t label = batch.labels[r];
            ++report.per_class_counts[label];
            if (top_k_hit(scores.row(r), label, 1)) {
                ++hits1;
                ++report.per_class_correct[label];
            }
            if (top_k_hit(scores.row(r), label, k3)) ++hits3;
        }
        report.samples += rows;
    }
    report.top1 = static_cast<double>(hits1) / static_cast<double>(report.samples);
    report.top3 = static_cast<double>(hits3) / static_cast<double>(report.samples);
    return report;
}

}  // namespace pcn
