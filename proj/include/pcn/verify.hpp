#pragma once

// Independent reference implementations used to certify the fast paths:
// scalar-loop errors and energy straight from the definitions, and central
// finite differences of that energy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "pcn/model.hpp"
#include "pcn/random.hpp"

namespace pcn::verify {

// Scalar triple-loop errors; no matrix kernels involved.
ErrorBundle naive_errors(const ModelConfig& config, const GenerativeStack& stack,
                         const Matrix& input, const LatentBatch& latents,
                         const Matrix* labels = nullptr);

// Batch-averaged energy computed by scalar loops.
double naive_energy(const ModelConfig& config, const GenerativeStack& stack,
                    const Matrix& input, const LatentBatch& latents,
                    const Matrix* labels = nullptr);

// d(energy)/d(latent layer `layer`, 1-based) by central differences. The
// energy is batch-averaged, so this equals the per-sample latent gradient
// divided by B.
Matrix fd_latent_grad(const ModelConfig& config, const GenerativeStack& stack,
                      const Matrix& input, const LatentBatch& latents,
                      const Matrix* labels, std::size_t layer, double h = 1e-6);

struct WeightTarget {
    bool readout = false;
    std::size_t layer = 0;

    static WeightTarget generative(std::size_t l) { return {false, l}; }
    static WeightTarget output() { return {true, 0}; }
};

Matrix fd_weight_grad(const ModelConfig& config, const GenerativeStack& stack,
                      const Matrix& input, const LatentBatch& latents,
                      const Matrix* labels, WeightTarget target, double h = 1e-6);

// |a - n| / max(|a|, |n|, 1): relative for unit-scale and larger values,
// absolute below that.
double relative_error(double analytic, double numeric);

struct ProblemLimits {
    std::size_t max_latent_layers = 3;
    std::size_t max_width = 8;
    std::size_t max_batch = 4;
    // Resample until no relu preactivation lies within this distance of 0.
    double kink_margin = 1e-4;
};

// A random network plus one snapshot to evaluate it at.
struct Problem {
    ModelConfig config;
    GenerativeStack stack;
    Matrix input;
    LatentBatch latents;
    std::optional<Matrix> labels;

    const Matrix* label_ptr() const { return labels ? &*labels : nullptr; }
};

// Random shape, per-layer activations, supervised or not, Xavier weights,
// N(0,1) latents, inputs in [0,1], one-hot labels.
Problem random_problem(Rng& rng, const ProblemLimits& limits = {});

struct OracleOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    double h = 1e-6;
    double tolerance = 1e-5;
    ProblemLimits limits;
    // Sensitivity check: negate the analytic gradients before comparing.
    bool flip_sign = false;
};

struct Disagreement {
    std::size_t trial = 0;
    std::string target;  // "x<l>", "W<l>" or "Wout"
    std::size_t row = 0;
    std::size_t col = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double error = 0.0;
};

struct OracleReport {
    std::size_t trials = 0;
    double max_latent_error = 0.0;
    double max_weight_error = 0.0;
    double max_readout_error = 0.0;
    std::optional<Disagreement> first_failure;

    bool passed() const noexcept { return !first_failure.has_value(); }
};

// Compares latent_gradients / weight_gradients / readout_gradient with
// finite differences on `trials` random problems.
OracleReport run_oracle_suite(const OracleOptions& options);

}  // namespace pcn::verify
