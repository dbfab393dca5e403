#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcn/model.hpp"

namespace pcn {

struct EarlyStop {
    double threshold = 1e-6;  // on max |Δx| over every latent entry
    std::size_t patience = 1;
};

struct InferenceSettings {
    std::size_t t_infer = 50;
    double eta_infer = 0.05;
    std::optional<EarlyStop> early_stop;

    void validate() const;
};

// G_X^(l) = E^(l) - H^(l-1) · W^(l-1) for l = 1..L (returned 0-based).
// E^(L) is the bundle's top error.
std::vector<Matrix> latent_gradients(const ErrorBundle& bundle,
                                     const GenerativeStack& stack);

struct InferenceStep {
    LatentBatch latents;  // post-update
    ErrorBundle bundle;   // pre-update snapshot
    double max_update = 0.0;
};

// One synchronous step: every gradient is taken from the pre-update
// snapshot before any latent is written. `layer_order` (1-based layer ids,
// a permutation of 1..L) only changes the order of the writes; empty means
// ascending. `step` is used in divergence diagnostics.
InferenceStep inference_step(const ModelConfig& config, const GenerativeStack& stack,
                             const Matrix& input, const LatentBatch& latents,
                             const Matrix* labels, const InferenceSettings& settings,
                             std::size_t step = 1,
                             std::span<const std::size_t> layer_order = {});

struct InferenceResult {
    LatentBatch latents;
    // energies[0] is the energy of the initial latents, energies[t] the
    // energy after update t; size() == steps_taken + 1.
    std::vector<double> energies;
    std::size_t steps_taken = 0;
};

InferenceResult run_inference(const ModelConfig& config, const GenerativeStack& stack,
                              const Matrix& input, LatentBatch latents,
                              const Matrix* labels, const InferenceSettings& settings);

}  // namespace pcn
