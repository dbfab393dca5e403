#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pcn/model.hpp"

namespace pcn {

struct LearnSettings {
    std::optional<std::size_t> t_learn;  // unset: one step per sample in the batch
    double eta_learn = 0.005;

    std::size_t steps_for(std::size_t batch_size) const {
        return t_learn.value_or(batch_size);
    }
    void validate() const;
};

// G_W^(l) = -(1/B) H^(l)ᵀ X^(l+1), l = 0..L-1.
std::vector<Matrix> weight_gradients(const ErrorBundle& bundle, const LatentBatch& latents);

// G_out = (1/B) E^supᵀ X^(L). Throws ModeError on an unsupervised bundle.
Matrix readout_gradient(const ErrorBundle& bundle, const LatentBatch& latents);

// Plain gradient step on every weight matrix (and the readout when given).
GenerativeStack apply_updates(GenerativeStack stack, const std::vector<Matrix>& grads,
                              const Matrix* readout_grad, double eta_learn);

struct LearningResult {
    GenerativeStack stack;
    double initial_energy = 0.0;   // under the incoming weights
    std::vector<double> energies;  // after each weight update
};

// t_learn weight updates with latents frozen; errors are recomputed under
// the current weights before every step. The readout is trained only when
// labels are given.
LearningResult run_learning(const ModelConfig& config, GenerativeStack stack,
                            const Matrix& input, const LatentBatch& latents,
                            const Matrix* labels, const LearnSettings& settings);

}  // namespace pcn
