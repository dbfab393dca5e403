#include "pcn/learning.hpp"

#include <cmath>
#include <string>

#include "pcn/energy.hpp"
#include "pcn/errors.hpp"

namespace pcn {

void LearnSettings::validate() const {
    if (t_learn && *t_learn < 1) throw ArgumentError("t_learn must be at least 1");
    if (!(eta_learn > 0.0) || !std::isfinite(eta_learn))
        throw ArgumentError("eta_learn must be positive");
}

std::vector<Matrix> weight_gradients(const ErrorBundle& bundle, const LatentBatch& latents) {
    const std::size_t L = bundle.num_layers();
    if (latents.num_layers() != L)
        throw DimensionError("weight_gradients: bundle has " + std::to_string(L) +
                             " layers, latents have " + std::to_string(latents.num_layers()));
    const double scale = -1.0 / static_cast<double>(latents.batch_size());
    std::vector<Matrix> grads;
    grads.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        Matrix g = matmul_atb(bundle.gain_mod[l], latents.layer(l + 1));
        for (double& v : g.values()) v *= scale;
        grads.push_back(std::move(g));
    }
    return grads;
}

Matrix readout_gradient(const ErrorBundle& bundle, const LatentBatch& latents) {
    if (!bundle.supervised())
        throw ModeError("readout_gradient needs a supervised bundle (no labels were given)");
    Matrix g = matmul_atb(*bundle.sup_err, latents.top());
    const double scale = 1.0 / static_cast<double>(latents.batch_size());
    for (double& v : g.values()) v *= scale;
    return g;
}

GenerativeStack apply_updates(GenerativeStack stack, const std::vector<Matrix>& grads,
                              const Matrix* readout_grad, double eta_learn) {
    if (grads.size() != stack.weights.size())
        throw DimensionError("apply_updates: " + std::to_string(grads.size()) +
                             " gradients for " + std::to_string(stack.weights.size()) +
                             " weight matrices");
    for (std::size_t l = 0; l < grads.size(); ++l) axpy(stack.weights[l], -eta_learn, grads[l]);
    if (readout_grad) axpy(stack.readout, -eta_learn, *readout_grad);
    return stack;
}

namespace {

void check_finite_stack(const GenerativeStack& stack, std::size_t step) {
    for (std::size_t l = 0; l < stack.weights.size(); ++l)
        if (!all_finite(stack.weights[l]))
            throw DivergenceError("learn", step, "W" + std::to_string(l));
    if (!all_finite(stack.readout)) throw DivergenceError("learn", step, "Wout");
}

double checked_energy(const ErrorBundle& bundle, std::size_t step) {
    const double e = total_energy(bundle);
    if (!std::isfinite(e)) throw DivergenceError("learn", step, "energy");
    return e;
}

}  // namespace

LearningResult run_learning(const ModelConfig& config, GenerativeStack stack,
                            const Matrix& input, const LatentBatch& latents,
                            const Matrix* labels, const LearnSettings& settings) {
    settings.validate();
    const std::size_t steps = settings.steps_for(latents.batch_size());
    LearningResult result;
    result.energies.reserve(steps);

    ErrorBundle bundle = compute_errors(config, stack, input, latents, labels);
    result.initial_energy = checked_energy(bundle, 0);
    for (std::size_t t = 1; t <= steps; ++t) {
        const std::vector<Matrix> grads = weight_gradients(bundle, latents);
        if (labels) {
            const Matrix g_out = readout_gradient(bundle, latents);
            stack = apply_updates(std::move(stack), grads, &g_out, settings.eta_learn);
        } else {
            stack = apply_updates(std::move(stack), grads, nullptr, settings.eta_learn);
        }
        check_finite_stack(stack, t);
        bundle = compute_errors(config, stack, input, latents, labels);
        result.energies.push_back(checked_energy(bundle, t));
    }
    result.stack = std::move(stack);
    return result;
}

}  // namespace pcn
