#include "pcn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pcn/energy.hpp"
#include "pcn/errors.hpp"

namespace pcn {

void InferenceSettings::validate() const {
    if (t_infer < 1) throw ArgumentError("t_infer must be at least 1");
    if (!(eta_infer > 0.0) || !std::isfinite(eta_infer))
        throw ArgumentError("eta_infer must be positive");
    if (early_stop) {
        if (!(early_stop->threshold > 0.0))
            throw ArgumentError("early_stop.threshold must be positive");
        if (early_stop->patience < 1)
            throw ArgumentError("early_stop.patience must be at least 1");
    }
}

std::vector<Matrix> latent_gradients(const ErrorBundle& bundle,
                                     const GenerativeStack& stack) {
    const std::size_t L = bundle.num_layers();
    if (stack.weights.size() != L)
        throw DimensionError("latent_gradients: bundle has " + std::to_string(L) +
                             " layers, stack has " + std::to_string(stack.weights.size()));
    std::vector<Matrix> grads;
    grads.reserve(L);
    for (std::size_t l = 1; l <= L; ++l) {
        const Matrix& own_err = l < L ? bundle.errors[l] : bundle.top_err;
        Matrix feedback = matmul_ab(bundle.gain_mod[l - 1], stack.weights[l - 1]);
        grads.push_back(own_err - feedback);
    }
    return grads;
}

namespace {

// Name of the first error matrix holding NaN/Inf, or empty.
std::string first_nonfinite_error(const ErrorBundle& bundle) {
    for (std::size_t l = 0; l < bundle.errors.size(); ++l)
        if (!all_finite(bundle.errors[l])) return "E" + std::to_string(l);
    if (bundle.sup_err && !all_finite(*bundle.sup_err)) return "Esup";
    return {};
}

double checked_energy(const ErrorBundle& bundle, std::size_t step) {
    const double e = total_energy(bundle);
    if (std::isfinite(e)) return e;
    std::string where = first_nonfinite_error(bundle);
    throw DivergenceError("infer", step, where.empty() ? "energy" : where);
}

}  // namespace

InferenceStep inference_step(const ModelConfig& config, const GenerativeStack& stack,
                             const Matrix& input, const LatentBatch& latents,
                             const Matrix* labels, const InferenceSettings& settings,
                             std::size_t step, std::span<const std::size_t> layer_order) {
    const std::size_t L = config.num_latent_layers();
    std::vector<std::size_t> order(L);
    if (layer_order.empty()) {
        std::iota(order.begin(), order.end(), std::size_t{1});
    } else {
        if (layer_order.size() != L)
            throw ArgumentError("layer_order must list every latent layer once");
        order.assign(layer_order.begin(), layer_order.end());
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < L; ++i)
            if (sorted[i] != i + 1)
                throw ArgumentError("layer_order must be a permutation of 1..L");
    }

    InferenceStep out{latents, compute_errors(config, stack, input, latents, labels), 0.0};
    const std::vector<Matrix> grads = latent_gradients(out.bundle, stack);

    // All reads happened above; only writes from here on.
    for (std::size_t l : order) {
        Matrix& x = out.latents.layer(l);
        axpy(x, -settings.eta_infer, grads[l - 1]);
    }
    for (std::size_t l = 1; l <= L; ++l) {
        if (!all_finite(out.latents.layer(l)))
            throw DivergenceError("infer", step, "x" + std::to_string(l));
        out.max_update = std::max(out.max_update,
                                  std::abs(settings.eta_infer) * max_abs(grads[l - 1]));
    }
    return out;
}

InferenceResult run_inference(const ModelConfig& config, const GenerativeStack& stack,
                              const Matrix& input, LatentBatch latents,
                              const Matrix* labels, const InferenceSettings& settings) {
    settings.validate();
    InferenceResult result;
    result.energies.reserve(settings.t_infer + 1);
    std::size_t calm_steps = 0;
    for (std::size_t t = 1; t <= settings.t_infer; ++t) {
        InferenceStep s = inference_step(config, stack, input, latents, labels, settings, t);
        result.energies.push_back(checked_energy(s.bundle, t - 1));
        latents = std::move(s.latents);
        result.steps_taken = t;
        if (settings.early_stop) {
            calm_steps = s.max_update < settings.early_stop->threshold ? calm_steps + 1 : 0;
            if (calm_steps >= settings.early_stop->patience) break;
        }
    }
    result.energies.push_back(checked_energy(
        compute_errors(config, stack, input, latents, labels), result.steps_taken));
    result.latents = std::move(latents);
    return result;
}

}  // namespace pcn
