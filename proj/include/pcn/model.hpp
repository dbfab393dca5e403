#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pcn/matrix.hpp"

namespace pcn {

enum class Activation : std::uint32_t { relu = 0, identity = 1, tanh = 2 };

double activate(Activation act, double a);
// relu'(0) is taken as 0.
double activate_deriv(Activation act, double a);

std::string_view to_string(Activation act);
// Throws ArgumentError on unknown names.
Activation parse_activation(std::string_view name);

// Shape of the network: dims = [d_0, d_1, ..., d_L], one activation per
// generative layer l = 0..L-1.
struct ModelConfig {
    std::vector<std::size_t> dims;
    std::size_t output_dim = 1;
    std::vector<Activation> activations;
    double latent_init_scale = 1.0;

    static ModelConfig uniform(std::vector<std::size_t> dims, std::size_t output_dim,
                               Activation act = Activation::relu,
                               double latent_init_scale = 1.0);

    std::size_t num_latent_layers() const noexcept {
        return dims.empty() ? 0 : dims.size() - 1;
    }
    std::size_t input_dim() const { return dims.front(); }
    std::size_t top_dim() const { return dims.back(); }

    // Generative weights plus readout.
    std::size_t parameter_count() const;

    void validate() const;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All learnable state: weights[l] is d_l × d_{l+1}, readout is d_out × d_L.
struct GenerativeStack {
    std::vector<Matrix> weights;
    Matrix readout;

    std::size_t parameter_count() const;
};

bool bit_equal(const GenerativeStack& a, const GenerativeStack& b);

// Throws DimensionError if the stack does not match the config.
void check_stack(const ModelConfig& config, const GenerativeStack& stack);

// Latent state for a batch: x[l-1] holds X^(l), B × d_l, for l = 1..L.
struct LatentBatch {
    std::vector<Matrix> x;

    std::size_t batch_size() const { return x.empty() ? 0 : x.front().rows(); }
    std::size_t num_layers() const noexcept { return x.size(); }
    // 1-based, matching the layer numbering of the model.
    const Matrix& layer(std::size_t l) const { return x.at(l - 1); }
    Matrix& layer(std::size_t l) { return x.at(l - 1); }
    const Matrix& top() const { return x.back(); }
};

bool bit_equal(const LatentBatch& a, const LatentBatch& b);

void check_latents(const ModelConfig& config, const LatentBatch& latents);

// One snapshot of every error quantity for (input, latents, stack).
// Vectors are indexed by generative layer l = 0..L-1.
struct ErrorBundle {
    std::vector<Matrix> preacts;   // A^(l)
    std::vector<Matrix> preds;     // X̂^(l)
    std::vector<Matrix> errors;    // E^(l) = X^(l) - X̂^(l)
    std::vector<Matrix> gain_mod;  // H^(l) = E^(l) ⊙ f'(A^(l))
    std::optional<Matrix> sup_pred;  // Ŷ
    std::optional<Matrix> sup_err;   // E^sup = Ŷ - Y
    Matrix top_err;                  // E^(L): zero, or E^sup · W^out

    bool supervised() const noexcept { return sup_err.has_value(); }
    std::size_t batch_size() const { return top_err.rows(); }
    std::size_t num_layers() const noexcept { return errors.size(); }
};

// Xavier-uniform init of every weight matrix and the readout, in order
// W^(0), ..., W^(L-1), W^out from one seeded stream.
GenerativeStack init_weights(const ModelConfig& config, std::uint64_t seed);

// i.i.d. Normal(0, latent_init_scale²) latents.
LatentBatch init_latents(const ModelConfig& config, std::size_t batch_size,
                         std::uint64_t seed);

struct LayerForward {
    Matrix preact;
    Matrix pred;
};

// preact = x_above · Wᵀ, pred = f(preact).
LayerForward forward_layer(const Matrix& weights, const Matrix& x_above, Activation act);

// Snapshot of all errors. `labels` (B × d_out) switches on the supervised
// terms; nullptr gives the unsupervised bundle with a zero top error.
ErrorBundle compute_errors(const ModelConfig& config, const GenerativeStack& stack,
                           const Matrix& input, const LatentBatch& latents,
                           const Matrix* labels = nullptr);

}  // namespace pcn
