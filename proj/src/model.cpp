#include "pcn/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pcn/errors.hpp"
#include "pcn/random.hpp"

namespace pcn {

double activate(Activation act, double a) {
    switch (act) {
        case Activation::relu: return a > 0.0 ? a : 0.0;
        case Activation::identity: return a;
        case Activation::tanh: return std::tanh(a);
    }
    return a;
}

double activate_deriv(Activation act, double a) {
    switch (act) {
        case Activation::relu: return a > 0.0 ? 1.0 : 0.0;
        case Activation::identity: return 1.0;
        case Activation::tanh: {
            const double t = std::tanh(a);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

std::string_view to_string(Activation act) {
    switch (act) {
        case Activation::relu: return "relu";
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity" || name == "linear") return Activation::identity;
    if (name == "tanh") return Activation::tanh;
    throw ArgumentError("unknown activation '" + std::string(name) +
                        "' (expected relu, identity or tanh)");
}

ModelConfig ModelConfig::uniform(std::vector<std::size_t> dims, std::size_t output_dim,
                                 Activation act, double latent_init_scale) {
    ModelConfig c;
    const std::size_t layers = dims.empty() ? 0 : dims.size() - 1;
    c.dims = std::move(dims);
    c.output_dim = output_dim;
    c.activations.assign(layers, act);
    c.latent_init_scale = latent_init_scale;
    return c;
}

std::size_t ModelConfig::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1];
    return n + output_dim * top_dim();
}

void ModelConfig::validate() const {
    if (dims.size() < 2)
        throw ArgumentError("model needs at least one latent layer (len(dims) >= 2)");
    for (std::size_t l = 0; l < dims.size(); ++l)
        if (dims[l] == 0)
            throw ArgumentError("dims[" + std::to_string(l) + "] must be positive");
    if (output_dim == 0) throw ArgumentError("output_dim must be positive");
    if (activations.size() != num_latent_layers())
        throw ArgumentError("expected " + std::to_string(num_latent_layers()) +
                            " activations, got " + std::to_string(activations.size()));
    if (!(latent_init_scale >= 0.0) || !std::isfinite(latent_init_scale))
        throw ArgumentError("latent_init_scale must be finite and nonnegative");
}

std::size_t GenerativeStack::parameter_count() const {
    std::size_t n = readout.size();
    for (const auto& w : weights) n += w.size();
    return n;
}

bool bit_equal(const GenerativeStack& a, const GenerativeStack& b) {
    if (a.weights.size() != b.weights.size()) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l)
        if (!bit_equal(a.weights[l], b.weights[l])) return false;
    return bit_equal(a.readout, b.readout);
}

bool bit_equal(const LatentBatch& a, const LatentBatch& b) {
    if (a.x.size() != b.x.size()) return false;
    for (std::size_t l = 0; l < a.x.size(); ++l)
        if (!bit_equal(a.x[l], b.x[l])) return false;
    return true;
}

void check_stack(const ModelConfig& config, const GenerativeStack& stack) {
    const std::size_t L = config.num_latent_layers();
    if (stack.weights.size() != L)
        throw DimensionError("stack has " + std::to_string(stack.weights.size()) +
                             " weight matrices, config needs " + std::to_string(L));
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& w = stack.weights[l];
        if (w.rows() != config.dims[l] || w.cols() != config.dims[l + 1])
            throw DimensionError("W" + std::to_string(l) + " is " + shape_of(w) +
                                 ", expected " + std::to_string(config.dims[l]) + "x" +
                                 std::to_string(config.dims[l + 1]));
    }
    if (stack.readout.rows() != config.output_dim || stack.readout.cols() != config.top_dim())
        throw DimensionError("readout is " + shape_of(stack.readout) + ", expected " +
                             std::to_string(config.output_dim) + "x" +
                             std::to_string(config.top_dim()));
}

void check_latents(const ModelConfig& config, const LatentBatch& latents) {
    const std::size_t L = config.num_latent_layers();
    if (latents.x.size() != L)
        throw DimensionError("latent batch has " + std::to_string(latents.x.size()) +
                             " layers, config needs " + std::to_string(L));
    const std::size_t B = latents.batch_size();
    if (B == 0) throw DimensionError("latent batch is empty");
    for (std::size_t l = 1; l <= L; ++l) {
        const Matrix& x = latents.layer(l);
        if (x.rows() != B || x.cols() != config.dims[l])
            throw DimensionError("X" + std::to_string(l) + " is " + shape_of(x) +
                                 ", expected " + std::to_string(B) + "x" +
                                 std::to_string(config.dims[l]));
    }
}

GenerativeStack init_weights(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    auto xavier = [&rng](std::size_t rows, std::size_t cols) {
        // fan_in = cols, fan_out = rows
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(rows, cols);
        for (double& v : w.values()) v = dist(rng);
        return w;
    };
    GenerativeStack stack;
    const std::size_t L = config.num_latent_layers();
    stack.weights.reserve(L);
    for (std::size_t l = 0; l < L; ++l)
        stack.weights.push_back(xavier(config.dims[l], config.dims[l + 1]));
    stack.readout = xavier(config.output_dim, config.top_dim());
    return stack;
}

LatentBatch init_latents(const ModelConfig& config, std::size_t batch_size,
                         std::uint64_t seed) {
    config.validate();
    if (batch_size == 0) throw ArgumentError("batch_size must be at least 1");
    LatentBatch latents;
    const std::size_t L = config.num_latent_layers();
    latents.x.reserve(L);
    if (config.latent_init_scale == 0.0) {
        for (std::size_t l = 1; l <= L; ++l) latents.x.emplace_back(batch_size, config.dims[l]);
        return latents;
    }
    Rng rng(seed);
    std::normal_distribution<double> dist(0.0, config.latent_init_scale);
    for (std::size_t l = 1; l <= L; ++l) {
        Matrix x(batch_size, config.dims[l]);
        for (double& v : x.values()) v = dist(rng);
        latents.x.push_back(std::move(x));
    }
    return latents;
}

LayerForward forward_layer(const Matrix& weights, const Matrix& x_above, Activation act) {
    if (x_above.cols() != weights.cols())
        throw DimensionError("forward_layer: x_above " + shape_of(x_above) +
                             " does not fit W " + shape_of(weights));
    LayerForward out;
    out.preact = matmul_abt(x_above, weights);
    out.pred = out.preact;
    for (double& v : out.pred.values()) v = activate(act, v);
    return out;
}

ErrorBundle compute_errors(const ModelConfig& config, const GenerativeStack& stack,
                           const Matrix& input, const LatentBatch& latents,
                           const Matrix* labels) {
    check_stack(config, stack);
    check_latents(config, latents);
    const std::size_t L = config.num_latent_layers();
    const std::size_t B = latents.batch_size();
    if (input.rows() != B || input.cols() != config.input_dim())
        throw DimensionError("input is " + shape_of(input) + ", expected " +
                             std::to_string(B) + "x" + std::to_string(config.input_dim()));
    if (labels && (labels->rows() != B || labels->cols() != config.output_dim))
        throw DimensionError("labels are " + shape_of(*labels) + ", expected " +
                             std::to_string(B) + "x" + std::to_string(config.output_dim));

    ErrorBundle bundle;
    bundle.preacts.reserve(L);
    bundle.preds.reserve(L);
    bundle.errors.reserve(L);
    bundle.gain_mod.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        const Activation act = config.activations[l];
        LayerForward fwd = forward_layer(stack.weights[l], latents.layer(l + 1), act);
        const Matrix& target = l == 0 ? input : latents.layer(l);
        Matrix err = target - fwd.pred;
        Matrix gm = err;
        auto gv = gm.values();
        auto av = fwd.preact.values();
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= activate_deriv(act, av[i]);
        bundle.preacts.push_back(std::move(fwd.preact));
        bundle.preds.push_back(std::move(fwd.pred));
        bundle.errors.push_back(std::move(err));
        bundle.gain_mod.push_back(std::move(gm));
    }

    if (labels) {
        Matrix y_hat = matmul_abt(latents.top(), stack.readout);
        Matrix sup_err = y_hat - *labels;
        bundle.top_err = matmul_ab(sup_err, stack.readout);
        bundle.sup_pred = std::move(y_hat);
        bundle.sup_err = std::move(sup_err);
    } else {
        bundle.top_err = Matrix(B, config.top_dim());
    }
    return bundle;
}

}  // namespace pcn
