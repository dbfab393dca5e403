#include "pcn/verify.hpp"

#include <algorithm>
#include <cmath>

#include "pcn/errors.hpp"
#include "pcn/inference.hpp"
#include "pcn/learning.hpp"

namespace pcn::verify {

namespace {

void check_problem(const ModelConfig& config, const GenerativeStack& stack,
                   const Matrix& input, const LatentBatch& latents, const Matrix* labels) {
    config.validate();
    check_stack(config, stack);
    check_latents(config, latents);
    if (input.rows() != latents.batch_size() || input.cols() != config.input_dim())
        throw DimensionError("input is " + shape_of(input) + ", expected " +
                             std::to_string(latents.batch_size()) + "x" +
                             std::to_string(config.input_dim()));
    if (labels && (labels->rows() != latents.batch_size() ||
                   labels->cols() != config.output_dim))
        throw DimensionError("labels are " + shape_of(*labels) + ", expected " +
                             std::to_string(latents.batch_size()) + "x" +
                             std::to_string(config.output_dim));
}

}  // namespace

ErrorBundle naive_errors(const ModelConfig& config, const GenerativeStack& stack,
                         const Matrix& input, const LatentBatch& latents,
                         const Matrix* labels) {
    check_problem(config, stack, input, latents, labels);
    const std::size_t L = config.num_latent_layers();
    const std::size_t B = latents.batch_size();

    ErrorBundle out;
    for (std::size_t l = 0; l < L; ++l) {
        const Matrix& below = l == 0 ? input : latents.layer(l);
        const Matrix& above = latents.layer(l + 1);
        const Matrix& w = stack.weights[l];
        const std::size_t rows = config.dims[l];
        const std::size_t inner = config.dims[l + 1];
        Matrix a(B, rows), pred(B, rows), e(B, rows), h(B, rows);
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t i = 0; i < rows; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < inner; ++j) s += w(i, j) * above(b, j);
                a(b, i) = s;
                pred(b, i) = activate(config.activations[l], s);
                e(b, i) = below(b, i) - pred(b, i);
                h(b, i) = e(b, i) * activate_deriv(config.activations[l], s);
            }
        }
        out.preacts.push_back(std::move(a));
        out.preds.push_back(std::move(pred));
        out.errors.push_back(std::move(e));
        out.gain_mod.push_back(std::move(h));
    }

    const std::size_t top = config.top_dim();
    out.top_err = Matrix(B, top);
    if (labels) {
        const Matrix& x = latents.top();
        const Matrix& wo = stack.readout;
        Matrix yhat(B, config.output_dim), esup(B, config.output_dim);
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t c = 0; c < config.output_dim; ++c) {
                double s = 0.0;
                for (std::size_t j = 0; j < top; ++j) s += wo(c, j) * x(b, j);
                yhat(b, c) = s;
                esup(b, c) = s - (*labels)(b, c);
            }
        }
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t j = 0; j < top; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < config.output_dim; ++c) s += esup(b, c) * wo(c, j);
                out.top_err(b, j) = s;
            }
        out.sup_pred = std::move(yhat);
        out.sup_err = std::move(esup);
    }
    return out;
}

double naive_energy(const ModelConfig& config, const GenerativeStack& stack,
                    const Matrix& input, const LatentBatch& latents, const Matrix* labels) {
    const ErrorBundle bundle = naive_errors(config, stack, input, latents, labels);
    const std::size_t B = latents.batch_size();
    double sum = 0.0;
    for (const Matrix& e : bundle.errors)
        for (double v : e.values()) sum += v * v;
    if (bundle.sup_err)
        for (double v : bundle.sup_err->values()) sum += v * v;
    return 0.5 * sum / static_cast<double>(B);
}

Matrix fd_latent_grad(const ModelConfig& config, const GenerativeStack& stack,
                      const Matrix& input, const LatentBatch& latents, const Matrix* labels,
                      std::size_t layer, double h) {
    if (!(h > 0.0)) throw ArgumentError("finite-difference step h must be positive");
    if (layer < 1 || layer > config.num_latent_layers())
        throw ArgumentError("latent layer " + std::to_string(layer) + " out of range 1.." +
                            std::to_string(config.num_latent_layers()));
    LatentBatch probe = latents;
    Matrix& x = probe.layer(layer);
    Matrix grad(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double orig = x(r, c);
            x(r, c) = orig + h;
            const double up = naive_energy(config, stack, input, probe, labels);
            x(r, c) = orig - h;
            const double down = naive_energy(config, stack, input, probe, labels);
            x(r, c) = orig;
            grad(r, c) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

Matrix fd_weight_grad(const ModelConfig& config, const GenerativeStack& stack,
                      const Matrix& input, const LatentBatch& latents, const Matrix* labels,
                      WeightTarget target, double h) {
    if (!(h > 0.0)) throw ArgumentError("finite-difference step h must be positive");
    if (target.readout && !labels)
        throw ModeError("readout gradient requires labels");
    if (!target.readout && target.layer >= config.num_latent_layers())
        throw ArgumentError("weight layer " + std::to_string(target.layer) +
                            " out of range 0.." +
                            std::to_string(config.num_latent_layers() - 1));
    GenerativeStack probe = stack;
    Matrix& w = target.readout ? probe.readout : probe.weights[target.layer];
    Matrix grad(w.rows(), w.cols());
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) {
            const double orig = w(r, c);
            w(r, c) = orig + h;
            const double up = naive_energy(config, probe, input, latents, labels);
            w(r, c) = orig - h;
            const double down = naive_energy(config, probe, input, latents, labels);
            w(r, c) = orig;
            grad(r, c) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

double relative_error(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1.0});
    return std::abs(analytic - numeric) / scale;
}

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool near_relu_kink(const ModelConfig& config, const ErrorBundle& bundle, double margin) {
    for (std::size_t l = 0; l < bundle.preacts.size(); ++l) {
        if (config.activations[l] != Activation::relu) continue;
        for (double a : bundle.preacts[l].values())
            if (std::abs(a) < margin) return true;
    }
    return false;
}

}  // namespace

Problem random_problem(Rng& rng, const ProblemLimits& limits) {
    if (limits.max_latent_layers < 1 || limits.max_width < 1 || limits.max_batch < 1)
        throw ArgumentError("problem limits must all be at least 1");
    const std::size_t L = pick(rng, 1, limits.max_latent_layers);
    std::vector<std::size_t> dims(L + 1);
    for (auto& d : dims) d = pick(rng, 1, limits.max_width);
    std::vector<Activation> acts(L);
    for (auto& a : acts) a = static_cast<Activation>(pick(rng, 0, 2));

    Problem p;
    p.config.dims = std::move(dims);
    p.config.output_dim = pick(rng, 1, limits.max_width);
    p.config.activations = std::move(acts);
    p.config.latent_init_scale = 1.0;
    p.config.validate();

    const std::size_t B = pick(rng, 1, limits.max_batch);
    p.stack = init_weights(p.config, rng());
    p.input = Matrix(B, p.config.input_dim());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& v : p.input.values()) v = unit(rng);
    if (std::bernoulli_distribution(0.5)(rng)) {
        Matrix y(B, p.config.output_dim);
        for (std::size_t b = 0; b < B; ++b) y(b, pick(rng, 0, p.config.output_dim - 1)) = 1.0;
        p.labels = std::move(y);
    }

    for (;;) {
        p.latents = init_latents(p.config, B, rng());
        const ErrorBundle bundle =
            naive_errors(p.config, p.stack, p.input, p.latents, p.label_ptr());
        if (!near_relu_kink(p.config, bundle, limits.kink_margin)) break;
    }
    return p;
}

namespace {

struct Tracker {
    const OracleOptions& options;
    std::size_t trial = 0;
    std::optional<Disagreement> first;

    double compare(const Matrix& analytic, const Matrix& numeric, double analytic_scale,
                   const std::string& target) {
        double worst = 0.0;
        const double sign = options.flip_sign ? -1.0 : 1.0;
        for (std::size_t r = 0; r < analytic.rows(); ++r) {
            for (std::size_t c = 0; c < analytic.cols(); ++c) {
                const double a = sign * analytic(r, c);
                const double n = analytic_scale * numeric(r, c);
                const double err = relative_error(a, n);
                worst = std::max(worst, err);
                if (!first && !(err < options.tolerance))
                    first = Disagreement{trial, target, r, c, a, n, err};
            }
        }
        return worst;
    }
};

}  // namespace

OracleReport run_oracle_suite(const OracleOptions& options) {
    OracleReport report;
    report.trials = options.trials;
    Rng rng(options.seed);
    Tracker tracker{options, 0, std::nullopt};

    for (std::size_t t = 0; t < options.trials; ++t) {
        tracker.trial = t;
        const Problem p = random_problem(rng, options.limits);
        const Matrix* labels = p.label_ptr();
        const ErrorBundle bundle = compute_errors(p.config, p.stack, p.input, p.latents, labels);
        const double B = static_cast<double>(p.latents.batch_size());

        // Latent gradients are per sample; the numeric ones are of the
        // batch-averaged energy.
        const std::vector<Matrix> gx = latent_gradients(bundle, p.stack);
        for (std::size_t l = 1; l <= gx.size(); ++l) {
            const Matrix fd = fd_latent_grad(p.config, p.stack, p.input, p.latents, labels, l,
                                             options.h);
            report.max_latent_error =
                std::max(report.max_latent_error,
                         tracker.compare(gx[l - 1], fd, B, "x" + std::to_string(l)));
        }

        const std::vector<Matrix> gw = weight_gradients(bundle, p.latents);
        for (std::size_t l = 0; l < gw.size(); ++l) {
            const Matrix fd = fd_weight_grad(p.config, p.stack, p.input, p.latents, labels,
                                             WeightTarget::generative(l), options.h);
            report.max_weight_error =
                std::max(report.max_weight_error,
                         tracker.compare(gw[l], fd, 1.0, "W" + std::to_string(l)));
        }

        if (labels) {
            const Matrix go = readout_gradient(bundle, p.latents);
            const Matrix fd = fd_weight_grad(p.config, p.stack, p.input, p.latents, labels,
                                             WeightTarget::output(), options.h);
            report.max_readout_error =
                std::max(report.max_readout_error, tracker.compare(go, fd, 1.0, "Wout"));
        }
    }
    report.first_failure = tracker.first;
    return report;
}

}  // namespace pcn::verify
