#include <cmath>

#include "support.hpp"
#include "pcn/energy.hpp"
#include "pcn/errors.hpp"
#include "pcn/verify.hpp"

using pcn::Activation;
using pcn::Matrix;
using pcn::ModelConfig;
namespace v = pcn::verify;

namespace {

double max_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(pcn::same_shape(a, b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace

TEST_CASE("naive errors agree with the fast path") {
    pcn::Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const v::Problem p = v::random_problem(rng);
        const auto fast = pcn::compute_errors(p.config, p.stack, p.input, p.latents, p.label_ptr());
        const auto slow = v::naive_errors(p.config, p.stack, p.input, p.latents, p.label_ptr());
        for (std::size_t l = 0; l < fast.num_layers(); ++l) {
            CHECK(max_diff(fast.preacts[l], slow.preacts[l]) <= 1e-12);
            CHECK(max_diff(fast.errors[l], slow.errors[l]) <= 1e-12);
            CHECK(max_diff(fast.gain_mod[l], slow.gain_mod[l]) <= 1e-12);
        }
        CHECK(max_diff(fast.top_err, slow.top_err) <= 1e-12);
        CHECK(fast.supervised() == slow.supervised());
        if (fast.supervised()) CHECK(max_diff(*fast.sup_err, *slow.sup_err) <= 1e-12);
        CHECK(pcn::total_energy(fast) ==
              doctest::Approx(v::naive_energy(p.config, p.stack, p.input, p.latents, p.label_ptr()))
                  .epsilon(1e-12));
    }
}

TEST_CASE("naive errors: exact fit and identity gain") {
    const auto cfg = ModelConfig::uniform({2, 1}, 1, Activation::identity);
    const pcn::GenerativeStack stack{{Matrix{{1}, {2}}}, Matrix{{0}}};
    const pcn::LatentBatch x{{Matrix{{3}}}};
    const auto fit = v::naive_errors(cfg, stack, Matrix{{3, 6}}, x);
    CHECK(fit.errors[0] == Matrix{{0, 0}});
    const auto off = v::naive_errors(cfg, stack, Matrix{{4, 5}}, x);
    CHECK(pcn::bit_equal(off.errors[0], off.gain_mod[0]));
    CHECK(off.errors[0] == Matrix{{1, -1}});
    CHECK(v::naive_energy(cfg, stack, Matrix{{4, 5}}, x) == 1.0);
}

TEST_CASE("finite differences: hand-evaluated cases") {
    const auto cfg = ModelConfig::uniform({2, 1}, 1, Activation::identity);
    const pcn::GenerativeStack stack{{Matrix{{1}, {2}}}, Matrix{{0}}};
    const pcn::LatentBatch x{{Matrix{{3}}}};
    SUBCASE("exact fit is near zero") {
        CHECK(std::abs(v::fd_latent_grad(cfg, stack, Matrix{{3, 6}}, x, nullptr, 1)(0, 0)) < 1e-6);
        const Matrix gw = v::fd_weight_grad(cfg, stack, Matrix{{3, 6}}, x, nullptr,
                                            v::WeightTarget::generative(0));
        CHECK(pcn::max_abs(gw) < 1e-6);
    }
    SUBCASE("identity example") {
        CHECK(v::fd_latent_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr, 1)(0, 0) ==
              doctest::Approx(1.0).epsilon(1e-6));
        testing::check_close(v::fd_weight_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr,
                                               v::WeightTarget::generative(0)),
                             Matrix{{-3}, {3}}, 1e-6);
    }
    SUBCASE("argument errors") {
        CHECK_THROWS_AS(v::fd_latent_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr, 1, 0.0),
                        pcn::ArgumentError);
        CHECK_THROWS_AS(v::fd_latent_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr, 2),
                        pcn::ArgumentError);
        CHECK_THROWS_AS(v::fd_weight_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr,
                                          v::WeightTarget::generative(1)),
                        pcn::ArgumentError);
        CHECK_THROWS_AS(v::fd_weight_grad(cfg, stack, Matrix{{4, 5}}, x, nullptr,
                                          v::WeightTarget::output()),
                        pcn::ModeError);
    }
}

TEST_CASE("relative error") {
    CHECK(v::relative_error(1.0, 1.0) == 0.0);
    CHECK(v::relative_error(100.0, 101.0) == doctest::Approx(1.0 / 101.0));
    CHECK(v::relative_error(1e-9, 2e-9) == doctest::Approx(1e-9));
    CHECK(v::relative_error(-2.0, 2.0) == 2.0);
}

TEST_CASE("random problems respect their limits and avoid relu kinks") {
    pcn::Rng rng(99);
    v::ProblemLimits limits;
    limits.max_latent_layers = 2;
    limits.max_width = 5;
    limits.max_batch = 3;
    bool saw_supervised = false, saw_unsupervised = false;
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = v::random_problem(rng, limits);
        CHECK(p.config.num_latent_layers() <= 2);
        for (std::size_t d : p.config.dims) CHECK(d <= 5);
        CHECK(p.latents.batch_size() <= 3);
        (p.labels ? saw_supervised : saw_unsupervised) = true;
        const auto b = pcn::compute_errors(p.config, p.stack, p.input, p.latents, p.label_ptr());
        for (std::size_t l = 0; l < b.num_layers(); ++l)
            if (p.config.activations[l] == Activation::relu)
                for (double a : b.preacts[l].values()) CHECK(std::abs(a) >= limits.kink_margin);
    }
    CHECK(saw_supervised);
    CHECK(saw_unsupervised);
}

TEST_CASE("oracle suite") {
    v::OracleOptions o;
    o.trials = 30;
    o.seed = 5;
    SUBCASE("passes on the shipped gradients") {
        const auto r = v::run_oracle_suite(o);
        CHECK(r.passed());
        CHECK(r.trials == 30);
        CHECK(r.max_latent_error < 1e-5);
        CHECK(r.max_weight_error < 1e-5);
        CHECK(r.max_readout_error < 1e-5);
    }
    SUBCASE("detects a sign flip") {
        o.flip_sign = true;
        const auto r = v::run_oracle_suite(o);
        REQUIRE_FALSE(r.passed());
        CHECK(r.first_failure->error >= o.tolerance);
        CHECK(r.first_failure->analytic * r.first_failure->numeric < 0.0);
    }
    SUBCASE("zero trials pass vacuously") {
        o.trials = 0;
        CHECK(v::run_oracle_suite(o).passed());
    }
    SUBCASE("same seed, same report") {
        const auto a = v::run_oracle_suite(o);
        const auto b = v::run_oracle_suite(o);
        CHECK(a.max_latent_error == b.max_latent_error);
        CHECK(a.max_weight_error == b.max_weight_error);
    }
}
