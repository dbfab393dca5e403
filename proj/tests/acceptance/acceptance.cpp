// Acceptance checks, one line per criterion:
//   PASS|FAIL|SKIP <n> <name>: <details>
// `--only N` runs a single criterion. Exit status is 0 when every selected
// criterion passed, 77 when the only selected criterion was skipped, 1 otherwise.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pcn/checkpoint.hpp"
#include "pcn/data.hpp"
#include "pcn/errors.hpp"
#include "pcn/inference.hpp"
#include "pcn/trainer.hpp"
#include "pcn/verify.hpp"

namespace fs = std::filesystem;
using pcn::Activation;
using pcn::Matrix;

namespace {

enum class Outcome { pass, fail, skip };

struct Result {
    Outcome outcome = Outcome::fail;
    std::string details;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Result verdict(bool ok, std::string details) {
    return {ok ? Outcome::pass : Outcome::fail, std::move(details)};
}

std::size_t pick(pcn::Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

pcn::ModelConfig random_model(pcn::Rng& rng, std::size_t min_layers, std::size_t max_layers,
                              std::size_t max_width) {
    pcn::ModelConfig c;
    const std::size_t L = pick(rng, min_layers, max_layers);
    c.dims.resize(L + 1);
    for (auto& d : c.dims) d = pick(rng, 1, max_width);
    c.output_dim = pick(rng, 1, max_width);
    for (std::size_t l = 0; l < L; ++l) c.activations.push_back(static_cast<Activation>(pick(rng, 0, 2)));
    return c;
}

Result gradient_oracle() {
    const auto t0 = Clock::now();
    pcn::verify::OracleOptions o;
    o.trials = 100;
    o.seed = 2024;
    o.h = 1e-6;
    o.tolerance = 1e-5;
    o.limits.max_latent_layers = 3;
    o.limits.max_width = 8;
    o.limits.max_batch = 4;
    o.limits.kink_margin = 1e-4;
    const auto r = pcn::verify::run_oracle_suite(o);
    const double secs = seconds_since(t0);
    std::string d = "trials=" + std::to_string(r.trials) + " max_rel_err latent=" +
                    fmt("%.2e", r.max_latent_error) + " weight=" + fmt("%.2e", r.max_weight_error) +
                    " readout=" + fmt("%.2e", r.max_readout_error) + " time=" + fmt("%.2fs", secs);
    if (!r.passed())
        d += " first_failure=" + r.first_failure->target + "(" +
             std::to_string(r.first_failure->row) + "," + std::to_string(r.first_failure->col) + ")";
    return verdict(r.passed() && secs < 30.0, d);
}

Result energy_descent() {
    const auto t0 = Clock::now();
    pcn::Rng rng(77);
    std::size_t violations = 0, checked = 0;
    double worst_rise = 0.0;
    for (int net = 0; net < 20; ++net) {
        pcn::TrainConfig c;
        c.model = random_model(rng, 1, 3, 8);
        c.model.latent_init_scale = 1.0;
        c.infer.t_infer = 50;
        c.infer.eta_infer = 1e-3;
        c.learn.eta_learn = 1e-4;
        c.batch_size = pick(rng, 2, 8);
        c.epochs = 1;
        c.seed = rng();
        const std::size_t classes = std::min<std::size_t>(c.model.output_dim, 3);
        const auto data = pcn::synth_blobs(classes, c.batch_size, c.model.input_dim(), 2.0, rng());
        const auto r = pcn::train(c, data);
        const auto& rec = r.trace.records();
        for (std::size_t i = 1; i < rec.size(); ++i) {
            if (rec[i].epoch != rec[i - 1].epoch || rec[i].batch_index != rec[i - 1].batch_index)
                continue;
            ++checked;
            const double rise = rec[i].energy - rec[i - 1].energy;
            worst_rise = std::max(worst_rise, rise);
            if (rise > 1e-12) ++violations;
        }
    }
    const double secs = seconds_since(t0);
    return verdict(violations == 0 && secs < 10.0,
                   "nets=20 steps_checked=" + std::to_string(checked) +
                       " violations=" + std::to_string(violations) +
                       " worst_rise=" + fmt("%.2e", worst_rise) + " time=" + fmt("%.2fs", secs));
}

Result synchronous_updates() {
    pcn::Rng rng(303);
    std::size_t mismatches = 0, orders = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto cfg = random_model(rng, 2, 3, 8);
        const auto stack = pcn::init_weights(cfg, rng());
        const std::size_t B = pick(rng, 1, 4);
        Matrix input(B, cfg.input_dim());
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& v : input.values()) v = unit(rng);
        const auto latents = pcn::init_latents(cfg, B, rng());
        Matrix labels(B, cfg.output_dim);
        for (std::size_t b = 0; b < B; ++b) labels(b, pick(rng, 0, cfg.output_dim - 1)) = 1.0;
        const Matrix* y = trial % 2 ? &labels : nullptr;
        pcn::InferenceSettings s;
        s.eta_infer = 0.05;
        const auto ref = pcn::inference_step(cfg, stack, input, latents, y, s);
        std::vector<std::size_t> order(cfg.num_latent_layers());
        std::iota(order.begin(), order.end(), std::size_t{1});
        while (std::next_permutation(order.begin(), order.end())) {
            ++orders;
            const auto got = pcn::inference_step(cfg, stack, input, latents, y, s, 1, order);
            if (!pcn::bit_equal(got.latents, ref.latents)) ++mismatches;
        }
    }
    return verdict(mismatches == 0, "cases=50 permuted_orders=" + std::to_string(orders) +
                                        " mismatches=" + std::to_string(mismatches));
}

Result parameter_count() {
    const auto c = pcn::ModelConfig::uniform({3072, 1000, 500, 10}, 10);
    const std::size_t declared = c.parameter_count();
    const std::size_t materialised = pcn::init_weights(c, 0).parameter_count();
    return verdict(declared == 3577100 && materialised == 3577100,
                   "config=" + std::to_string(declared) + " allocated=" + std::to_string(materialised));
}

Result batch_bookkeeping() {
    const std::size_t train = pcn::BatchPlan(50000, 500, 0).num_batches();
    const std::size_t test = pcn::BatchPlan(10000, 500, 0).num_batches();
    return verdict(train == 100 && test == 20,
                   "train_batches=" + std::to_string(train) + " test_batches=" + std::to_string(test));
}

Result learnability() {
    const auto t0 = Clock::now();
    // One draw split in two so train and test share the same rescaling.
    const auto all = pcn::synth_blobs(3, 150, 16, 4.0, 6);
    const auto train = all.slice(0, 300);
    const auto test = all.slice(300, 450);
    pcn::TrainConfig c;
    c.model = pcn::ModelConfig::uniform({16, 12, 3}, 3, Activation::tanh, 0.01);
    c.infer.t_infer = 50;
    c.infer.eta_infer = 0.05;
    c.learn.eta_learn = 0.005;
    c.batch_size = 30;
    c.epochs = 30;
    c.seed = 1;
    c.eval_mode = pcn::EvalMode::unsupervised_inference;
    const auto r = pcn::train(c, train);
    const auto report = pcn::evaluate(r.stack, c, test);
    const double secs = seconds_since(t0);
    return verdict(report.top1 >= 0.90 && secs < 60.0,
                   "test_top1=" + fmt("%.4f", report.top1) + " test_top3=" + fmt("%.4f", report.top3) +
                       " samples=" + std::to_string(report.samples) + " epochs=30 time=" +
                       fmt("%.2fs", secs));
}

std::optional<fs::path> cifar_dir() {
    std::vector<fs::path> candidates;
    if (const char* env = std::getenv("PCN_CIFAR10_DIR")) candidates.emplace_back(env);
    candidates.emplace_back("data/cifar-10-batches-bin");
    candidates.emplace_back(fs::path(std::getenv("HOME") ? std::getenv("HOME") : "/") /
                            "data/cifar-10-batches-bin");
    for (const auto& d : candidates)
        if (!pcn::cifar10_train_files(d).empty() && !pcn::cifar10_test_files(d).empty()) return d;
    return std::nullopt;
}

Result cifar_protocols() {
    const auto dir = cifar_dir();
    if (!dir)
        return {Outcome::skip,
                "CIFAR-10 binaries not found (set PCN_CIFAR10_DIR to a cifar-10-batches-bin directory)"};
    const auto t0 = Clock::now();
    const auto train_files = pcn::cifar10_train_files(*dir);
    const auto test_files = pcn::cifar10_test_files(*dir);
    const auto train = pcn::load_cifar10(std::span(train_files.data(), 1)).slice(0, 2000);
    const auto test = pcn::load_cifar10(test_files).slice(0, 2000);
    pcn::TrainConfig c;
    c.model = pcn::ModelConfig::uniform({3072, 256, 64, 10}, 10, Activation::relu, 1.0);
    c.infer.t_infer = 50;
    c.infer.eta_infer = 0.05;
    c.learn.eta_learn = 0.005;
    c.batch_size = 100;
    c.epochs = 1;
    c.seed = 0;
    const auto r = pcn::train(c, train);
    const auto unsup = pcn::evaluate(r.stack, c, test, pcn::EvalMode::unsupervised_inference, 0);
    const auto clamped = pcn::evaluate(r.stack, c, test, pcn::EvalMode::label_clamped, 0);
    return verdict(clamped.top1 > unsup.top1,
                   "label_clamped_top1=" + fmt("%.4f", clamped.top1) +
                       " unsupervised_top1=" + fmt("%.4f", unsup.top1) +
                       " samples=" + std::to_string(unsup.samples) + " time=" + fmt("%.1fs", seconds_since(t0)));
}

Result persistence() {
    const auto data = pcn::synth_blobs(3, 20, 16, 4.0, 3);
    pcn::TrainConfig c;
    c.model = pcn::ModelConfig::uniform({16, 12, 8, 3}, 3, Activation::relu, 0.5);
    c.model.activations[1] = Activation::tanh;
    c.infer.t_infer = 20;
    c.batch_size = 20;
    c.epochs = 2;
    const auto trained = pcn::train(c, data).stack;

    const fs::path path = fs::temp_directory_path() / ("pcn-acceptance-" + std::to_string(::getpid()) + ".pcn");
    pcn::save_checkpoint(trained, c.model, path);
    const auto back = pcn::load_checkpoint(path);
    fs::remove(path);

    const bool stack_equal = pcn::bit_equal(back.stack, trained);
    const bool config_equal = back.config == c.model;
    bool eval_equal = true;
    for (auto mode : {pcn::EvalMode::unsupervised_inference, pcn::EvalMode::label_clamped})
        eval_equal = eval_equal && pcn::evaluate(trained, c, data, mode, 5) ==
                                       pcn::evaluate(back.stack, c, data, mode, 5);
    return verdict(stack_equal && config_equal && eval_equal,
                   std::string("stack_bit_equal=") + (stack_equal ? "yes" : "no") +
                       " config_equal=" + (config_equal ? "yes" : "no") +
                       " evaluate_identical=" + (eval_equal ? "yes" : "no"));
}

Result ingestion() {
    const fs::path dir = fs::temp_directory_path() / ("pcn-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto data = pcn::synth_blobs(10, 12, pcn::kCifarImageBytes, 3.0, 8);
    pcn::write_cifar10(data, dir / "data_batch_1.bin");
    const std::vector<fs::path> files{dir / "data_batch_1.bin"};
    const auto back = pcn::load_cifar10(files);
    double worst = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i)
        worst = std::max(worst, std::abs(back.inputs.values()[i] - data.inputs.values()[i]));
    const bool labels_exact = back.labels == data.labels;
    const bool pixels_close = worst <= 1.0 / 255.0;

    std::string truncated = "none", corrupt = "none";
    {
        const auto bytes = fs::file_size(files[0]);
        fs::copy_file(files[0], dir / "trunc.bin");
        fs::resize_file(dir / "trunc.bin", bytes - 100);
        const std::vector<fs::path> t{dir / "trunc.bin"};
        try {
            (void)pcn::load_cifar10(t);
        } catch (const pcn::FormatError& e) {
            truncated = "FormatError(expected=" + std::to_string(e.expected()) +
                        ",actual=" + std::to_string(e.actual()) + ")";
        } catch (const std::exception& e) {
            truncated = std::string("other:") + e.what();
        }
    }
    {
        fs::copy_file(files[0], dir / "corrupt.bin");
        std::fstream f(dir / "corrupt.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(static_cast<std::streamoff>(7 * pcn::kCifarRecordBytes));
        f.put(static_cast<char>(200));
        f.close();
        const std::vector<fs::path> t{dir / "corrupt.bin"};
        try {
            (void)pcn::load_cifar10(t);
        } catch (const pcn::CorruptRecordError& e) {
            corrupt = "CorruptRecordError(record=" + std::to_string(e.record_index()) + ")";
        } catch (const std::exception& e) {
            corrupt = std::string("other:") + e.what();
        }
    }
    fs::remove_all(dir);
    const bool errors_ok = truncated.rfind("FormatError", 0) == 0 && corrupt == "CorruptRecordError(record=7)";
    return verdict(labels_exact && pixels_close && errors_ok,
                   "samples=" + std::to_string(back.size()) + " labels_exact=" + (labels_exact ? "yes" : "no") +
                       " max_pixel_err=" + fmt("%.5f", worst) + " truncated->" + truncated +
                       " corrupt->" + corrupt);
}

struct Criterion {
    int id;
    const char* name;
    std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "gradient oracle suite", gradient_oracle},
        {2, "energy descent at small rates", energy_descent},
        {3, "synchronous update invariance", synchronous_updates},
        {4, "parameter count", parameter_count},
        {5, "batch bookkeeping", batch_bookkeeping},
        {6, "desk-scale learnability", learnability},
        {7, "CIFAR-10 eval protocols differ", cifar_protocols},
        {8, "checkpoint round trip", persistence},
        {9, "CIFAR-10 binary ingestion", ingestion},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }

    int failed = 0, skipped = 0, selected = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        ++selected;
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::skip ? "SKIP" : "FAIL";
        std::printf("%s %d %s: %s\n", tag, c.id, c.name, r.details.c_str());
        std::fflush(stdout);
        failed += r.outcome == Outcome::fail;
        skipped += r.outcome == Outcome::skip;
    }
    if (failed) return 1;
    if (skipped && skipped == selected) return 77;
    return 0;
}
