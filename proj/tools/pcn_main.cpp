#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pcn/checkpoint.hpp"
#include "pcn/config.hpp"
#include "pcn/data.hpp"
#include "pcn/errors.hpp"
#include "pcn/parallel.hpp"
#include "pcn/trainer.hpp"
#include "pcn/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitOracle = 4;

struct TrainArgs {
    std::string config;
    std::string data;
    std::string out;
    std::string trace;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::vector<std::string> overrides;
};

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string mode = "unsupervised_inference";
    std::uint64_t seed = 0;
    std::string config;
    std::string split = "test";
};

struct VerifyArgs {
    std::uint64_t seed = 0;
    std::size_t trials = 100;
    bool flip_sign = false;
};

struct SynthArgs {
    std::string out;
    std::size_t classes = 10;
    std::size_t per_class = 100;
    std::size_t test_per_class = 0;
    double separation = 4.0;
    std::uint64_t seed = 0;
};

int fail(int code, const std::string& message) {
    std::cerr << "pcn: " << message << "\n";
    return code;
}

pcn::Dataset load_split(const fs::path& dir, bool test) {
    if (!fs::is_directory(dir)) throw pcn::IoError("data directory not found: " + dir.string());
    const auto files = test ? pcn::cifar10_test_files(dir) : pcn::cifar10_train_files(dir);
    if (files.empty())
        throw pcn::IoError("no CIFAR-10 " + std::string(test ? "test_batch.bin" : "data_batch_*.bin") +
                           " files in " + dir.string());
    return pcn::load_cifar10(files);
}

int run_train(const TrainArgs& args) {
    pcn::TrainConfig config;
    try {
        config = pcn::load_train_config(args.config, args.overrides);
        if (args.seed) config.seed = *args.seed;
        if (args.epochs) config.epochs = *args.epochs;
        config.validate();
    } catch (const pcn::Error& e) {
        return fail(kExitConfig, e.what());
    }

    pcn::Dataset data;
    try {
        data = load_split(args.data, false);
    } catch (const pcn::Error& e) {
        return fail(kExitData, e.what());
    }

    pcn::TrainResult result;
    try {
        result = pcn::train(config, data, [](const pcn::EpochSummary& s) {
            std::printf("epoch=%zu mean_final_energy=%.9g wall_s=%.3f\n", s.epoch,
                        s.mean_final_energy, s.wall_seconds);
            std::fflush(stdout);
        });
    } catch (const pcn::DivergenceError& e) {
        return fail(kExitDivergence, e.what());
    } catch (const pcn::DimensionError& e) {
        return fail(kExitData, e.what());
    } catch (const pcn::ArgumentError& e) {
        return fail(kExitData, e.what());
    }

    try {
        if (!args.out.empty()) pcn::save_checkpoint(result.stack, config.model, args.out);
        if (!args.trace.empty()) {
            std::ofstream csv(args.trace);
            if (!csv) throw pcn::IoError("cannot write " + args.trace);
            result.trace.write_csv(csv);
        }
    } catch (const pcn::Error& e) {
        return fail(kExitData, e.what());
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    std::vector<pcn::EvalMode> modes;
    if (args.mode == "both") {
        modes = {pcn::EvalMode::unsupervised_inference, pcn::EvalMode::label_clamped};
    } else {
        try {
            modes = {pcn::parse_eval_mode(args.mode)};
        } catch (const pcn::Error& e) {
            return fail(kExitConfig, e.what());
        }
    }

    pcn::Checkpoint ckpt;
    try {
        ckpt = pcn::load_checkpoint(args.checkpoint);
    } catch (const pcn::Error& e) {
        return fail(kExitConfig, std::string("bad checkpoint: ") + e.what());
    }

    pcn::TrainConfig config = pcn::TrainConfig::cifar10_reference();
    if (!args.config.empty()) {
        try {
            config = pcn::load_train_config(args.config);
        } catch (const pcn::Error& e) {
            return fail(kExitConfig, e.what());
        }
    }
    config.model = ckpt.config;

    pcn::Dataset data;
    try {
        data = load_split(args.data, args.split == "test");
    } catch (const pcn::Error& e) {
        return fail(kExitData, e.what());
    }

    for (pcn::EvalMode mode : modes) {
        pcn::EvalReport report;
        try {
            report = pcn::evaluate(ckpt.stack, config, data, mode, args.seed);
        } catch (const pcn::DivergenceError& e) {
            return fail(kExitDivergence, e.what());
        } catch (const pcn::Error& e) {
            return fail(kExitData, e.what());
        }
        std::printf("top1=%.6f top3=%.6f mode=%s samples=%zu\n", report.top1, report.top3,
                    std::string(pcn::to_string(mode)).c_str(), report.samples);
    }
    return 0;
}

int run_verify(const VerifyArgs& args) {
    pcn::verify::OracleOptions options;
    options.seed = args.seed;
    options.trials = args.trials;
    options.flip_sign = args.flip_sign;
    const pcn::verify::OracleReport report = pcn::verify::run_oracle_suite(options);
    std::printf("trials=%zu max_rel_error latent=%.3e weight=%.3e readout=%.3e\n", report.trials,
                report.max_latent_error, report.max_weight_error, report.max_readout_error);
    if (report.passed()) return 0;
    const auto& d = *report.first_failure;
    std::printf(
        "oracle disagreement: trial=%zu layer=%s entry=(%zu,%zu) analytic=%.12g numeric=%.12g "
        "rel_error=%.3e\n",
        d.trial, d.target.c_str(), d.row, d.col, d.analytic, d.numeric, d.error);
    return kExitOracle;
}

int run_synth(const SynthArgs& args) {
    if (args.classes == 0 || args.classes > pcn::kCifarClasses)
        return fail(kExitConfig, "--classes must be between 1 and 10");
    if (args.per_class == 0) return fail(kExitConfig, "--per-class must be at least 1");
    if (!(args.separation > 0.0)) return fail(kExitConfig, "--separation must be positive");

    const fs::path dir = args.out;
    try {
        fs::create_directories(dir);
        const pcn::Dataset all = pcn::synth_blobs(args.classes, args.per_class + args.test_per_class,
                                                  pcn::kCifarImageBytes, args.separation, args.seed);
        const std::size_t n_train = args.classes * args.per_class;
        pcn::write_cifar10(all.slice(0, n_train), dir / "data_batch_1.bin");
        if (args.test_per_class > 0)
            pcn::write_cifar10(all.slice(n_train, all.size()), dir / "test_batch.bin");
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predictive coding network trainer"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = PCN_THREADS or auto)")
        ->check(CLI::NonNegativeNumber);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train on CIFAR-10 binary batches");
    train->add_option("--config", train_args.config, "YAML config file")->required();
    train->add_option("--data", train_args.data, "Directory with data_batch_*.bin")->required();
    train->add_option("--out", train_args.out, "Checkpoint to write");
    train->add_option("--trace", train_args.trace, "Energy trace CSV to write");
    train->add_option("--seed", train_args.seed, "Override the config seed");
    train->add_option("--epochs", train_args.epochs, "Override the config epoch count");
    train->add_option("--set", train_args.overrides, "Config override, e.g. infer.eta=0.1");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with frozen weights");
    eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
    eval->add_option("--data", eval_args.data, "Directory with CIFAR-10 batches")->required();
    eval->add_option("--mode", eval_args.mode, "unsupervised_inference | label_clamped | both")
        ->check(CLI::IsMember({"unsupervised_inference", "label_clamped", "both"}));
    eval->add_option("--seed", eval_args.seed, "Seed for test-time latent initialisation");
    eval->add_option("--config", eval_args.config, "Config supplying inference settings");
    eval->add_option("--split", eval_args.split, "test (test_batch.bin) or train")
        ->check(CLI::IsMember({"test", "train"}));

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Check analytic gradients against finite differences");
    verify->add_option("--seed", verify_args.seed, "Seed for the random networks");
    verify->add_option("--trials", verify_args.trials, "Number of random networks");
    verify->add_flag("--flip-gradient-sign", verify_args.flip_sign,
                     "Negate the analytic gradients (oracle sensitivity check)");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Write Gaussian-blob data in CIFAR-10 layout");
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--classes", synth_args.classes, "Number of classes (1..10)");
    synth->add_option("--per-class", synth_args.per_class, "Training samples per class");
    synth->add_option("--test-per-class", synth_args.test_per_class,
                      "Test samples per class (writes test_batch.bin)");
    synth->add_option("--separation", synth_args.separation, "Distance between class means");
    synth->add_option("--seed", synth_args.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    pcn::set_num_threads(pcn::resolve_thread_count(threads));

    if (*train) return run_train(train_args);
    if (*eval) return run_eval(eval_args);
    if (*verify) return run_verify(verify_args);
    return run_synth(synth_args);
}
