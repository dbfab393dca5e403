#include "pcn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

void require_map(const YAML::Node& node, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
}

void reject_unknown(const YAML::Node& node, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

std::string scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) throw ConfigError(key + " must be a scalar");
    return node.Scalar();
}

std::uint64_t to_u64(const YAML::Node& node, const std::string& key) {
    const std::string s = scalar(node, key);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw ConfigError(key + " must be a nonnegative integer, got '" + s + "'");
    return v;
}

double to_double(const YAML::Node& node, const std::string& key) {
    const std::string s = scalar(node, key);
    double v = 0.0;
    try {
        v = node.as<double>();
    } catch (const YAML::Exception&) {
        throw ConfigError(key + " must be a number, got '" + s + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(key + " must be finite, got '" + s + "'");
    return v;
}

std::vector<std::size_t> to_dims(const YAML::Node& node, const std::string& key) {
    if (!node.IsSequence()) throw ConfigError(key + " must be a list of integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(to_u64(node[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

Activation to_activation(const YAML::Node& node, const std::string& key) {
    try {
        return parse_activation(scalar(node, key));
    } catch (const ArgumentError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::stringstream in(path);
    std::string part;
    while (std::getline(in, part, '.')) {
        if (part.empty()) throw ConfigError("malformed override key '" + path + "'");
        parts.push_back(part);
    }
    if (parts.empty()) throw ConfigError("empty override key");
    return parts;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::vector<std::string> path = split_path(assignment.substr(0, eq));
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ConfigError("override '" + assignment + "': " + e.what());
    }
    YAML::Node node = root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (node[path[i]] && !node[path[i]].IsMap())
            throw ConfigError("override '" + assignment + "': " + path[i] + " is not a mapping");
        node.reset(node[path[i]]);
    }
    node[path.back()] = value;
}

void read_model(const YAML::Node& node, ModelConfig& model) {
    require_map(node, "model");
    reject_unknown(node, "model",
                   {"dims", "output_dim", "activation", "activations", "latent_init_scale"});
    if (node["dims"]) model.dims = to_dims(node["dims"], "model.dims");
    if (node["output_dim"]) model.output_dim = to_u64(node["output_dim"], "model.output_dim");
    if (node["latent_init_scale"])
        model.latent_init_scale = to_double(node["latent_init_scale"], "model.latent_init_scale");

    const std::size_t L = model.num_latent_layers();
    if (node["activation"] && node["activations"])
        throw ConfigError("model.activation and model.activations are mutually exclusive");
    if (node["activations"]) {
        const YAML::Node acts = node["activations"];
        if (!acts.IsSequence()) throw ConfigError("model.activations must be a list");
        model.activations.clear();
        for (std::size_t i = 0; i < acts.size(); ++i)
            model.activations.push_back(
                to_activation(acts[i], "model.activations[" + std::to_string(i) + "]"));
    } else {
        const Activation act = node["activation"]
                                   ? to_activation(node["activation"], "model.activation")
                                   : Activation::relu;
        model.activations.assign(L, act);
    }
}

void read_infer(const YAML::Node& node, InferenceSettings& infer) {
    require_map(node, "infer");
    reject_unknown(node, "infer", {"steps", "eta", "early_stop"});
    if (node["steps"]) infer.t_infer = to_u64(node["steps"], "infer.steps");
    if (node["eta"]) infer.eta_infer = to_double(node["eta"], "infer.eta");
    if (const YAML::Node es = node["early_stop"]) {
        if (es.IsNull()) {
            infer.early_stop.reset();
            return;
        }
        require_map(es, "infer.early_stop");
        reject_unknown(es, "infer.early_stop", {"threshold", "patience"});
        EarlyStop stop;
        if (es["threshold"]) stop.threshold = to_double(es["threshold"], "infer.early_stop.threshold");
        if (es["patience"]) stop.patience = to_u64(es["patience"], "infer.early_stop.patience");
        infer.early_stop = stop;
    }
}

void read_learn(const YAML::Node& node, LearnSettings& learn) {
    require_map(node, "learn");
    reject_unknown(node, "learn", {"steps", "eta"});
    if (node["steps"]) learn.t_learn = to_u64(node["steps"], "learn.steps");
    if (node["eta"]) learn.eta_learn = to_double(node["eta"], "learn.eta");
}

}  // namespace

TrainConfig parse_train_config(std::string_view text, const std::vector<std::string>& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    require_map(root, "config root");
    for (const std::string& o : overrides) apply_override(root, o);

    reject_unknown(root, "", {"model", "infer", "learn", "batch_size", "epochs", "seed",
                              "eval_seed", "eval_mode"});
    TrainConfig config = TrainConfig::cifar10_reference();
    // One learning step per sample unless stated otherwise.
    config.learn.t_learn.reset();

    try {
        if (root["model"]) read_model(root["model"], config.model);
        if (root["infer"]) read_infer(root["infer"], config.infer);
        if (root["learn"]) read_learn(root["learn"], config.learn);
        if (root["batch_size"]) config.batch_size = to_u64(root["batch_size"], "batch_size");
        if (root["epochs"]) config.epochs = to_u64(root["epochs"], "epochs");
        if (root["seed"]) config.seed = to_u64(root["seed"], "seed");
        if (root["eval_seed"]) config.eval_seed = to_u64(root["eval_seed"], "eval_seed");
        if (root["eval_mode"]) config.eval_mode = parse_eval_mode(scalar(root["eval_mode"], "eval_mode"));
        config.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return config;
}

TrainConfig load_train_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_train_config(buffer.str(), overrides);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_yaml(const TrainConfig& config) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dims" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (std::size_t d : config.model.dims) out << d;
    out << YAML::EndSeq;
    out << YAML::Key << "output_dim" << YAML::Value << config.model.output_dim;
    out << YAML::Key << "activations" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Activation a : config.model.activations) out << std::string(to_string(a));
    out << YAML::EndSeq;
    out << YAML::Key << "latent_init_scale" << YAML::Value << config.model.latent_init_scale;
    out << YAML::EndMap;

    out << YAML::Key << "infer" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "steps" << YAML::Value << config.infer.t_infer;
    out << YAML::Key << "eta" << YAML::Value << config.infer.eta_infer;
    if (config.infer.early_stop) {
        out << YAML::Key << "early_stop" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "threshold" << YAML::Value << config.infer.early_stop->threshold;
        out << YAML::Key << "patience" << YAML::Value << config.infer.early_stop->patience;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "learn" << YAML::Value << YAML::BeginMap;
    if (config.learn.t_learn) out << YAML::Key << "steps" << YAML::Value << *config.learn.t_learn;
    out << YAML::Key << "eta" << YAML::Value << config.learn.eta_learn;
    out << YAML::EndMap;

    out << YAML::Key << "batch_size" << YAML::Value << config.batch_size;
    out << YAML::Key << "epochs" << YAML::Value << config.epochs;
    out << YAML::Key << "seed" << YAML::Value << config.seed;
    out << YAML::Key << "eval_seed" << YAML::Value << config.eval_seed;
    out << YAML::Key << "eval_mode" << YAML::Value << std::string(to_string(config.eval_mode));
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace pcn
