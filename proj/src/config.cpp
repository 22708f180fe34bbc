#include "vrel/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vrel/metrics.hpp"

namespace vrel {

using nlohmann::json;

namespace {

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError(what + " path is not set");
    if (!std::filesystem::exists(path)) throw ConfigError(what + " file not found: " + path);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        const json& sig = root.at("signature");
        cfg.unary_predicates = sig.at("unary").get<std::vector<std::string>>();
        cfg.binary_predicates = sig.at("binary").get<std::vector<std::string>>();

        const json paths = root.value("paths", json::object());
        cfg.train_annotations = paths.value("train_annotations", "");
        cfg.test_annotations = paths.value("test_annotations", "");
        cfg.constraints_file = paths.value("constraints", "");
        cfg.equivalences_file = paths.value("equivalences", "");
        cfg.model_in = paths.value("model_in", "");
        cfg.model_out = paths.value("model_out", "");
        cfg.out_dir = paths.value("out_dir", ".");

        const json train = root.value("train", json::object());
        cfg.train.epochs = train.value("epochs", cfg.train.epochs);
        cfg.train.learning_rate = train.value("learning_rate", cfg.train.learning_rate);
        cfg.train.rmsprop_decay = train.value("rmsprop_decay", cfg.train.rmsprop_decay);
        cfg.train.rmsprop_epsilon = train.value("rmsprop_epsilon", cfg.train.rmsprop_epsilon);
        cfg.train.p = train.value("p", cfg.train.p);
        cfg.train.agg_epsilon = train.value("agg_epsilon", cfg.train.agg_epsilon);
        cfg.train.tnorm = tnorm_from_string(train.value("tnorm", to_string(cfg.train.tnorm)));
        cfg.train.k = train.value("k", cfg.train.k);
        cfg.train.lambda = train.value("lambda", cfg.train.lambda);
        cfg.train.seed = train.value("seed", cfg.train.seed);
        cfg.train.minibatch_clauses = train.value("minibatch_clauses", 0);
        const std::string loss_mode = train.value("loss_mode", "power_mean");
        if (loss_mode == "power_mean")
            cfg.train.loss_mode = KbAggregation::Kind::PowerMean;
        else if (loss_mode == "tnorm_conjunction")
            cfg.train.loss_mode = KbAggregation::Kind::TNormConjunction;
        else
            throw ConfigError("unknown loss_mode: " + loss_mode);

        const json kb = root.value("kb", json::object());
        cfg.kb.max_negative_pairs_per_image =
            kb.value("max_negative_pairs_per_image", cfg.kb.max_negative_pairs_per_image);
        cfg.kb.constraint_sample_cap =
            kb.value("constraint_sample_cap", cfg.kb.constraint_sample_cap);
        for (const auto& [label, implied] : kb.value("isa_closure", json::object()).items())
            cfg.kb.isa_closure[label] = implied.get<std::vector<std::string>>();

        cfg.mode = theory_mode_from_string(root.value("mode", "expl"));

        const json eval = root.value("eval", json::object());
        cfg.tasks = eval.value("tasks", cfg.tasks);
        cfg.ks = eval.value("ks", cfg.ks);
        cfg.zero_shot = eval.value("zero_shot", cfg.zero_shot);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    if (cfg.unary_predicates.empty() || cfg.binary_predicates.empty())
        throw ConfigError("signature must list unary and binary predicates");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    json root;
    root["signature"] = {{"unary", cfg.unary_predicates}, {"binary", cfg.binary_predicates}};
    root["paths"] = {{"train_annotations", cfg.train_annotations},
                     {"test_annotations", cfg.test_annotations},
                     {"constraints", cfg.constraints_file},
                     {"equivalences", cfg.equivalences_file},
                     {"model_in", cfg.model_in},
                     {"model_out", cfg.model_out},
                     {"out_dir", cfg.out_dir}};
    root["train"] = {
        {"epochs", cfg.train.epochs},
        {"learning_rate", cfg.train.learning_rate},
        {"rmsprop_decay", cfg.train.rmsprop_decay},
        {"rmsprop_epsilon", cfg.train.rmsprop_epsilon},
        {"p", cfg.train.p},
        {"agg_epsilon", cfg.train.agg_epsilon},
        {"tnorm", to_string(cfg.train.tnorm)},
        {"k", cfg.train.k},
        {"lambda", cfg.train.lambda},
        {"seed", cfg.train.seed},
        {"minibatch_clauses", cfg.train.minibatch_clauses},
        {"loss_mode", cfg.train.loss_mode == KbAggregation::Kind::PowerMean
                          ? "power_mean"
                          : "tnorm_conjunction"},
    };
    json isa = json::object();
    for (const auto& [label, implied] : cfg.kb.isa_closure) isa[label] = implied;
    root["kb"] = {{"max_negative_pairs_per_image", cfg.kb.max_negative_pairs_per_image},
                  {"constraint_sample_cap", cfg.kb.constraint_sample_cap},
                  {"isa_closure", isa}};
    root["mode"] = to_string(cfg.mode);
    root["eval"] = {{"tasks", cfg.tasks}, {"ks", cfg.ks}, {"zero_shot", cfg.zero_shot}};
    return root.dump(2) + "\n";
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw ConfigError("cannot write config echo: " + path);
    os << run_config_to_json(cfg);
}

void validate_for_train(const RunConfig& cfg) {
    require_file(cfg.train_annotations, "train annotations");
    if (cfg.mode == TheoryMode::ExamplesAndConstraints)
        require_file(cfg.constraints_file, "constraints");
    if (cfg.model_out.empty()) throw ConfigError("model_out path is not set");
    cfg.train.validate();
}

void validate_for_evaluate(const RunConfig& cfg) {
    require_file(cfg.model_in, "model");
    require_file(cfg.test_annotations, "test annotations");
    require_file(cfg.train_annotations, "train annotations");  // priors + zero-shot types
    if (!cfg.equivalences_file.empty()) require_file(cfg.equivalences_file, "equivalences");
    for (const std::string& t : cfg.tasks) task_from_string(t);
    if (cfg.tasks.empty() || cfg.ks.empty()) throw ConfigError("tasks and ks must be nonempty");
}

void validate_for_predict(const RunConfig& cfg) {
    require_file(cfg.model_in, "model");
    require_file(cfg.test_annotations, "test annotations");
    require_file(cfg.train_annotations, "train annotations");
    if (!cfg.equivalences_file.empty()) require_file(cfg.equivalences_file, "equivalences");
}

}  // namespace vrel
