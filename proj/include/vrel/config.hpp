#pragma once

#include <string>
#include <vector>

#include "vrel/kb.hpp"
#include "vrel/trainer.hpp"

namespace vrel {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything one command run needs: the signature, file paths, training
/// and knowledge-base settings, and the evaluation request. Loaded from a
/// JSON file; command-line flags override individual fields.
struct RunConfig {
    std::vector<std::string> unary_predicates;
    std::vector<std::string> binary_predicates;

    std::string train_annotations;
    std::string test_annotations;
    std::string constraints_file;
    std::string equivalences_file;
    std::string model_in;
    std::string model_out;
    std::string out_dir = ".";

    TrainConfig train;
    KbConfig kb;
    TheoryMode mode = TheoryMode::ExamplesOnly;

    std::vector<std::string> tasks = {"predicate"};
    std::vector<int> ks = {50, 100};
    bool zero_shot = false;

    Signature signature() const { return Signature(unary_predicates, binary_predicates); }
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

/// Serializes the config with all defaults applied; the output re-loads to
/// the same effective configuration.
std::string run_config_to_json(const RunConfig& cfg);
void save_run_config(const RunConfig& cfg, const std::string& path);

/// Checks the per-command requirements (referenced files exist, prior mode
/// has a constraints path, ...). Throws ConfigError.
void validate_for_train(const RunConfig& cfg);
void validate_for_evaluate(const RunConfig& cfg);
void validate_for_predict(const RunConfig& cfg);

}  // namespace vrel
