#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vrel/commands.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string mode;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool zero_shot = false;
};

vrel::RunConfig effective_config(const Flags& flags) {
    vrel::RunConfig cfg = vrel::load_run_config(flags.config_path);
    if (!flags.mode.empty()) cfg.mode = vrel::theory_mode_from_string(flags.mode);
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed_set) cfg.train.seed = flags.seed;
    if (flags.zero_shot) cfg.zero_shot = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relational grounding trainer and evaluator for annotated bounding-box pairs"};
    app.require_subcommand(1);

    Flags flags;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", flags.config_path, "run configuration (JSON)");
        if (config_required) opt->required();
        sub->add_option("--mode", flags.mode, "theory mode: expl or prior")
            ->check(CLI::IsMember({"expl", "prior"}));
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_option("--seed", flags.seed, "top-level random seed")
            ->each([&](const std::string&) { flags.seed_set = true; });
        return sub;
    };

    auto* train = add_common(app.add_subcommand("train", "build the knowledge base and fit the model"), true);
    auto* evaluate =
        add_common(app.add_subcommand("evaluate", "score a test split and report recall@K"), true);
    evaluate->add_flag("--zero-shot", flags.zero_shot,
                       "restrict ground truth to triple types unseen in training");
    auto* predict =
        add_common(app.add_subcommand("predict", "dump ranked predictions as JSON lines"), true);
    auto* check = add_common(
        app.add_subcommand("check-grads", "verify analytic gradients against finite differences"),
        false);
    auto* pitfalls = add_common(
        app.add_subcommand("demo-pitfalls", "contrast t-norm conjunctions with the harmonic mean"),
        false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : vrel::kExitConfigError;
    }

    try {
        if (train->parsed()) return vrel::cmd_train(effective_config(flags));
        if (evaluate->parsed()) return vrel::cmd_evaluate(effective_config(flags));
        if (predict->parsed()) return vrel::cmd_predict(effective_config(flags));
        if (check->parsed()) {
            vrel::RunConfig cfg;
            if (!flags.config_path.empty()) cfg = effective_config(flags);
            else if (flags.seed_set) cfg.train.seed = flags.seed;
            return vrel::cmd_check_grads(cfg);
        }
        if (pitfalls->parsed()) return vrel::cmd_demo_pitfalls(vrel::RunConfig{});
    } catch (const vrel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return vrel::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return vrel::kExitVerificationFailure;
    }
    return vrel::kExitConfigError;
}
