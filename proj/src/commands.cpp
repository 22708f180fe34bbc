#include "vrel/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "vrel/annotations.hpp"
#include "vrel/gradcheck.hpp"
#include "vrel/kb.hpp"
#include "vrel/metrics.hpp"
#include "vrel/ntn.hpp"
#include "vrel/parser.hpp"
#include "vrel/trainer.hpp"

namespace vrel {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<FormulaPtr> load_constraints(const RunConfig& cfg, const Signature& sig) {
    if (cfg.mode != TheoryMode::ExamplesAndConstraints) return {};
    return parse_constraints(read_file(cfg.constraints_file), sig);
}

void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

struct EvalData {
    Signature sig;
    Theta theta;
    AnnotationSet test;
    PriorTable prior;
    EquivalenceClasses eq;
    std::set<std::string> training_types;
};

EvalData load_eval_data(const RunConfig& cfg) {
    EvalData data;
    data.sig = cfg.signature();
    LoadedModel model = load_model(cfg.model_in);
    if (model.signature.unary_predicates() != data.sig.unary_predicates() ||
        model.signature.binary_predicates() != data.sig.binary_predicates())
        throw std::runtime_error("checkpoint signature does not match the configured one");
    if (model.input_dim != pair_feature_dim(data.sig))
        throw std::runtime_error("checkpoint feature dimension does not match the signature");
    data.theta = std::move(model.theta);
    AnnotationSet train_set = load_annotations(cfg.train_annotations, data.sig);
    data.test = load_annotations(cfg.test_annotations, data.sig);
    data.prior = PriorTable::from_annotations(train_set, data.sig);
    data.training_types = train_set.triple_types(data.sig);
    if (!cfg.equivalences_file.empty())
        data.eq = EquivalenceClasses::load(cfg.equivalences_file, data.sig);
    return data;
}

void dump_predictions(const std::string& path, const AnnotationSet& test,
                      const std::vector<std::vector<RankedPrediction>>& per_image) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write predictions: " + path);
    for (std::size_t i = 0; i < test.images.size(); ++i) {
        for (const RankedPrediction& p : per_image[i]) {
            nlohmann::json line = {
                {"image", test.images[i].id},
                {"sub_box", {p.subject_box.x0, p.subject_box.y0, p.subject_box.x1, p.subject_box.y1}},
                {"obj_box", {p.object_box.x0, p.object_box.y0, p.object_box.x1, p.object_box.y1}},
                {"sub", p.subject_class},
                {"pred", p.predicate},
                {"obj", p.object_class},
                {"score", p.score},
            };
            os << line.dump() << "\n";
        }
    }
}

std::vector<std::vector<RankedPrediction>> score_test_split(const EvalData& data) {
    std::vector<std::vector<RankedPrediction>> out;
    out.reserve(data.test.images.size());
    for (const ImageAnnotation& img : data.test.images)
        out.push_back(score_pairs(data.theta, data.sig, img.detections, img.width, img.height,
                                  data.prior, data.eq));
    return out;
}

int guarded(const char* name, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << name << ": config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << name << ": error: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
}

}  // namespace

int cmd_train(const RunConfig& cfg) {
    return guarded("train", [&] {
        validate_for_train(cfg);
        ensure_out_dir(cfg);
        const Signature sig = cfg.signature();
        AnnotationSet annotations = load_annotations(cfg.train_annotations, sig);
        std::vector<FormulaPtr> constraints = load_constraints(cfg, sig);
        GroundedTheory theory =
            build_theory(annotations, sig, cfg.mode, constraints, cfg.kb, cfg.train.seed);
        std::cout << "theory: " << theory.example_count() << " example clauses, "
                  << theory.constraint_count() << " constraint clauses\n";
        auto [theta, trace] = train(theory, cfg.train);
        save_model(cfg.model_out, sig, theta, theory.pair_input_dim);
        trace.write_csv(cfg.out_dir + "/trace.csv");
        save_run_config(cfg, cfg.out_dir + "/config.json");
        if (!trace.epochs.empty())
            std::cout << "final satisfiability: " << trace.epochs.back().satisfiability << "\n";
        std::cout << "checkpoint written to " << cfg.model_out << "\n";
        return kExitOk;
    });
}

int cmd_evaluate(const RunConfig& cfg) {
    return guarded("evaluate", [&] {
        validate_for_evaluate(cfg);
        ensure_out_dir(cfg);
        EvalData data = load_eval_data(cfg);
        auto per_image = score_test_split(data);

        std::vector<ImageEval> evals(data.test.images.size());
        for (std::size_t i = 0; i < data.test.images.size(); ++i) {
            evals[i].predictions = per_image[i];
            evals[i].ground_truth = ground_truth_triples(data.test.images[i], data.sig);
            if (cfg.zero_shot)
                evals[i].ground_truth =
                    zero_shot_filter(evals[i].ground_truth, data.training_types);
        }

        std::ofstream csv(cfg.out_dir + "/metrics.csv", std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write metrics.csv");
        csv << "task,k,zero_shot,matched,gt_total,recall\n";
        char buf[160];
        for (const std::string& task_name : cfg.tasks) {
            Task task = task_from_string(task_name);
            for (int K : cfg.ks) {
                RecallResult r = evaluate_task(task, evals, K);
                if (r.total == 0)
                    std::snprintf(buf, sizeof(buf), "%s,%d,%d,0,0,nan\n", task_name.c_str(), K,
                                  cfg.zero_shot ? 1 : 0);
                else
                    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%zu,%zu,%.6f\n", task_name.c_str(),
                                  K, cfg.zero_shot ? 1 : 0, r.matched, r.total, r.recall());
                csv << buf;
                std::cout << task_name << " recall@" << K << ": "
                          << (r.total == 0 ? std::string("n/a (empty ground truth)")
                                           : std::to_string(r.recall()))
                          << "\n";
            }
        }
        dump_predictions(cfg.out_dir + "/predictions.jsonl", data.test, per_image);
        save_run_config(cfg, cfg.out_dir + "/config.json");
        return kExitOk;
    });
}

int cmd_predict(const RunConfig& cfg) {
    return guarded("predict", [&] {
        validate_for_predict(cfg);
        ensure_out_dir(cfg);
        EvalData data = load_eval_data(cfg);
        dump_predictions(cfg.out_dir + "/predictions.jsonl", data.test, score_test_split(data));
        std::cout << "predictions written to " << cfg.out_dir << "/predictions.jsonl\n";
        return kExitOk;
    });
}

int cmd_check_grads(const RunConfig& cfg) {
    return guarded("check-grads", [&] {
        GradCheckOptions opts;
        opts.seed = cfg.train.seed == 0 ? 1 : cfg.train.seed;
        GradCheckReport report = run_gradient_checks(opts);
        std::printf("gradient check: %d instances, max relative error %.3e (tolerance %.0e)\n",
                    report.instances_checked, report.max_rel_error, report.tolerance);
        if (!report.passed()) {
            std::printf("worst coordinate: %s\n", report.worst_coordinate.c_str());
            return kExitVerificationFailure;
        }
        return kExitOk;
    });
}

int cmd_demo_pitfalls(const RunConfig&) {
    return guarded("demo-pitfalls", [&] {
        const AggregationSpec harmonic{-1, 1e-6};
        auto row = [&](const char* label, const std::vector<double>& values) {
            const double luk =
                kb_satisfiability(values, KbAggregation::tnorm_conjunction(TNormFamily::Lukasiewicz));
            const double min =
                kb_satisfiability(values, KbAggregation::tnorm_conjunction(TNormFamily::Goedel));
            const double prod =
                kb_satisfiability(values, KbAggregation::tnorm_conjunction(TNormFamily::Product));
            const double hmean = kb_satisfiability(values, KbAggregation::power_mean(harmonic));
            std::printf("%-28s %14.6g %12.6g %14.6g %14.6g\n", label, luk, min, prod, hmean);
        };
        std::printf("%-28s %14s %12s %14s %14s\n", "clause set", "lukasiewicz", "godel-min",
                    "product", "harmonic");
        row("20 clauses at 0.9", std::vector<double>(20, 0.9));
        std::vector<double> one_hard(20, 0.9);
        one_hard[0] = 0.1;
        row("one 0.1 among 19 at 0.9", one_hard);
        row("500 clauses at 0.9", std::vector<double>(500, 0.9));
        std::printf("\nA handful of hard clauses zero out the Lukasiewicz conjunction, the\n"
                    "minimum tracks only the single worst clause and long products underflow;\n"
                    "the harmonic mean stays informative in every case.\n");
        return kExitOk;
    });
}

}  // namespace vrel
