#pragma once

#include <map>
#include <string>
#include <vector>

#include "vrel/annotations.hpp"
#include "vrel/ast.hpp"
#include "vrel/features.hpp"
#include "vrel/ntn.hpp"

namespace vrel {

/// Relative frequency of each binary predicate in the training
/// annotations, with a floor of 1/total for predicates never seen there.
class PriorTable {
public:
    PriorTable() = default;
    static PriorTable from_annotations(const AnnotationSet& train, const Signature& sig);

    double prior(const std::string& predicate) const;
    const std::map<std::string, double>& values() const { return priors_; }

private:
    std::map<std::string, double> priors_;
};

/// Disjoint groups of mutually equivalent binary predicates; scoring sets
/// every member of a group to the group maximum before the prior product.
class EquivalenceClasses {
public:
    EquivalenceClasses() = default;
    explicit EquivalenceClasses(std::vector<std::vector<std::string>> groups,
                                const Signature& sig);

    /// Loads {"groups": [["beside","next_to"], ...]}; missing file fields
    /// default to no groups.
    static EquivalenceClasses load(const std::string& path, const Signature& sig);

    const std::vector<std::vector<std::string>>& groups() const { return groups_; }

    /// In-place group-max normalization of a per-predicate score map.
    void normalize(std::map<std::string, double>& raw) const;

private:
    std::vector<std::vector<std::string>> groups_;
};

struct RankedPrediction {
    Box subject_box;
    Box object_box;
    std::string subject_class;
    std::string predicate;
    std::string object_class;
    double score = 0.0;
};

/// Scores every ordered detection pair with every binary predicate:
/// raw neural-tensor groundings, equivalence-group max, then the prior
/// product. Returns the predictions sorted by descending score, ties broken
/// by (predicate index, pair index). Fewer than two detections yield an
/// empty list.
std::vector<RankedPrediction> score_pairs(const Theta& theta, const Signature& sig,
                                          const std::vector<Detection>& detections,
                                          double img_w, double img_h, const PriorTable& prior,
                                          const EquivalenceClasses& eq);

/// Intersection over union of two boxes.
double iou(const Box& a, const Box& b);

enum class Task { Phrase, Relationship, Predicate };

Task task_from_string(const std::string& s);
std::string to_string(Task t);

struct GroundTruthTriple {
    Box subject_box;
    Box object_box;
    std::string subject_class;
    std::string predicate;
    std::string object_class;
};

std::vector<GroundTruthTriple> ground_truth_triples(const ImageAnnotation& img,
                                                    const Signature& sig);

/// recall@K over one image set: matched ground truth / total ground truth.
/// A prediction matches an unconsumed ground-truth triple when the three
/// labels coincide and the task's box test passes (phrase: IoU of the union
/// boxes >= 0.5; relationship: IoU >= 0.5 on subject and object; predicate:
/// labels only). Matching is greedy in rank order over the top-K
/// predictions with one-to-one consumption.
struct ImageEval {
    std::vector<RankedPrediction> predictions;  // sorted descending
    std::vector<GroundTruthTriple> ground_truth;
};

struct RecallResult {
    std::size_t matched = 0;
    std::size_t total = 0;
    double recall() const { return total == 0 ? 0.0 : static_cast<double>(matched) / total; }
};

RecallResult evaluate_task(Task task, const std::vector<ImageEval>& images, int K);

/// Keeps only ground-truth triples whose (subject_class, predicate,
/// object_class) type never occurs in `training_types`.
std::vector<GroundTruthTriple> zero_shot_filter(const std::vector<GroundTruthTriple>& gt,
                                                const std::set<std::string>& training_types);

}  // namespace vrel
