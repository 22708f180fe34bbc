#include "vrel/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace vrel {

PriorTable PriorTable::from_annotations(const AnnotationSet& train, const Signature& sig) {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const ImageAnnotation& img : train.images)
        for (const Relationship& r : img.relationships) {
            ++counts[r.predicate];
            ++total;
        }
    PriorTable t;
    const double denom = static_cast<double>(std::max<std::size_t>(total, 1));
    for (const std::string& pred : sig.binary_predicates()) {
        auto it = counts.find(pred);
        const double count = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        // Unseen predicates keep the smoothing floor of one instance.
        t.priors_[pred] = std::max(count, 1.0) / denom;
    }
    return t;
}

double PriorTable::prior(const std::string& predicate) const {
    auto it = priors_.find(predicate);
    if (it == priors_.end()) throw std::out_of_range("no prior for predicate " + predicate);
    return it->second;
}

EquivalenceClasses::EquivalenceClasses(std::vector<std::vector<std::string>> groups,
                                       const Signature& sig)
    : groups_(std::move(groups)) {
    std::unordered_set<std::string> seen;
    for (const auto& group : groups_)
        for (const std::string& pred : group) {
            if (!sig.is_binary(pred))
                throw std::invalid_argument("equivalence group member '" + pred +
                                            "' is not a binary predicate");
            if (!seen.insert(pred).second)
                throw std::invalid_argument("equivalence groups overlap on '" + pred + "'");
        }
}

EquivalenceClasses EquivalenceClasses::load(const std::string& path, const Signature& sig) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open equivalences file: " + path);
    nlohmann::json root = nlohmann::json::parse(in);
    std::vector<std::vector<std::string>> groups;
    for (const auto& jg : root.value("groups", nlohmann::json::array()))
        groups.push_back(jg.get<std::vector<std::string>>());
    return EquivalenceClasses(std::move(groups), sig);
}

void EquivalenceClasses::normalize(std::map<std::string, double>& raw) const {
    for (const auto& group : groups_) {
        double best = 0.0;
        for (const std::string& pred : group) best = std::max(best, raw.at(pred));
        for (const std::string& pred : group) raw.at(pred) = best;
    }
}

std::vector<RankedPrediction> score_pairs(const Theta& theta, const Signature& sig,
                                          const std::vector<Detection>& detections,
                                          double img_w, double img_h, const PriorTable& prior,
                                          const EquivalenceClasses& eq) {
    std::vector<RankedPrediction> out;
    if (detections.size() < 2) return out;

    struct Entry {
        RankedPrediction pred;
        std::size_t predicate_index;
        std::size_t pair_index;
    };
    std::vector<Entry> entries;
    entries.reserve(detections.size() * (detections.size() - 1) *
                    sig.binary_predicates().size());

    std::size_t pair_index = 0;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        for (std::size_t j = 0; j < detections.size(); ++j) {
            if (i == j) continue;
            const Detection& sub = detections[i];
            const Detection& obj = detections[j];
            Eigen::VectorXd feats = pair_features(sub, obj, img_w, img_h);
            std::map<std::string, double> raw;
            for (const std::string& pred : sig.binary_predicates())
                raw[pred] = ntn_forward(theta.predicates.at(pred), feats);
            eq.normalize(raw);
            for (std::size_t pi = 0; pi < sig.binary_predicates().size(); ++pi) {
                const std::string& pred = sig.binary_predicates()[pi];
                RankedPrediction rp;
                rp.subject_box = sub.box;
                rp.object_box = obj.box;
                rp.subject_class = detection_class(sub, sig);
                rp.object_class = detection_class(obj, sig);
                rp.predicate = pred;
                rp.score = raw.at(pred) * prior.prior(pred);
                entries.push_back({std::move(rp), pi, pair_index});
            }
            ++pair_index;
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.pred.score != b.pred.score) return a.pred.score > b.pred.score;
        if (a.predicate_index != b.predicate_index) return a.predicate_index < b.predicate_index;
        return a.pair_index < b.pair_index;
    });
    out.reserve(entries.size());
    for (Entry& e : entries) out.push_back(std::move(e.pred));
    return out;
}

double iou(const Box& a, const Box& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

Task task_from_string(const std::string& s) {
    if (s == "phrase") return Task::Phrase;
    if (s == "relationship") return Task::Relationship;
    if (s == "predicate") return Task::Predicate;
    throw std::invalid_argument("unknown task: " + s);
}

std::string to_string(Task t) {
    switch (t) {
        case Task::Phrase: return "phrase";
        case Task::Relationship: return "relationship";
        case Task::Predicate: return "predicate";
    }
    return "?";
}

std::vector<GroundTruthTriple> ground_truth_triples(const ImageAnnotation& img,
                                                    const Signature& sig) {
    std::vector<GroundTruthTriple> out;
    out.reserve(img.relationships.size());
    for (const Relationship& r : img.relationships) {
        const Detection& sub = img.detection(r.subject_id);
        const Detection& obj = img.detection(r.object_id);
        out.push_back({sub.box, obj.box, detection_class(sub, sig), r.predicate,
                       detection_class(obj, sig)});
    }
    return out;
}

namespace {

bool box_test(Task task, const RankedPrediction& p, const GroundTruthTriple& g) {
    constexpr double kThreshold = 0.5;
    switch (task) {
        case Task::Phrase:
            return iou(union_box(p.subject_box, p.object_box),
                       union_box(g.subject_box, g.object_box)) >= kThreshold;
        case Task::Relationship:
            return iou(p.subject_box, g.subject_box) >= kThreshold &&
                   iou(p.object_box, g.object_box) >= kThreshold;
        case Task::Predicate:
            return true;  // ground-truth boxes; labels decide
    }
    return false;
}

}  // namespace

RecallResult evaluate_task(Task task, const std::vector<ImageEval>& images, int K) {
    if (K != 50 && K != 100)
        std::cerr << "warning: recall@" << K << " is a nonstandard cutoff\n";
    RecallResult res;
    for (const ImageEval& img : images) {
        res.total += img.ground_truth.size();
        std::vector<bool> consumed(img.ground_truth.size(), false);
        const std::size_t top =
            std::min<std::size_t>(img.predictions.size(), static_cast<std::size_t>(K));
        for (std::size_t pi = 0; pi < top; ++pi) {
            const RankedPrediction& p = img.predictions[pi];
            for (std::size_t gi = 0; gi < img.ground_truth.size(); ++gi) {
                if (consumed[gi]) continue;
                const GroundTruthTriple& g = img.ground_truth[gi];
                if (p.subject_class == g.subject_class && p.predicate == g.predicate &&
                    p.object_class == g.object_class && box_test(task, p, g)) {
                    consumed[gi] = true;
                    ++res.matched;
                    break;
                }
            }
        }
    }
    return res;
}

std::vector<GroundTruthTriple> zero_shot_filter(const std::vector<GroundTruthTriple>& gt,
                                                const std::set<std::string>& training_types) {
    std::vector<GroundTruthTriple> out;
    for (const GroundTruthTriple& g : gt)
        if (!training_types.count(triple_type_key(g.subject_class, g.predicate, g.object_class)))
            out.push_back(g);
    return out;
}

}  // namespace vrel
