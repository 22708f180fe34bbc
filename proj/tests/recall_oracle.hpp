#pragma once

#include <string>
#include <vector>

#include "vrel/metrics.hpp"

// A deliberately plain re-implementation of recall@K used as an oracle:
// rank-ordered greedy matching with one-to-one ground-truth consumption,
// written against the task definitions with its own box arithmetic.
namespace vrel::testdata {

inline double oracle_overlap(const Box& a, const Box& b) {
    const double ix0 = a.x0 > b.x0 ? a.x0 : b.x0;
    const double iy0 = a.y0 > b.y0 ? a.y0 : b.y0;
    const double ix1 = a.x1 < b.x1 ? a.x1 : b.x1;
    const double iy1 = a.y1 < b.y1 ? a.y1 : b.y1;
    double inter = 0.0;
    if (ix1 > ix0 && iy1 > iy0) inter = (ix1 - ix0) * (iy1 - iy0);
    const double area_a = (a.x1 - a.x0) * (a.y1 - a.y0);
    const double area_b = (b.x1 - b.x0) * (b.y1 - b.y0);
    const double uni = area_a + area_b - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

inline Box oracle_enclosing(const Box& a, const Box& b) {
    Box u;
    u.x0 = a.x0 < b.x0 ? a.x0 : b.x0;
    u.y0 = a.y0 < b.y0 ? a.y0 : b.y0;
    u.x1 = a.x1 > b.x1 ? a.x1 : b.x1;
    u.y1 = a.y1 > b.y1 ? a.y1 : b.y1;
    return u;
}

inline double recall_oracle(Task task, const std::vector<ImageEval>& images, int K) {
    std::size_t matched = 0, total = 0;
    for (const ImageEval& img : images) {
        total += img.ground_truth.size();
        std::vector<bool> used(img.ground_truth.size(), false);
        for (std::size_t pi = 0; pi < img.predictions.size() && pi < static_cast<std::size_t>(K);
             ++pi) {
            const RankedPrediction& p = img.predictions[pi];
            for (std::size_t gi = 0; gi < img.ground_truth.size(); ++gi) {
                if (used[gi]) continue;
                const GroundTruthTriple& g = img.ground_truth[gi];
                if (p.subject_class != g.subject_class || p.predicate != g.predicate ||
                    p.object_class != g.object_class)
                    continue;
                bool boxes_ok = true;
                if (task == Task::Phrase)
                    boxes_ok = oracle_overlap(oracle_enclosing(p.subject_box, p.object_box),
                                              oracle_enclosing(g.subject_box, g.object_box)) >= 0.5;
                else if (task == Task::Relationship)
                    boxes_ok = oracle_overlap(p.subject_box, g.subject_box) >= 0.5 &&
                               oracle_overlap(p.object_box, g.object_box) >= 0.5;
                if (!boxes_ok) continue;
                used[gi] = true;
                ++matched;
                break;
            }
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace vrel::testdata
