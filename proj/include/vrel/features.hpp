#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "vrel/ast.hpp"

namespace vrel {

/// Axis-aligned box in pixels, (x0,y0) top-left, (x1,y1) bottom-right.
struct Box {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }
    bool valid() const { return x0 < x1 && y0 < y1; }
};

double intersection_area(const Box& a, const Box& b);
Box union_box(const Box& a, const Box& b);

/// intersec(b1,b2) / area(b1).
double inclusion_ratio(const Box& b1, const Box& b2);

/// One detected (or ground-truth) bounding box with detector class scores.
struct Detection {
    std::string id;        // constant identifier
    std::string image_id;
    Eigen::VectorXd scores;            // length |P1|
    Box box;
    std::set<std::string> gold_labels;

    void validate(const Signature& sig) const;
};

/// Box feature vector (length |P1| + 4): one-hot score block followed by
/// the corner coordinates affinely mapped from [0, image_dim] to [-1, 1].
Eigen::VectorXd box_feature_vector(const Detection& d, double img_w, double img_h);

/// Joint feature vector for an ordered pair of boxes, length 2(|P1|+4) + 7:
/// the two box feature vectors stacked, then
///   ir(b1,b2), ir(b2,b1),
///   area-ratio features 2r/(1+r) - 1 for r = area1/area2 and its inverse,
///   centroid distance over the image diagonal mapped through 2t - 1,
///   sin and cos of the centroid-to-centroid angle, counter-clockwise in a
///   y-up frame (both zero when the centroids coincide).
/// Every entry lies in [-1, 1].
Eigen::VectorXd pair_features(const Detection& d1, const Detection& d2, double img_w,
                              double img_h);

/// The seven joint features alone (appended by pair_features).
Eigen::VectorXd joint_features(const Box& b1, const Box& b2, double img_w, double img_h);

inline int box_feature_dim(const Signature& sig) {
    return static_cast<int>(sig.unary_predicates().size()) + 4;
}
inline int pair_feature_dim(const Signature& sig) { return 2 * box_feature_dim(sig) + 7; }

}  // namespace vrel
