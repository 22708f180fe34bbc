#include "vrel/features.hpp"

#include <cmath>
#include <stdexcept>

#include "vrel/ntn.hpp"

namespace vrel {

double intersection_area(const Box& a, const Box& b) {
    double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

Box union_box(const Box& a, const Box& b) {
    return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
            std::max(a.y1, b.y1)};
}

double inclusion_ratio(const Box& b1, const Box& b2) {
    if (b1.area() <= 0.0) throw std::invalid_argument("inclusion_ratio: zero-area box");
    return intersection_area(b1, b2) / b1.area();
}

void Detection::validate(const Signature& sig) const {
    if (!box.valid())
        throw std::invalid_argument("degenerate box for detection " + id);
    if (scores.size() != static_cast<Eigen::Index>(sig.unary_predicates().size()))
        throw std::invalid_argument("score vector length mismatch for detection " + id);
    if (!scores.allFinite())
        throw std::invalid_argument("non-finite scores for detection " + id);
    for (const std::string& label : gold_labels)
        if (!sig.is_unary(label))
            throw std::invalid_argument("unknown class label '" + label + "' on " + id);
}

namespace {

inline double to_unit_range(double value, double extent) { return 2.0 * (value / extent) - 1.0; }

// Bounded monotone map for an area ratio r in (0, inf): 2r/(1+r) - 1.
inline double ratio_feature(double r) { return 2.0 * r / (1.0 + r) - 1.0; }

}  // namespace

Eigen::VectorXd box_feature_vector(const Detection& d, double img_w, double img_h) {
    if (!d.box.valid()) throw std::invalid_argument("degenerate box for detection " + d.id);
    if (!(img_w > 0.0) || !(img_h > 0.0)) throw std::invalid_argument("invalid image size");
    const Eigen::Index n = d.scores.size();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 4);
    f(static_cast<Eigen::Index>(argmax_lowest(d.scores))) = 1.0;  // one-hot score block
    f(n + 0) = to_unit_range(d.box.x0, img_w);
    f(n + 1) = to_unit_range(d.box.y0, img_h);
    f(n + 2) = to_unit_range(d.box.x1, img_w);
    f(n + 3) = to_unit_range(d.box.y1, img_h);
    return f;
}

Eigen::VectorXd joint_features(const Box& b1, const Box& b2, double img_w, double img_h) {
    Eigen::VectorXd j(7);
    j(0) = inclusion_ratio(b1, b2);
    j(1) = inclusion_ratio(b2, b1);
    j(2) = ratio_feature(b1.area() / b2.area());
    j(3) = ratio_feature(b2.area() / b1.area());
    const double dx = b2.cx() - b1.cx();
    const double dy_up = -(b2.cy() - b1.cy());  // y-up frame
    const double dist = std::hypot(dx, dy_up);
    const double diag = std::hypot(img_w, img_h);
    j(4) = 2.0 * (dist / diag) - 1.0;
    if (dist > 0.0) {
        j(5) = dy_up / dist;  // sin
        j(6) = dx / dist;     // cos
    } else {
        j(5) = 0.0;  // coincident centroids carry no direction
        j(6) = 0.0;
    }
    return j;
}

Eigen::VectorXd pair_features(const Detection& d1, const Detection& d2, double img_w,
                              double img_h) {
    if (d1.image_id != d2.image_id)
        throw std::invalid_argument("pair features across images: " + d1.id + ", " + d2.id);
    Eigen::VectorXd f1 = box_feature_vector(d1, img_w, img_h);
    Eigen::VectorXd f2 = box_feature_vector(d2, img_w, img_h);
    Eigen::VectorXd out(f1.size() + f2.size() + 7);
    out << f1, f2, joint_features(d1.box, d2.box, img_w, img_h);
    return out;
}

}  // namespace vrel
