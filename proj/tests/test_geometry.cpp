#include <doctest.h>

#include <random>

#include "vrel/features.hpp"

using namespace vrel;

namespace {

Signature two_class_sig() { return Signature({"A", "B"}, {"r"}); }

Detection make_det(std::string id, Eigen::VectorXd scores, Box box,
                   std::string image = "img") {
    Detection d;
    d.id = std::move(id);
    d.image_id = std::move(image);
    d.scores = std::move(scores);
    d.box = box;
    return d;
}

Eigen::VectorXd scores2(double a, double b) {
    Eigen::VectorXd s(2);
    s << a, b;
    return s;
}

}  // namespace

TEST_CASE("box feature vector: one-hot block plus mapped corners") {
    const double w = 640, h = 480;
    Detection full = make_det("b1", scores2(0.2, 0.8), {0, 0, w, h});
    Eigen::VectorXd f = box_feature_vector(full, w, h);
    REQUIRE(f.size() == 6);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == 1.0);
    CHECK(f(2) == -1.0);
    CHECK(f(3) == -1.0);
    CHECK(f(4) == 1.0);
    CHECK(f(5) == 1.0);

    Detection centered = make_det("b2", scores2(0.9, 0.1), {w / 4, h / 4, 3 * w / 4, 3 * h / 4});
    Eigen::VectorXd g = box_feature_vector(centered, w, h);
    CHECK(g(2) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g(3) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g(4) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g(5) == doctest::Approx(0.5).epsilon(1e-12));

    Detection tie = make_det("b3", scores2(0.5, 0.5), {1, 1, 2, 2});
    Eigen::VectorXd t = box_feature_vector(tie, w, h);
    CHECK(t(0) == 1.0);  // tie resolves to the lowest index
    CHECK(t(1) == 0.0);

    Detection degenerate = make_det("b4", scores2(1, 0), {5, 5, 5, 9});
    CHECK_THROWS_AS(box_feature_vector(degenerate, w, h), std::invalid_argument);
}

TEST_CASE("inclusion ratio") {
    Box b1{0, 0, 10, 10};
    Box b2{0, 0, 20, 20};
    CHECK(inclusion_ratio(b1, b2) == doctest::Approx(1.0));
    CHECK(inclusion_ratio(b2, b1) == doctest::Approx(0.25));
    CHECK(inclusion_ratio(b1, Box{50, 50, 60, 60}) == 0.0);
}

TEST_CASE("pair features on the worked examples") {
    const double w = 100, h = 100;
    SUBCASE("identical boxes") {
        Detection d1 = make_det("b1", scores2(1, 0), {10, 10, 30, 30});
        Detection d2 = make_det("b2", scores2(0, 1), {10, 10, 30, 30});
        Eigen::VectorXd f = pair_features(d1, d2, w, h);
        REQUIRE(f.size() == 2 * 6 + 7);
        const int joint = 12;
        CHECK(f(joint + 0) == doctest::Approx(1.0));   // ir(b1,b2)
        CHECK(f(joint + 1) == doctest::Approx(1.0));   // ir(b2,b1)
        CHECK(f(joint + 2) == doctest::Approx(0.0));   // ratio r=1 maps to 0
        CHECK(f(joint + 3) == doctest::Approx(0.0));
        CHECK(f(joint + 4) == doctest::Approx(-1.0));  // coincident centroids
        CHECK(f(joint + 5) == 0.0);                    // sin
        CHECK(f(joint + 6) == 0.0);                    // cos
    }
    SUBCASE("diagonal displacement uses the y-up angle convention") {
        Detection d1 = make_det("b1", scores2(1, 0), {0, 0, 10, 10});    // centroid (5,5)
        Detection d2 = make_det("b2", scores2(1, 0), {5, 5, 15, 15});    // centroid (10,10)
        Eigen::VectorXd f = pair_features(d1, d2, w, h);
        const int joint = 12;
        CHECK(f(joint + 4) == doctest::Approx(-0.9).epsilon(1e-9));
        CHECK(f(joint + 5) == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));  // sin
        CHECK(f(joint + 6) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));   // cos
    }
    SUBCASE("area ratio mapping") {
        Detection d1 = make_det("b1", scores2(1, 0), {0, 0, 10, 10});    // area 100
        Detection d2 = make_det("b2", scores2(1, 0), {20, 20, 40, 40});  // area 400
        Eigen::VectorXd f = pair_features(d1, d2, w, h);
        const int joint = 12;
        CHECK(f(joint + 2) == doctest::Approx(-0.6).epsilon(1e-12));
        CHECK(f(joint + 3) == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("cross-image pairs are rejected") {
        Detection d1 = make_det("b1", scores2(1, 0), {0, 0, 10, 10}, "imgA");
        Detection d2 = make_det("b2", scores2(1, 0), {0, 0, 10, 10}, "imgB");
        CHECK_THROWS_AS(pair_features(d1, d2, w, h), std::invalid_argument);
    }
}

namespace {

Box random_box(std::mt19937_64& rng, double w, double h) {
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
    double x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    if (x1 - x0 < 1e-3) x1 = std::min(w, x0 + 1.0);
    if (y1 - y0 < 1e-3) y1 = std::min(h, y0 + 1.0);
    return {x0, y0, x1, y1};
}

}  // namespace

TEST_CASE("all pair features lie in [-1,1] under box fuzz") {
    std::mt19937_64 rng(31);
    const double w = 800, h = 600;
    for (int i = 0; i < 10000; ++i) {
        Detection d1 = make_det("b1", scores2(0.3, 0.7), random_box(rng, w, h));
        Detection d2 = make_det("b2", scores2(0.6, 0.4), random_box(rng, w, h));
        Eigen::VectorXd f = pair_features(d1, d2, w, h);
        CHECK(f.minCoeff() >= -1.0 - 1e-12);
        CHECK(f.maxCoeff() <= 1.0 + 1e-12);
        // sin^2 + cos^2 is 1, or 0 for coincident centroids
        const double s = f(12 + 5), c = f(12 + 6);
        const double norm = s * s + c * c;
        CHECK((std::abs(norm - 1.0) < 1e-9 || norm == 0.0));
    }
}

TEST_CASE("inclusion-ratio consistency identity") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 2000; ++i) {
        Box b1 = random_box(rng, 500, 500);
        Box b2 = random_box(rng, 500, 500);
        const double inter = intersection_area(b1, b2);
        CHECK(inclusion_ratio(b1, b2) * b1.area() == doctest::Approx(inter).epsilon(1e-9));
        CHECK(inclusion_ratio(b2, b1) * b2.area() == doctest::Approx(inter).epsilon(1e-9));
    }
}

TEST_CASE("swapping the pair swaps ir/ratio blocks and negates the angle") {
    std::mt19937_64 rng(123);
    const double w = 640, h = 480;
    for (int i = 0; i < 2000; ++i) {
        Detection d1 = make_det("b1", scores2(1, 0), random_box(rng, w, h));
        Detection d2 = make_det("b2", scores2(0, 1), random_box(rng, w, h));
        Eigen::VectorXd f12 = joint_features(d1.box, d2.box, w, h);
        Eigen::VectorXd f21 = joint_features(d2.box, d1.box, w, h);
        CHECK(f12(0) == doctest::Approx(f21(1)).epsilon(1e-12));
        CHECK(f12(1) == doctest::Approx(f21(0)).epsilon(1e-12));
        CHECK(f12(2) == doctest::Approx(f21(3)).epsilon(1e-12));
        CHECK(f12(3) == doctest::Approx(f21(2)).epsilon(1e-12));
        CHECK(f12(4) == doctest::Approx(f21(4)).epsilon(1e-12));
        CHECK(f12(5) == doctest::Approx(-f21(5)).epsilon(1e-12));
        CHECK(f12(6) == doctest::Approx(-f21(6)).epsilon(1e-12));
    }
}

TEST_CASE("joint features are translation invariant") {
    std::mt19937_64 rng(321);
    const double w = 1000, h = 1000;
    std::uniform_real_distribution<double> shift(0.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        Box b1 = random_box(rng, 500, 500);
        Box b2 = random_box(rng, 500, 500);
        const double dx = shift(rng), dy = shift(rng);
        Box b1s{b1.x0 + dx, b1.y0 + dy, b1.x1 + dx, b1.y1 + dy};
        Box b2s{b2.x0 + dx, b2.y0 + dy, b2.x1 + dx, b2.y1 + dy};
        Eigen::VectorXd f = joint_features(b1, b2, w, h);
        Eigen::VectorXd g = joint_features(b1s, b2s, w, h);
        for (int j = 0; j < 7; ++j) CHECK(f(j) == doctest::Approx(g(j)).epsilon(1e-9));
    }
}
