#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "vrel/annotations.hpp"
#include "vrel/metrics.hpp"
#include "vrel/ntn.hpp"

// Seeded synthetic scene generators used by the trainer tests and the
// acceptance suite. Gold relations are deterministic functions of the
// generated box geometry (plus the scene's class layout), so a trained
// model can be scored against an exact ground truth.
namespace vrel::testdata {

/// Two purely geometric relations over randomly placed boxes:
///   above(x,y)  iff the centroid direction from x to y points down within
///               an 18-degree cone (sin <= -0.95 in the y-up frame);
///   inside(x,y) iff box x lies strictly inside box y.
/// Every image carries `boxes_per_image` boxes (two nested pairs included)
/// with one-hot class scores over five filler classes.
struct SpatialDataset {
    Signature sig;
    AnnotationSet train;
    AnnotationSet test;
};

SpatialDataset make_spatial_dataset(int train_images, int test_images, int boxes_per_image,
                                    std::uint64_t seed);

/// Scenes of persons, horses, elephants and cars with eight relations.
/// Class-restricted actions (ride, drive, carry, feed, wash, tow) follow
/// the scene layout; above and next_to follow geometry alone. Training
/// scenes never put a rider on an elephant; every test scene does, so
/// (person, ride, elephant) is the held-out triple type. The constraint
/// text carries the negative domain/range rules that exclude the
/// class-incompatible competitors (a car cannot be ridden, an elephant
/// cannot be driven or towed, ...).
struct ZeroShotDataset {
    Signature sig;
    AnnotationSet train;
    AnnotationSet test;
    std::string constraints_text;
};

ZeroShotDataset make_zero_shot_dataset(int train_images, int test_images, std::uint64_t seed);

/// Predicate-detection recall@K of a trained model over a test split,
/// optionally restricted to ground-truth types absent from
/// `training_types`.
double predicate_detection_recall(const Theta& theta, const Signature& sig,
                                  const AnnotationSet& test, const PriorTable& prior, int K,
                                  const std::set<std::string>* zero_shot_types = nullptr);

/// Serializes a split in the annotation-file schema the loader reads.
std::string annotations_to_json(const AnnotationSet& set);

}  // namespace vrel::testdata
