#pragma once

#include <string>
#include <vector>

#include "vrel/ast.hpp"
#include "vrel/features.hpp"

namespace vrel {

struct Relationship {
    std::string subject_id;
    std::string predicate;
    std::string object_id;
};

struct ImageAnnotation {
    std::string id;
    double width = 0;
    double height = 0;
    std::vector<Detection> detections;
    std::vector<Relationship> relationships;

    const Detection& detection(const std::string& box_id) const;
    bool has_detection(const std::string& box_id) const;
};

struct AnnotationSet {
    std::vector<ImageAnnotation> images;

    /// Distinct (subject_class, predicate, object_class) label triples, with
    /// a box's class read from the argmax of its score vector.
    std::set<std::string> triple_types(const Signature& sig) const;

    std::size_t relationship_count() const;
};

std::string triple_type_key(const std::string& subject_class, const std::string& predicate,
                            const std::string& object_class);

/// Class label of a detection under the one-hot rule.
const std::string& detection_class(const Detection& d, const Signature& sig);

/// Loads a split from JSON:
///   {"images":[{"id":..., "width":..., "height":...,
///               "detections":[{"id":...,"box":[x0,y0,x1,y1],
///                              "scores":[...],"labels":[...]}],
///               "relationships":[{"sub":...,"pred":...,"obj":...}]}]}
/// Validates boxes (inside the image, positive area), score lengths,
/// labels, relationship endpoints and predicates against `sig`.
AnnotationSet load_annotations(const std::string& path, const Signature& sig);

AnnotationSet parse_annotations(const std::string& json_text, const Signature& sig);

}  // namespace vrel
