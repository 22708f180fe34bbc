#include "vrel/annotations.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "vrel/ntn.hpp"

namespace vrel {

using nlohmann::json;

const Detection& ImageAnnotation::detection(const std::string& box_id) const {
    for (const Detection& d : detections)
        if (d.id == box_id) return d;
    throw std::out_of_range("no detection '" + box_id + "' in image " + id);
}

bool ImageAnnotation::has_detection(const std::string& box_id) const {
    for (const Detection& d : detections)
        if (d.id == box_id) return true;
    return false;
}

std::string triple_type_key(const std::string& subject_class, const std::string& predicate,
                            const std::string& object_class) {
    return subject_class + "|" + predicate + "|" + object_class;
}

const std::string& detection_class(const Detection& d, const Signature& sig) {
    return sig.unary_predicates().at(argmax_lowest(d.scores));
}

std::set<std::string> AnnotationSet::triple_types(const Signature& sig) const {
    std::set<std::string> types;
    for (const ImageAnnotation& img : images)
        for (const Relationship& r : img.relationships)
            types.insert(triple_type_key(detection_class(img.detection(r.subject_id), sig),
                                         r.predicate,
                                         detection_class(img.detection(r.object_id), sig)));
    return types;
}

std::size_t AnnotationSet::relationship_count() const {
    std::size_t n = 0;
    for (const ImageAnnotation& img : images) n += img.relationships.size();
    return n;
}

AnnotationSet parse_annotations(const std::string& json_text, const Signature& sig) {
    json root = json::parse(json_text);
    AnnotationSet set;
    for (const json& jimg : root.at("images")) {
        ImageAnnotation img;
        img.id = jimg.at("id").get<std::string>();
        img.width = jimg.at("width").get<double>();
        img.height = jimg.at("height").get<double>();
        if (!(img.width > 0) || !(img.height > 0))
            throw std::invalid_argument("image " + img.id + " has a non-positive size");
        std::unordered_map<std::string, bool> ids;
        for (const json& jd : jimg.value("detections", json::array())) {
            Detection d;
            d.id = jd.at("id").get<std::string>();
            d.image_id = img.id;
            const json& jb = jd.at("box");
            if (jb.size() != 4) throw std::invalid_argument("box must have 4 coordinates");
            d.box = {jb[0].get<double>(), jb[1].get<double>(), jb[2].get<double>(),
                     jb[3].get<double>()};
            const json& js = jd.at("scores");
            d.scores.resize(static_cast<Eigen::Index>(js.size()));
            for (std::size_t i = 0; i < js.size(); ++i)
                d.scores(static_cast<Eigen::Index>(i)) = js[i].get<double>();
            for (const json& jl : jd.value("labels", json::array()))
                d.gold_labels.insert(jl.get<std::string>());
            d.validate(sig);
            if (d.box.x0 < 0 || d.box.y0 < 0 || d.box.x1 > img.width || d.box.y1 > img.height)
                throw std::invalid_argument("box " + d.id + " lies outside image " + img.id);
            if (!ids.emplace(d.id, true).second)
                throw std::invalid_argument("duplicate box id " + d.id + " in image " + img.id);
            img.detections.push_back(std::move(d));
        }
        for (const json& jr : jimg.value("relationships", json::array())) {
            Relationship r{jr.at("sub").get<std::string>(), jr.at("pred").get<std::string>(),
                           jr.at("obj").get<std::string>()};
            if (!sig.is_binary(r.predicate))
                throw std::invalid_argument("unknown binary predicate '" + r.predicate + "'");
            if (!ids.count(r.subject_id) || !ids.count(r.object_id))
                throw std::invalid_argument("relationship in image " + img.id +
                                            " references a missing box");
            img.relationships.push_back(std::move(r));
        }
        set.images.push_back(std::move(img));
    }
    return set;
}

AnnotationSet load_annotations(const std::string& path, const Signature& sig) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open annotation file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_annotations(ss.str(), sig);
}

}  // namespace vrel
