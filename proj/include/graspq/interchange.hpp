#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspq/detector.hpp"
#include "graspq/error.hpp"
#include "graspq/hand.hpp"

// JSON interchange files. Units are meters and radians; quaternions are (w, x, y, z).
//
// Sequence:
//   {sequence_id, subject_id, object_id, object_mesh,
//    hand_shape{global_scale, segment_scales[15], finger_radii[5], palm_radius?},
//    frames[{index, hand_pose[48], hand_trans[3],
//            object_pose{rotation[4], translation[3]}, gt_contact?}]}
//
// Scene (single frame for `graspq detect`):
//   {object_id, object_mesh, hand_shape, hand_pose[48], hand_trans[3], object_pose}

namespace graspq {

using nlohmann::json;

struct SequenceFrame {
    int index = 0;
    HandPose hand_pose;
    Pose object_pose;
    std::optional<bool> gt_contact;
};

struct Sequence {
    std::string sequence_id;
    std::string subject_id;
    std::string object_id;
    std::string object_mesh;
    HandShape hand_shape;
    std::vector<SequenceFrame> frames;

    bool has_ground_truth() const {
        return !frames.empty() &&
               std::all_of(frames.begin(), frames.end(), [](const SequenceFrame& f) { return f.gt_contact.has_value(); });
    }
};

struct Scene {
    std::string object_id;
    std::string object_mesh;
    FrameInput frame;
};

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError((path.empty() ? key : path + "." + key) + ": missing field");
    return *it;
}

inline std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path + ": not finite");
    return v;
}

inline std::vector<double> numbers(const json& j, const std::string& path, std::size_t expected) {
    if (!j.is_array()) throw ParseError(path + ": expected an array of " + std::to_string(expected) + " numbers");
    if (j.size() != expected)
        throw ParseError(path + ": expected " + std::to_string(expected) + " numbers, got " + std::to_string(j.size()));
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Vec3 vec3(const json& j, const std::string& path) {
    const auto v = numbers(j, path, 3);
    return {v[0], v[1], v[2]};
}

/// Ids are opaque; integers are accepted and kept as their decimal text.
inline std::string id_string(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParseError(path + ": expected a string id");
}

inline std::string string_field(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) throw ParseError(join_path(path, key) + ": expected a string");
    return v.get<std::string>();
}

inline HandShape parse_hand_shape(const json& j, const std::string& path) {
    HandShape s;
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    if (j.contains("global_scale")) s.global_scale = number(j["global_scale"], path + ".global_scale");
    if (j.contains("segment_scales")) {
        const auto v = numbers(j["segment_scales"], path + ".segment_scales", kJointCount);
        std::copy(v.begin(), v.end(), s.segment_scales.begin());
    }
    if (j.contains("finger_radii")) {
        const auto v = numbers(j["finger_radii"], path + ".finger_radii", 5);
        std::copy(v.begin(), v.end(), s.finger_radii.begin());
    }
    if (j.contains("palm_radius")) s.palm_radius = number(j["palm_radius"], path + ".palm_radius");
    try {
        s.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(path + ": " + e.what());
    }
    return s;
}

inline Pose parse_pose(const json& j, const std::string& path) {
    const auto q = numbers(require(j, "rotation", path), path + ".rotation", 4);
    const Vec3 t = vec3(require(j, "translation", path), path + ".translation");
    const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (!(norm > 1e-12)) throw ParseError(path + ".rotation: zero quaternion");
    return Pose::from_wxyz({q[0], q[1], q[2], q[3]}, t);
}

inline HandPose parse_hand_pose(const json& owner, const std::string& path) {
    HandPose p;
    p.theta = numbers(require(owner, "hand_pose", path), join_path(path, "hand_pose"), kPoseSize);
    p.wrist_translation = vec3(require(owner, "hand_trans", path), join_path(path, "hand_trans"));
    try {
        p.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(join_path(path, "hand_pose") + ": " + e.what());
    }
    return p;
}

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json pose_json(const Pose& p) {
    const auto& q = p.rotation();
    return {{"rotation", json::array({q.w(), q.x(), q.y(), q.z()})}, {"translation", vec_json(p.translation())}};
}

inline json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace detail

inline json hand_shape_to_json(const HandShape& s) {
    return {{"global_scale", s.global_scale},
            {"segment_scales", s.segment_scales},
            {"finger_radii", s.finger_radii},
            {"palm_radius", s.palm_radius}};
}

inline Sequence parse_sequence(const json& j) {
    Sequence s;
    if (!j.is_object()) throw ParseError("sequence: expected a JSON object");
    s.sequence_id = detail::id_string(detail::require(j, "sequence_id", ""), "sequence_id");
    s.subject_id = detail::id_string(detail::require(j, "subject_id", ""), "subject_id");
    s.object_id = detail::id_string(detail::require(j, "object_id", ""), "object_id");
    s.object_mesh = detail::string_field(j, "object_mesh", "");
    s.hand_shape = j.contains("hand_shape") ? detail::parse_hand_shape(j["hand_shape"], "hand_shape") : HandShape{};
    const json& frames = detail::require(j, "frames", "");
    if (!frames.is_array()) throw ParseError("frames: expected an array");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string path = "frames[" + std::to_string(i) + "]";
        const json& f = frames[i];
        SequenceFrame fr;
        const json& idx = detail::require(f, "index", path);
        if (!idx.is_number_integer()) throw ParseError(path + ".index: expected an integer");
        fr.index = idx.get<int>();
        if (!s.frames.empty() && fr.index <= s.frames.back().index)
            throw ParseError(path + ".index: frame indices must be strictly increasing");
        fr.hand_pose = detail::parse_hand_pose(f, path);
        fr.object_pose = detail::parse_pose(detail::require(f, "object_pose", path), path + ".object_pose");
        if (f.contains("gt_contact") && !f["gt_contact"].is_null()) {
            const json& gt = f["gt_contact"];
            if (gt.is_boolean()) fr.gt_contact = gt.get<bool>();
            else if (gt.is_number_integer() && (gt.get<int>() == 0 || gt.get<int>() == 1)) fr.gt_contact = gt.get<int>() == 1;
            else throw ParseError(path + ".gt_contact: expected a boolean");
        }
        s.frames.push_back(std::move(fr));
    }
    return s;
}

inline Sequence load_sequence(const std::string& path) {
    const json j = detail::parse_file(path);
    try {
        return parse_sequence(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline json sequence_to_json(const Sequence& s) {
    json frames = json::array();
    for (const auto& f : s.frames) {
        json fj = {{"index", f.index},
                   {"hand_pose", f.hand_pose.theta},
                   {"hand_trans", detail::vec_json(f.hand_pose.wrist_translation)},
                   {"object_pose", detail::pose_json(f.object_pose)}};
        if (f.gt_contact) fj["gt_contact"] = *f.gt_contact;
        frames.push_back(std::move(fj));
    }
    return {{"sequence_id", s.sequence_id}, {"subject_id", s.subject_id},   {"object_id", s.object_id},
            {"object_mesh", s.object_mesh}, {"hand_shape", hand_shape_to_json(s.hand_shape)}, {"frames", frames}};
}

inline Scene parse_scene(const json& j) {
    if (!j.is_object()) throw ParseError("scene: expected a JSON object");
    Scene s;
    s.object_id = detail::id_string(detail::require(j, "object_id", ""), "object_id");
    s.object_mesh = detail::string_field(j, "object_mesh", "");
    s.frame.object_mesh_id = s.object_id;
    s.frame.hand_shape = j.contains("hand_shape") ? detail::parse_hand_shape(j["hand_shape"], "hand_shape") : HandShape{};
    s.frame.hand_pose = detail::parse_hand_pose(j, "");
    s.frame.object_pose = detail::parse_pose(detail::require(j, "object_pose", ""), "object_pose");
    return s;
}

inline Scene load_scene(const std::string& path) {
    const json j = detail::parse_file(path);
    try {
        return parse_scene(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline json scene_to_json(const Scene& s) {
    return {{"object_id", s.object_id},
            {"object_mesh", s.object_mesh},
            {"hand_shape", hand_shape_to_json(s.frame.hand_shape)},
            {"hand_pose", s.frame.hand_pose.theta},
            {"hand_trans", detail::vec_json(s.frame.hand_pose.wrist_translation)},
            {"object_pose", detail::pose_json(s.frame.object_pose)}};
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

/// Resolves a mesh reference: absolute paths as-is, then the mesh directory, then the
/// directory of the referencing file.
inline std::string resolve_mesh_path(const std::string& mesh, const std::string& mesh_dir,
                                     const std::string& referencing_file) {
    namespace fs = std::filesystem;
    const fs::path p(mesh);
    if (p.is_absolute()) return p.string();
    if (!mesh_dir.empty() && fs::exists(fs::path(mesh_dir) / p)) return (fs::path(mesh_dir) / p).string();
    const fs::path beside = fs::path(referencing_file).parent_path() / p;
    if (fs::exists(beside)) return beside.string();
    if (!mesh_dir.empty()) return (fs::path(mesh_dir) / p).string();
    return beside.string();
}

}  // namespace graspq
