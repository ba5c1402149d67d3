#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspq/error.hpp"
#include "graspq/geometry.hpp"

// Right-hand skeleton with 21 landmarks.
//
// Rest frame: wrist at the origin, fingers along +y, palm normal +z, thumb
// toward +x. Positive rotation about +x flexes a straight finger toward +z.
//
// Landmark order (thumb first):
//   0 wrist
//   1-4   thumb  CMC, MCP, IP, tip
//   5-8   index  MCP, PIP, DIP, tip
//   9-12  middle MCP, PIP, DIP, tip
//   13-16 ring   MCP, PIP, DIP, tip
//   17-20 little MCP, PIP, DIP, tip
//
// Pose vectors follow the MANO joint order instead: root, then index,
// middle, little, ring, thumb with three joints each.

namespace graspq {

inline constexpr int kLandmarkCount = 21;
inline constexpr int kJointCount = 15;
inline constexpr int kPoseSize = 3 + 3 * kJointCount;

enum class Finger { thumb = 0, index = 1, middle = 2, ring = 3, little = 4 };

inline constexpr std::array<std::string_view, kLandmarkCount> kLandmarkNames = {
    "wrist",      "thumb_cmc",  "thumb_mcp",  "thumb_ip",   "thumb_tip",  "index_mcp",  "index_pip",
    "index_dip",  "index_tip",  "middle_mcp", "middle_pip", "middle_dip", "middle_tip", "ring_mcp",
    "ring_pip",   "ring_dip",   "ring_tip",   "little_mcp", "little_pip", "little_dip", "little_tip"};

/// Parent landmark of each landmark; -1 for the wrist.
inline constexpr std::array<int, kLandmarkCount> kLandmarkParent = {-1, 0,  1,  2,  3,  0,  5,  6,  7,  0, 9,
                                                                    10, 11, 0, 13, 14, 15, 0, 17, 18, 19};

/// Landmark at which articulated joint j (MANO order) sits.
inline constexpr std::array<int, kJointCount> kJointLandmark = {5, 6, 7, 9, 10, 11, 17, 18, 19, 13, 14, 15, 1, 2, 3};

/// Joint whose rotation owns landmark l, i.e. the inverse of kJointLandmark; -1 for wrist and tips.
inline constexpr std::array<int, kLandmarkCount> kLandmarkJoint = {-1, 12, 13, 14, -1, 0, 1, 2, -1, 3, 4,
                                                                   5,  -1, 9,  10, 11, -1, 6, 7, 8, -1};

inline int landmark_index(std::string_view name) {
    for (int i = 0; i < kLandmarkCount; ++i)
        if (kLandmarkNames[i] == name) return i;
    return -1;
}

/// Stand-in for per-subject hand shape: scales on the skeleton plus capsule radii.
struct HandShape {
    double global_scale = 1.0;
    /// Scale of the bone leaving articulated joint j (MANO joint order).
    std::array<double, kJointCount> segment_scales = filled(1.0);
    /// Thumb, index, middle, ring, little.
    std::array<double, 5> finger_radii = {0.010, 0.008, 0.008, 0.008, 0.008};
    double palm_radius = 0.012;

    void validate() const {
        if (!(global_scale > 0) || !std::isfinite(global_scale))
            throw InvalidInput("hand_shape.global_scale must be > 0");
        for (std::size_t j = 0; j < segment_scales.size(); ++j)
            if (!(segment_scales[j] > 0) || !std::isfinite(segment_scales[j]))
                throw InvalidInput("hand_shape.segment_scales[" + std::to_string(j) + "] must be > 0");
        for (std::size_t f = 0; f < finger_radii.size(); ++f)
            if (!(finger_radii[f] > 0 && finger_radii[f] < 0.05))
                throw InvalidInput("hand_shape.finger_radii[" + std::to_string(f) + "] must lie in (0, 0.05) m");
        if (!(palm_radius > 0 && palm_radius < 0.05)) throw InvalidInput("hand_shape.palm_radius must lie in (0, 0.05) m");
    }

private:
    static constexpr std::array<double, kJointCount> filled(double v) {
        std::array<double, kJointCount> a{};
        for (auto& x : a) x = v;
        return a;
    }
};

/// 48 axis-angle values (root first) plus the wrist translation.
struct HandPose {
    std::vector<double> theta = std::vector<double>(kPoseSize, 0.0);
    Vec3 wrist_translation = Vec3::Zero();

    Vec3 axis_angle(int slot) const { return {theta[3 * slot], theta[3 * slot + 1], theta[3 * slot + 2]}; }

    void validate() const {
        if (theta.size() != static_cast<std::size_t>(kPoseSize))
            throw InvalidInput("hand pose must have " + std::to_string(kPoseSize) + " values, got " +
                               std::to_string(theta.size()));
        for (double v : theta)
            if (!std::isfinite(v)) throw InvalidInput("hand pose contains a non-finite value");
        for (int s = 0; s <= kJointCount; ++s)
            if (axis_angle(s).norm() >= 3.14159265358979323846 + 1e-6)
                throw InvalidInput("hand pose axis-angle " + std::to_string(s) + " has magnitude >= pi");
        if (!wrist_translation.allFinite()) throw InvalidInput("wrist translation is not finite");
    }
};

struct HandLandmarks {
    std::array<Vec3, kLandmarkCount> positions;

    const Vec3& operator[](int i) const { return positions[i]; }
    const Vec3& at(std::string_view name) const {
        const int i = landmark_index(name);
        if (i < 0) throw InvalidInput("unknown landmark '" + std::string(name) + "'");
        return positions[i];
    }
};

/// Rest offsets of each landmark relative to its parent, in meters.
struct RestSkeleton {
    std::array<Vec3, kLandmarkCount> offsets;

    /// Average-adult proportions; middle finger chain 0.095 m.
    static RestSkeleton standard() {
        RestSkeleton s;
        const Vec3 thumb_dir(0.8, 0.6, 0.0);
        s.offsets = {
            Vec3(0, 0, 0),
            Vec3(0.020, 0.020, 0), thumb_dir * 0.040, thumb_dir * 0.032, thumb_dir * 0.027,
            Vec3(0.025, 0.085, 0), Vec3(0, 0.040, 0), Vec3(0, 0.025, 0), Vec3(0, 0.020, 0),
            Vec3(0.003, 0.090, 0), Vec3(0, 0.045, 0), Vec3(0, 0.028, 0), Vec3(0, 0.022, 0),
            Vec3(-0.018, 0.085, 0), Vec3(0, 0.042, 0), Vec3(0, 0.027, 0), Vec3(0, 0.021, 0),
            Vec3(-0.037, 0.075, 0), Vec3(0, 0.032, 0), Vec3(0, 0.020, 0), Vec3(0, 0.019, 0),
        };
        return s;
    }

    /// Rest landmark positions (offsets accumulated along the parent chain).
    std::array<Vec3, kLandmarkCount> positions() const {
        std::array<Vec3, kLandmarkCount> p;
        for (int i = 0; i < kLandmarkCount; ++i)
            p[i] = kLandmarkParent[i] < 0 ? offsets[i] : Vec3(p[kLandmarkParent[i]] + offsets[i]);
        return p;
    }

    /// Offset of landmark i after applying the hand shape scales.
    Vec3 scaled_offset(int i, const HandShape& shape) const {
        const int parent = kLandmarkParent[i];
        double scale = shape.global_scale;
        if (parent >= 0 && kLandmarkJoint[parent] >= 0) scale *= shape.segment_scales[kLandmarkJoint[parent]];
        return offsets[i] * scale;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        for (int i = 0; i < kLandmarkCount; ++i) {
            const std::string name(kLandmarkNames[i]);
            j["offsets"][name] = {offsets[i].x(), offsets[i].y(), offsets[i].z()};
            j["parents"][name] = kLandmarkParent[i] < 0 ? nlohmann::json(nullptr)
                                                        : nlohmann::json(std::string(kLandmarkNames[kLandmarkParent[i]]));
        }
        return j;
    }

    /// Parses {"offsets": {name: [x,y,z]}, "parents": {name: parent|null}}. The parent map
    /// must match the fixed topology.
    static RestSkeleton from_json(const nlohmann::json& j) {
        RestSkeleton s;
        if (!j.is_object() || !j.contains("offsets") || !j.contains("parents"))
            throw ParseError("rest skeleton: expected object with 'offsets' and 'parents'");
        for (int i = 0; i < kLandmarkCount; ++i) {
            const std::string name(kLandmarkNames[i]);
            const auto& off = j["offsets"];
            if (!off.contains(name)) throw ParseError("rest skeleton: offsets." + name + " missing");
            const auto& v = off[name];
            if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
                throw ParseError("rest skeleton: offsets." + name + " must be 3 numbers");
            s.offsets[i] = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
            const auto& par = j["parents"];
            if (!par.contains(name)) throw ParseError("rest skeleton: parents." + name + " missing");
            const int expected = kLandmarkParent[i];
            const bool ok = expected < 0 ? par[name].is_null()
                                         : (par[name].is_string() &&
                                            par[name].get<std::string>() == kLandmarkNames[expected]);
            if (!ok) throw ParseError("rest skeleton: parents." + name + " does not match the hand topology");
        }
        return s;
    }

    static RestSkeleton load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open rest skeleton '" + path + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        return from_json(j);
    }
};

namespace detail {

inline Eigen::Quaterniond quat_from_axis_angle(const Vec3& aa) {
    const double angle = aa.norm();
    if (angle == 0.0) return Eigen::Quaterniond::Identity();
    return Eigen::Quaterniond(Eigen::AngleAxisd(angle, aa / angle));
}

}  // namespace detail

/// Composes joint rotations root-to-tip, each in its parent's frame, then applies the
/// root rotation about the wrist and the wrist translation.
inline HandLandmarks forward_kinematics(const HandShape& shape, const HandPose& pose,
                                        const RestSkeleton& skeleton = RestSkeleton::standard()) {
    pose.validate();
    shape.validate();
    HandLandmarks out;
    std::array<Eigen::Quaterniond, kLandmarkCount> frame;
    frame[0] = detail::quat_from_axis_angle(pose.axis_angle(0));
    out.positions[0] = pose.wrist_translation + skeleton.offsets[0] * shape.global_scale;
    for (int i = 1; i < kLandmarkCount; ++i) {
        const int parent = kLandmarkParent[i];
        out.positions[i] = out.positions[parent] + frame[parent] * skeleton.scaled_offset(i, shape);
        const int joint = kLandmarkJoint[i];
        frame[i] = joint >= 0 ? Eigen::Quaterniond(frame[parent] * detail::quat_from_axis_angle(pose.axis_angle(joint + 1)))
                              : frame[parent];
    }
    return out;
}

struct Capsule {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    double radius = 0.0;
    std::string_view label;

    Vec3 point_at(double t) const { return a + t * (b - a); }
    double length() const { return (b - a).norm(); }

    /// Distance from x to the capsule axis segment.
    double axis_distance(const Vec3& x) const {
        const Vec3 d = b - a;
        const double len2 = d.squaredNorm();
        const double t = len2 > 0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        return (x - point_at(t)).norm();
    }
};

struct HandProxies {
    std::vector<Capsule> capsules;
};

struct CapsuleSpec {
    int from;
    int to;
    int finger;  // index into finger_radii, or -1 for the palm radius
    std::string_view label;
};

/// Fixed proxy topology: 14 phalanges, 5 wrist-to-MCP palm capsules, one knuckle capsule.
inline constexpr std::array<CapsuleSpec, 20> kCapsuleTopology = {{
    {2, 3, 0, "thumb_proximal"},  {3, 4, 0, "thumb_distal"},
    {5, 6, 1, "index_proximal"},  {6, 7, 1, "index_middle"},   {7, 8, 1, "index_distal"},
    {9, 10, 2, "middle_proximal"}, {10, 11, 2, "middle_middle"}, {11, 12, 2, "middle_distal"},
    {13, 14, 3, "ring_proximal"},  {14, 15, 3, "ring_middle"},   {15, 16, 3, "ring_distal"},
    {17, 18, 4, "little_proximal"}, {18, 19, 4, "little_middle"}, {19, 20, 4, "little_distal"},
    {0, 2, -1, "palm_thumb"},      {0, 5, -1, "palm_index"},     {0, 9, -1, "palm_middle"},
    {0, 13, -1, "palm_ring"},      {0, 17, -1, "palm_little"},   {5, 17, -1, "knuckles"},
}};

inline HandProxies build_hand_proxies(const HandLandmarks& landmarks, const HandShape& shape) {
    HandProxies proxies;
    proxies.capsules.reserve(kCapsuleTopology.size());
    for (const auto& spec : kCapsuleTopology) {
        const double r = spec.finger < 0 ? shape.palm_radius : shape.finger_radii[spec.finger];
        proxies.capsules.push_back({landmarks[spec.from], landmarks[spec.to], r, spec.label});
    }
    return proxies;
}

}  // namespace graspq
