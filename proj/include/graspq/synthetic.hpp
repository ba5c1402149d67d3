#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "graspq/detector.hpp"
#include "graspq/geometry.hpp"
#include "graspq/hand.hpp"
#include "graspq/interchange.hpp"

// Analytically constructed scenes with known contact state.
//
// Pinch scenes clamp an object between the index and middle fingers of a flat hand so
// that both sides penetrate the finger capsules by the same amount. The sequences lower
// a wedge along the palm normal; its inclined faces meet the fingers face-on, so the
// contact onset follows from the plane distance alone.

namespace graspq::synthetic {

inline constexpr double kPi = 3.14159265358979323846;

/// Thin box placed between the index and middle fingers, in the hand root frame.
struct PinchGeometry {
    Vec3 half_extents = Vec3::Zero();
    Vec3 center = Vec3::Zero();  // box center at full insertion (finger plane)
    double axis_to_face = 0.0;   // distance from each finger axis to the facing box side
    double finger_radius = 0.0;
};

/// Box between index and middle fingers of the flat hand, penetrating each side by `penetration`.
inline PinchGeometry pinch_geometry(const HandShape& shape, double y_half, double z_half,
                                    double penetration = 0.00025,
                                    const RestSkeleton& skeleton = RestSkeleton::standard()) {
    HandPose flat;
    const HandLandmarks lm = forward_kinematics(shape, flat, skeleton);
    const Vec3& index_mcp = lm.at("index_mcp");
    const Vec3& middle_mcp = lm.at("middle_mcp");
    const double r_index = shape.finger_radii[static_cast<int>(Finger::index)];
    const double r_middle = shape.finger_radii[static_cast<int>(Finger::middle)];
    if (std::abs(r_index - r_middle) > 1e-12) throw InvalidInput("pinch geometry needs equal index/middle radii");
    const double gap_axes = index_mcp.x() - middle_mcp.x();
    const double face = r_index - penetration;
    if (!(gap_axes > 2 * face)) throw InvalidInput("index and middle fingers overlap; no room for a box");

    PinchGeometry g;
    g.finger_radius = r_index;
    g.axis_to_face = face;
    // Clear of the palm capsules near the knuckles, short of the index fingertip.
    const double y_lo = std::max(index_mcp.y(), middle_mcp.y()) + 0.02 * shape.global_scale;
    const double y_hi = lm.at("index_tip").y() - 0.005;
    if (!(y_hi - y_lo >= 2 * y_half)) throw InvalidInput("box too long for the finger overlap");
    g.half_extents = Vec3((gap_axes - 2 * face) / 2.0, y_half, z_half);
    g.center = Vec3((index_mcp.x() + middle_mcp.x()) / 2.0, (y_lo + y_hi) / 2.0, 0.0);
    return g;
}

/// Hand placed in the world by a root rotation and wrist translation.
struct HandPlacement {
    Vec3 root_axis_angle = Vec3::Zero();
    Vec3 wrist_translation = Vec3::Zero();

    Pose pose() const { return Pose::from_axis_angle(root_axis_angle, wrist_translation); }

    HandPose hand_pose(std::vector<double> articulation = {}) const {
        HandPose p;
        if (!articulation.empty()) p.theta = std::move(articulation);
        p.theta[0] = root_axis_angle.x();
        p.theta[1] = root_axis_angle.y();
        p.theta[2] = root_axis_angle.z();
        p.wrist_translation = wrist_translation;
        return p;
    }
};

/// Prism with a trapezoidal cross-section in x-z, narrow at the bottom, extruded along y.
struct WedgeShape {
    double bottom_half_width = 0.001;
    double top_half_width = 0.03;
    double half_length = 0.025;  // along y
    double height = 0.04;

    double inclination() const { return std::atan2(top_half_width - bottom_half_width, height); }
};

/// Box mesh with its x coordinates pinched to the wedge widths; keeps the box's winding.
inline TriangleMesh make_wedge(const WedgeShape& w) {
    TriangleMesh m = make_box(Vec3(1.0, w.half_length, w.height / 2));
    for (auto& v : m.vertices) {
        const double half = v.z() < 0 ? w.bottom_half_width : w.top_half_width;
        v.x() = v.x() < 0 ? -half : half;
    }
    m.finalize();
    return m;
}

/// Wedge lowered between the index and middle fingers of a flat hand. At full insertion
/// each inclined side face sits `penetration` inside the facing finger capsule.
struct WedgePinch {
    WedgeShape shape;
    Vec3 center = Vec3::Zero();  // wedge center at full insertion, hand root frame
    double face_distance = 0.0;  // finger axis to side plane at full insertion
    double finger_radius = 0.0;
    double penetration = 0.0;

    /// Rise above full insertion at which the side faces come within `tolerance` of the
    /// finger surfaces. The plane distance grows by sin(inclination) per unit rise.
    double onset_rise(double tolerance) const { return (tolerance + penetration) / std::sin(shape.inclination()); }
};

inline WedgePinch wedge_pinch(const HandShape& hand, const WedgeShape& w, double penetration = 0.00025,
                              double tolerance = ContactParams{}.tolerance,
                              const RestSkeleton& skeleton = RestSkeleton::standard()) {
    HandPose flat;
    const HandLandmarks lm = forward_kinematics(hand, flat, skeleton);
    const Vec3& index_mcp = lm.at("index_mcp");
    const Vec3& middle_mcp = lm.at("middle_mcp");
    const double r = hand.finger_radii[static_cast<int>(Finger::index)];
    if (std::abs(r - hand.finger_radii[static_cast<int>(Finger::middle)]) > 1e-12)
        throw InvalidInput("wedge pinch needs equal index/middle radii");

    WedgePinch g;
    g.shape = w;
    g.finger_radius = r;
    g.penetration = penetration;
    g.face_distance = r - penetration;
    const double alpha = w.inclination();
    const double half_gap = (index_mcp.x() - middle_mcp.x()) / 2.0;
    // Bottom height that puts each side plane at face_distance from its finger axis.
    const double bottom = (g.face_distance - std::cos(alpha) * (half_gap - w.bottom_half_width)) / std::sin(alpha);

    const double y_lo = std::max(index_mcp.y(), middle_mcp.y()) + 0.02 * hand.global_scale;
    const double y_hi = lm.at("index_tip").y() - 0.005;
    if (!(y_hi - y_lo >= 2 * w.half_length)) throw InvalidInput("wedge too long for the finger overlap");
    g.center = Vec3((index_mcp.x() + middle_mcp.x()) / 2.0, (y_lo + y_hi) / 2.0, bottom + w.height / 2);

    // The foot of the perpendicular from each axis must stay on the side face up to the
    // onset, otherwise the first contact would be an edge.
    const double foot = (r + tolerance) * std::sin(alpha);
    if (!(bottom + g.onset_rise(tolerance) < foot && foot < bottom + w.height))
        throw InvalidInput("wedge first touches the fingers on an edge");
    return g;
}

/// Rise above full insertion per frame: descend, hold, then rise again.
struct PinchSchedule {
    double start_rise = 0.04;
    double step = 0.0023;
    int hold_frames = 12;
    bool release = true;
};

inline std::vector<double> rise_schedule(const PinchSchedule& s) {
    std::vector<double> h;
    for (double z = s.start_rise; z > 0; z -= s.step) h.push_back(z);
    for (int k = 0; k < s.hold_frames; ++k) h.push_back(0.0);
    if (s.release) {
        const std::size_t descent = h.size() - s.hold_frames;
        for (std::size_t k = descent; k-- > 0;) h.push_back(h[k]);
    }
    return h;
}

struct PinchSequenceSpec {
    std::string sequence_id;
    std::string subject_id;
    std::string object_id;
    std::string object_mesh;
    HandShape shape;
    HandPlacement placement;
    WedgeShape wedge;
    PinchSchedule schedule;
    int first_index = 0;
    double tolerance = ContactParams{}.tolerance;
};

struct PinchSequence {
    Sequence sequence;
    TriangleMesh mesh;
    WedgePinch geometry;
    std::vector<double> rises;
    int onset_frame = -1;  // frame index of the first analytic contact
};

/// Builds the sequence; gt_contact is true exactly when both side faces are within the
/// contact tolerance of the index and middle fingers.
inline PinchSequence make_pinch_sequence(const PinchSequenceSpec& spec,
                                         const RestSkeleton& skeleton = RestSkeleton::standard()) {
    PinchSequence out;
    out.geometry = wedge_pinch(spec.shape, spec.wedge, 0.00025, spec.tolerance, skeleton);
    out.mesh = make_wedge(spec.wedge);
    const double onset = out.geometry.onset_rise(spec.tolerance);

    Sequence& s = out.sequence;
    s.sequence_id = spec.sequence_id;
    s.subject_id = spec.subject_id;
    s.object_id = spec.object_id;
    s.object_mesh = spec.object_mesh;
    s.hand_shape = spec.shape;
    const Pose root = spec.placement.pose();
    out.rises = rise_schedule(spec.schedule);
    for (std::size_t k = 0; k < out.rises.size(); ++k) {
        SequenceFrame f;
        f.index = spec.first_index + static_cast<int>(k);
        f.hand_pose = spec.placement.hand_pose();
        f.object_pose = root * Pose(Eigen::Quaterniond::Identity(), out.geometry.center + Vec3(0, 0, out.rises[k]));
        f.gt_contact = out.rises[k] <= onset;
        if (*f.gt_contact && out.onset_frame < 0) out.onset_frame = f.index;
        s.frames.push_back(std::move(f));
    }
    return out;
}

/// Second subject: larger hand with thicker fingers.
inline HandShape large_hand() {
    HandShape s;
    s.global_scale = 1.1;
    s.finger_radii = {0.011, 0.0091, 0.0091, 0.0091, 0.0091};
    s.palm_radius = 0.013;
    return s;
}

/// The bundled six-sequence suite: two objects, two subjects, varied hand placements.
inline std::vector<PinchSequenceSpec> suite_specs() {
    const HandShape small{};
    const HandShape large = large_hand();
    const WedgeShape narrow{0.001, 0.001 + 0.04 * std::tan(35 * kPi / 180), 0.025, 0.04};
    const WedgeShape blunt{0.0015, 0.0015 + 0.05, 0.02, 0.05};
    std::vector<PinchSequenceSpec> specs;
    auto add = [&](std::string id, std::string subject, std::string object, const HandShape& shape,
                   const WedgeShape& wedge, HandPlacement place, PinchSchedule sched, int first) {
        PinchSequenceSpec p;
        p.sequence_id = std::move(id);
        p.subject_id = std::move(subject);
        p.object_id = object;
        p.object_mesh = object + ".obj";
        p.shape = shape;
        p.placement = place;
        p.wedge = wedge;
        p.schedule = sched;
        p.first_index = first;
        specs.push_back(std::move(p));
    };
    add("seq_narrow_s01_a", "s01", "narrow_wedge", small, narrow, {Vec3::Zero(), Vec3::Zero()},
        {0.0390, 0.0023, 12, true}, 0);
    add("seq_narrow_s02_a", "s02", "narrow_wedge", large, narrow, {Vec3(0.3, -0.2, 0.9), Vec3(0.4, -0.1, 0.8)},
        {0.050, 0.0031, 10, true}, 5);
    add("seq_narrow_s01_b", "s01", "narrow_wedge", small, narrow, {Vec3(-1.2, 0.4, 0.1), Vec3(-0.25, 0.6, 1.1)},
        {0.0354, 0.0017, 15, true}, 100);
    add("seq_blunt_s02_a", "s02", "blunt_wedge", large, blunt, {Vec3(0.0, 0.0, 2.5), Vec3(0.1, 0.2, 0.3)},
        {0.0437, 0.0027, 12, true}, 0);
    add("seq_blunt_s01_a", "s01", "blunt_wedge", small, blunt, {Vec3(1.5, 0.3, -0.4), Vec3(-0.6, -0.3, 0.95)},
        {0.0309, 0.0021, 14, true}, 20);
    add("seq_blunt_s02_b", "s02", "blunt_wedge", large, blunt, {Vec3(0.2, 2.0, 0.2), Vec3(0.0, 0.0, 1.5)},
        {0.055, 0.0029, 9, true}, 7);
    return specs;
}

/// Single-frame pinch: box fully inserted between index and middle fingers.
inline FrameInput pinch_frame(const std::string& mesh_id, const HandShape& shape, const HandPlacement& place,
                              const PinchGeometry& g) {
    FrameInput in;
    in.hand_shape = shape;
    in.hand_pose = place.hand_pose();
    in.object_mesh_id = mesh_id;
    in.object_pose = place.pose() * Pose(Eigen::Quaterniond::Identity(), g.center);
    return in;
}

/// Index finger flexed 90 degrees at the MCP so it points along +z, fingertip touching
/// a large plate whose front face looks back at the finger.
struct FingertipPlate {
    FrameInput frame;
    TriangleMesh plate;
};

inline FingertipPlate fingertip_on_plate(const std::string& mesh_id, const HandShape& shape = {},
                                         const RestSkeleton& skeleton = RestSkeleton::standard()) {
    FingertipPlate out;
    HandPose pose;
    pose.theta[3] = kPi / 2;  // index MCP flexion about +x
    const HandLandmarks lm = forward_kinematics(shape, pose, skeleton);
    const Vec3 tip = lm.at("index_tip");
    const double r = shape.finger_radii[static_cast<int>(Finger::index)];
    out.plate = make_grid(0.2, 8);
    out.frame.hand_shape = shape;
    out.frame.hand_pose = pose;
    out.frame.object_mesh_id = mesh_id;
    // Grid normal +z flipped to -z, centered above the fingertip.
    out.frame.object_pose = Pose(Eigen::Quaterniond(Eigen::AngleAxisd(kPi, Vec3::UnitX())),
                                 Vec3(tip.x() + 0.013, tip.y() + 0.017, tip.z() + r));
    return out;
}

}  // namespace graspq::synthetic
