#pragma once

#include <map>
#include <memory>
#include <string>

#include "graspq/bvh.hpp"
#include "graspq/contact.hpp"
#include "graspq/hand.hpp"
#include "graspq/wrench.hpp"

namespace graspq {

/// Object meshes by id, each with its accelerator, center of mass and max radius
/// computed once. Read-only after setup, so frames may be evaluated concurrently.
class MeshRegistry {
public:
    const MeshModel& add(const std::string& id, TriangleMesh mesh) {
        auto model = std::make_shared<const MeshModel>(std::move(mesh));
        models_[id] = model;
        return *model;
    }

    const MeshModel& load(const std::string& id, const std::string& path) { return add(id, load_mesh(path)); }

    bool contains(const std::string& id) const { return models_.count(id) != 0; }

    const MeshModel& at(const std::string& id) const {
        const auto it = models_.find(id);
        if (it == models_.end()) throw ConfigError("unknown object mesh id '" + id + "'");
        return *it->second;
    }

    std::size_t size() const { return models_.size(); }

private:
    std::map<std::string, std::shared_ptr<const MeshModel>> models_;
};

/// How lambda (the torque scale) is chosen.
struct TorqueScale {
    enum class Mode { inverse_max_radius, fixed };
    Mode mode = Mode::inverse_max_radius;
    double lambda = 1.0;  // used when mode == fixed

    double resolve(const MeshModel& model) const {
        if (mode == Mode::fixed) return lambda;
        if (!(model.max_radius > 0)) throw NumericalError("object mesh has zero radius about its center of mass");
        return 1.0 / model.max_radius;
    }
};

/// Decision thresholds; zero reproduces the plain "greater than zero" rule.
struct Thresholds {
    double epsilon = 0.0;
    double volume = 0.0;
};

struct DetectorSettings {
    ContactParams contact;
    TorqueScale torque;
    Thresholds thresholds;
};

struct FrameInput {
    HandShape hand_shape;
    HandPose hand_pose;
    std::string object_mesh_id;
    Pose object_pose;
};

struct ContactDecision {
    QualityMetrics metrics;
    bool in_contact = false;
    int contact_count = 0;
};

/// In contact when either metric exceeds its threshold.
inline bool decide(const QualityMetrics& m, const Thresholds& t = {}) {
    return m.epsilon > t.epsilon || m.volume > t.volume;
}

/// Everything evaluate_frame computes along the way, for inspection and debugging.
struct FrameTrace {
    HandLandmarks landmarks;
    HandProxies proxies;
    ContactSet contacts;
    std::vector<Wrench6> wrenches;
    ContactDecision decision;
};

inline FrameTrace trace_frame(const FrameInput& input, const DetectorSettings& settings, const MeshRegistry& registry,
                              const RestSkeleton& skeleton = RestSkeleton::standard()) {
    settings.contact.validate();
    const MeshModel& model = registry.at(input.object_mesh_id);
    FrameTrace t;
    t.landmarks = forward_kinematics(input.hand_shape, input.hand_pose, skeleton);
    t.proxies = build_hand_proxies(t.landmarks, input.hand_shape);
    const PosedMesh posed{&model, input.object_pose};
    t.contacts = extract_contacts(t.proxies, posed, settings.contact, input.object_mesh_id);
    const int count = static_cast<int>(t.contacts.size());
    if (count > 0) {
        t.wrenches = primitive_wrenches(t.contacts, settings.contact, posed.center_of_mass(),
                                        settings.torque.resolve(model), input.object_pose.rotation());
        t.decision.metrics = quality_metrics(wrench_vectors(t.wrenches), count);
    }
    t.decision.contact_count = count;
    t.decision.metrics.contact_count = count;
    t.decision.in_contact = decide(t.decision.metrics, settings.thresholds);
    return t;
}

/// Forward kinematics -> proxies -> contacts -> wrenches -> hull -> (epsilon, v) -> decision.
inline ContactDecision evaluate_frame(const FrameInput& input, const DetectorSettings& settings,
                                      const MeshRegistry& registry,
                                      const RestSkeleton& skeleton = RestSkeleton::standard()) {
    return trace_frame(input, settings, registry, skeleton).decision;
}

inline ContactDecision evaluate_frame(const FrameInput& input, const ContactParams& params,
                                      const MeshRegistry& registry) {
    DetectorSettings s;
    s.contact = params;
    return evaluate_frame(input, s, registry);
}

}  // namespace graspq
