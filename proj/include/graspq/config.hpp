#pragma once

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "graspq/detector.hpp"
#include "graspq/error.hpp"

namespace graspq {

/// Command-line configuration. Every key is optional; an empty file means all defaults.
///
///   {
///     "tolerance": 0.003, "dedup_radius": 0.008, "mu": 0.8, "cone_edges": 8,
///     "torque_scale": "inverse_max_radius" | "fixed", "lambda": 1.0,
///     "tau_epsilon": 0.0, "tau_volume": 0.0,
///     "mesh_dir": "", "rest_skeleton": "", "threads": 0
///   }
///
/// threads = 0 uses all available cores.
struct Config {
    DetectorSettings detector;
    std::string mesh_dir;
    std::string rest_skeleton;
    unsigned threads = 0;

    unsigned resolved_threads() const {
        if (threads > 0) return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }

    /// Config value, then GRASPQ_MESH_DIR.
    std::string resolved_mesh_dir() const {
        if (!mesh_dir.empty()) return mesh_dir;
        if (const char* env = std::getenv("GRASPQ_MESH_DIR")) return env;
        return {};
    }

    RestSkeleton skeleton() const {
        return rest_skeleton.empty() ? RestSkeleton::standard() : RestSkeleton::load(rest_skeleton);
    }
};

inline Config parse_config(const nlohmann::json& j) {
    Config c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    auto num = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) throw ParseError(std::string("config.") + key + ": expected a number");
        dst = j[key].get<double>();
    };
    for (const auto& [key, _] : j.items()) {
        static const char* known[] = {"tolerance",   "dedup_radius", "mu",       "cone_edges",    "torque_scale", "lambda",
                                      "tau_epsilon", "tau_volume",   "mesh_dir", "rest_skeleton", "threads"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
            throw ParseError("config." + key + ": unknown key");
    }
    auto& cp = c.detector.contact;
    num("tolerance", cp.tolerance);
    num("dedup_radius", cp.dedup_radius);
    num("mu", cp.mu);
    if (j.contains("cone_edges")) {
        if (!j["cone_edges"].is_number_integer()) throw ParseError("config.cone_edges: expected an integer");
        cp.cone_edges = j["cone_edges"].get<int>();
    }
    if (j.contains("torque_scale")) {
        const auto& m = j["torque_scale"];
        if (m == "inverse_max_radius") c.detector.torque.mode = TorqueScale::Mode::inverse_max_radius;
        else if (m == "fixed") c.detector.torque.mode = TorqueScale::Mode::fixed;
        else throw ParseError("config.torque_scale: expected \"inverse_max_radius\" or \"fixed\"");
    }
    num("lambda", c.detector.torque.lambda);
    num("tau_epsilon", c.detector.thresholds.epsilon);
    num("tau_volume", c.detector.thresholds.volume);
    if (j.contains("mesh_dir")) {
        if (!j["mesh_dir"].is_string()) throw ParseError("config.mesh_dir: expected a string");
        c.mesh_dir = j["mesh_dir"].get<std::string>();
    }
    if (j.contains("rest_skeleton")) {
        if (!j["rest_skeleton"].is_string()) throw ParseError("config.rest_skeleton: expected a string");
        c.rest_skeleton = j["rest_skeleton"].get<std::string>();
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_unsigned()) throw ParseError("config.threads: expected a non-negative integer");
        c.threads = j["threads"].get<unsigned>();
    }
    try {
        cp.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (c.detector.torque.mode == TorqueScale::Mode::fixed && !(c.detector.torque.lambda > 0))
        throw ParseError("config.lambda: must be > 0");
    return c;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    try {
        return parse_config(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace graspq
