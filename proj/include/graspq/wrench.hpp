#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graspq/contact.hpp"
#include "graspq/error.hpp"
#include "graspq/hull.hpp"

namespace graspq {

/// Primitive wrench (f, lambda * (p - c) x f).
struct Wrench6 {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();

    Vec6 vector() const {
        Vec6 w;
        w << force, torque;
        return w;
    }
};

/// Ferrari-Canny pair; (-1, 0) is the no-contact sentinel.
struct QualityMetrics {
    double epsilon = -1.0;
    double volume = 0.0;
    int contact_count = 0;

    static QualityMetrics no_contact() { return {}; }
};

/// One wrench per friction-cone edge per contact. Forces push into the object, so each
/// cone is built around the inward normal.
///
/// Cone edges are laid out in `cone_frame` (the object orientation) and rotated back,
/// so moving the whole scene rigidly moves the edges with it.
inline std::vector<Wrench6> primitive_wrenches(const ContactSet& contacts, const ContactParams& params,
                                               const Vec3& torque_center, double lambda,
                                               const Eigen::Quaterniond& cone_frame = Eigen::Quaterniond::Identity()) {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw InvalidInput("torque scale lambda must be > 0");
    const Eigen::Matrix3d r = cone_frame.normalized().toRotationMatrix();
    std::vector<Wrench6> out;
    out.reserve(contacts.size() * params.cone_edges);
    for (const auto& c : contacts.contacts) {
        const Vec3 arm = c.point - torque_center;
        for (const Vec3& local : discretize_friction_cone(-(r.transpose() * c.normal), params.mu, params.cone_edges)) {
            const Vec3 f = r * local;
            out.push_back({f, lambda * arm.cross(f)});
        }
    }
    return out;
}

inline std::vector<Vec6> wrench_vectors(const std::vector<Wrench6>& wrenches) {
    std::vector<Vec6> v;
    v.reserve(wrenches.size());
    for (const auto& w : wrenches) v.push_back(w.vector());
    return v;
}

/// Metrics of a wrench set; the sentinel when there are no contacts.
inline QualityMetrics quality_metrics(const std::vector<Vec6>& wrenches, int contact_count) {
    if (contact_count == 0) return QualityMetrics::no_contact();
    const WrenchHull hull = convex_hull_6d(wrenches);
    return {epsilon_metric(hull), volume_metric(hull), contact_count};
}

/// Debug wrench file: rows "fx,fy,fz,tx,ty,tz". An optional header row (no numeric
/// cells) is skipped.
inline std::vector<Vec6> parse_wrench_csv(std::istream& in) {
    std::vector<Vec6> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        int cells = 0;
        while (std::getline(ss, cell, ',')) {
            ++cells;
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t", used) == std::string::npos) vals.push_back(v);
            } catch (const std::exception&) {
            }
        }
        const bool numeric = static_cast<int>(vals.size()) == cells;
        if (vals.empty() && line_no == 1) continue;  // header
        if (!numeric || vals.size() != 6)
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 numeric columns");
        Vec6 w;
        for (int k = 0; k < 6; ++k) w(k) = vals[k];
        if (!w.allFinite()) throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
        rows.push_back(w);
    }
    return rows;
}

inline std::vector<Vec6> load_wrench_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open wrench file '" + path + "'");
    try {
        return parse_wrench_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_wrench_csv(const std::vector<Vec6>& wrenches, std::ostream& out) {
    out << "fx,fy,fz,tx,ty,tz\n";
    char buf[64];
    for (const auto& w : wrenches) {
        for (int k = 0; k < 6; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", w(k));
            out << buf << (k < 5 ? ',' : '\n');
        }
    }
}

}  // namespace graspq
