#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "graspq/error.hpp"

namespace graspq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform x -> R x + t. Rotation is kept as a unit quaternion.
class Pose {
public:
    Pose() = default;

    Pose(const Eigen::Quaterniond& rotation, const Vec3& translation)
        : rotation_(rotation.normalized()), translation_(translation) {}

    /// Rotation given as (w, x, y, z); normalized on construction.
    static Pose from_wxyz(const std::array<double, 4>& q, const Vec3& translation) {
        const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (!(n > 1e-12) || !std::isfinite(n))
            throw InvalidInput("pose rotation quaternion has zero or non-finite norm");
        return Pose(Eigen::Quaterniond(q[0], q[1], q[2], q[3]), translation);
    }

    static Pose from_axis_angle(const Vec3& axis_angle, const Vec3& translation = Vec3::Zero()) {
        const double angle = axis_angle.norm();
        if (angle < 1e-300) return Pose(Eigen::Quaterniond::Identity(), translation);
        return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis_angle / angle)), translation);
    }

    static Pose identity() { return {}; }

    const Eigen::Quaterniond& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 apply_direction(const Vec3& d) const { return rotation_ * d; }

    /// (this * other)(x) == this(other(x))
    Pose operator*(const Pose& other) const {
        return Pose(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
    }

    Pose inverse() const {
        const Eigen::Quaterniond inv = rotation_.conjugate();
        return Pose(inv, -(inv * translation_));
    }

private:
    Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
    Vec3 translation_ = Vec3::Zero();
};

inline Vec3 apply_pose(const Pose& pose, const Vec3& point) { return pose.apply(point); }

inline constexpr double kDegenerateTriangleArea = 1e-12;

/// Indexed triangle soup with outward (counter-clockwise winding) face normals.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> normals;
    /// Angle-weighted vertex normals and, per triangle, summed normals of the faces
    /// sharing edges (t0,t1), (t1,t2), (t2,t0). Used for inside/outside tests.
    std::vector<Vec3> vertex_normals;
    std::vector<std::array<Vec3, 3>> edge_normals;
    /// Faces dropped at load time for having area <= kDegenerateTriangleArea.
    std::size_t dropped_faces = 0;

    bool empty() const { return triangles.empty(); }

    /// Recomputes face normals and drops degenerate triangles.
    void finalize() {
        std::vector<std::array<int, 3>> kept;
        kept.reserve(triangles.size());
        normals.clear();
        for (const auto& t : triangles) {
            for (int idx : t)
                if (idx < 0 || static_cast<std::size_t>(idx) >= vertices.size())
                    throw InvalidInput("triangle index " + std::to_string(idx) + " out of range");
            const Vec3 c = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
            const double area = 0.5 * c.norm();
            if (!(area > kDegenerateTriangleArea)) {
                ++dropped_faces;
                continue;
            }
            kept.push_back(t);
            normals.push_back(c.normalized());
        }
        triangles = std::move(kept);
        compute_pseudo_normals();
    }

    void compute_pseudo_normals() {
        vertex_normals.assign(vertices.size(), Vec3::Zero());
        std::map<std::pair<int, int>, Vec3> edge_sum;
        for (std::size_t f = 0; f < triangles.size(); ++f) {
            const auto& t = triangles[f];
            for (int k = 0; k < 3; ++k) {
                const Vec3& p = vertices[t[k]];
                const Vec3 u = (vertices[t[(k + 1) % 3]] - p).normalized();
                const Vec3 w = (vertices[t[(k + 2) % 3]] - p).normalized();
                vertex_normals[t[k]] += std::acos(std::clamp(u.dot(w), -1.0, 1.0)) * normals[f];
                const auto key = std::minmax(t[k], t[(k + 1) % 3]);
                auto [it, fresh] = edge_sum.try_emplace({key.first, key.second}, Vec3::Zero());
                it->second += normals[f];
            }
        }
        for (auto& n : vertex_normals)
            if (n.norm() > 0) n.normalize();
        edge_normals.resize(triangles.size());
        for (std::size_t f = 0; f < triangles.size(); ++f) {
            const auto& t = triangles[f];
            for (int k = 0; k < 3; ++k) {
                const auto key = std::minmax(t[k], t[(k + 1) % 3]);
                const Vec3& n = edge_sum.at({key.first, key.second});
                edge_normals[f][k] = n.norm() > 0 ? n.normalized() : normals[f];
            }
        }
    }

    std::array<Vec3, 3> corners(std::size_t tri) const {
        const auto& t = triangles[tri];
        return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
    }
};

namespace detail {

// OBJ face token: "7", "7/1", "7//3", "7/1/3"; negative indices are relative.
inline int parse_face_index(const std::string& token, std::size_t vertex_count, std::size_t line) {
    const std::string head = token.substr(0, token.find('/'));
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(head, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != head.size() || value == 0)
        throw ParseError("line " + std::to_string(line) + ": bad face index '" + token + "'");
    const long resolved = value > 0 ? value - 1 : static_cast<long>(vertex_count) + value;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count))
        throw ParseError("line " + std::to_string(line) + ": face index " + std::to_string(value) +
                         " out of range");
    return static_cast<int>(resolved);
}

}  // namespace detail

/// Parses ASCII OBJ text. Only v and f records are used; polygons are fan-triangulated.
inline TriangleMesh parse_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream line(raw);
        std::string tag;
        if (!(line >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(line >> x >> y >> z) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
                throw ParseError("line " + std::to_string(line_no) + ": malformed vertex record");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (line >> tok) poly.push_back(detail::parse_face_index(tok, mesh.vertices.size(), line_no));
            if (poly.size() < 3)
                throw ParseError("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
        }
        // vn, vt, o, g, s, usemtl, mtllib: ignored
    }
    mesh.finalize();
    return mesh;
}

inline TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file '" + path + "'");
    try {
        return parse_obj(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes vertices with 17 significant digits so that reloading is exact.
inline void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file '" + path + "'");
    write_obj(mesh, out);
}

/// Closed axis-aligned box mesh with outward normals, centered at the origin.
inline TriangleMesh make_box(const Vec3& half_extents) {
    TriangleMesh m;
    const Vec3& h = half_extents;
    for (int i = 0; i < 8; ++i)
        m.vertices.emplace_back((i & 1 ? 1 : -1) * h.x(), (i & 2 ? 1 : -1) * h.y(), (i & 4 ? 1 : -1) * h.z());
    // Quads listed counter-clockwise seen from outside.
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    m.finalize();
    return m;
}

/// Flat square grid in the z = 0 plane, normals +z, subdivided into cells x cells quads.
inline TriangleMesh make_grid(double half_size, int cells) {
    TriangleMesh m;
    const double step = 2.0 * half_size / cells;
    for (int j = 0; j <= cells; ++j)
        for (int i = 0; i <= cells; ++i) m.vertices.emplace_back(-half_size + i * step, -half_size + j * step, 0.0);
    auto id = [cells](int i, int j) { return j * (cells + 1) + i; };
    for (int j = 0; j < cells; ++j)
        for (int i = 0; i < cells; ++i) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    m.finalize();
    return m;
}

/// UV sphere with outward normals.
inline TriangleMesh make_uv_sphere(double radius, int stacks, int slices) {
    TriangleMesh m;
    const double pi = 3.14159265358979323846;
    m.vertices.emplace_back(0, 0, radius);
    for (int i = 1; i < stacks; ++i) {
        const double phi = pi * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double th = 2 * pi * j / slices;
            m.vertices.emplace_back(radius * std::sin(phi) * std::cos(th), radius * std::sin(phi) * std::sin(th),
                                    radius * std::cos(phi));
        }
    }
    m.vertices.emplace_back(0, 0, -radius);
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [slices](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
    for (int j = 0; j < slices; ++j) m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i)
        for (int j = 0; j < slices; ++j) {
            m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    for (int j = 0; j < slices; ++j) m.triangles.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
    m.finalize();
    return m;
}

}  // namespace graspq
