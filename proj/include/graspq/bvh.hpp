#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "graspq/geometry.hpp"

namespace graspq {

/// Closest point on a mesh to a query, with the face normal of the winning triangle.
/// pseudo_normal is the angle-weighted normal of the closest feature (face, edge or
/// vertex); its sign against query - point tells inside from outside on closed meshes.
struct ClosestPoint {
    Vec3 point = Vec3::Zero();
    double distance = std::numeric_limits<double>::infinity();
    Vec3 normal = Vec3::UnitZ();
    Vec3 pseudo_normal = Vec3::UnitZ();
    int triangle = -1;

    bool behind(const Vec3& query) const { return (query - point).dot(pseudo_normal) < 0.0; }
};

/// Distances closer than this are ties; the lower triangle index wins.
inline constexpr double kTieTolerance = 1e-12;

// Feature of a triangle holding the closest point.
enum class TriangleFeature { vertex_a, vertex_b, vertex_c, edge_ab, edge_bc, edge_ca, face };

struct TrianglePoint {
    Vec3 point;
    TriangleFeature feature;
};

/// Closest point on triangle (a, b, c) to p, by Voronoi region classification.
inline TrianglePoint closest_feature_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    using F = TriangleFeature;
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return {a, F::vertex_a};

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return {b, F::vertex_b};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return {a + ab * (d1 / (d1 - d3)), F::edge_ab};

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return {c, F::vertex_c};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return {a + ac * (d2 / (d2 - d6)), F::edge_ca};

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return {b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))), F::edge_bc};

    const double denom = 1.0 / (va + vb + vc);
    return {a + ab * (vb * denom) + ac * (vc * denom), F::face};
}

inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return closest_feature_on_triangle(p, a, b, c).point;
}

/// Angle-weighted pseudo-normal of a triangle feature.
inline const Vec3& feature_normal(const TriangleMesh& mesh, int tri, TriangleFeature f) {
    const auto& t = mesh.triangles[tri];
    switch (f) {
        case TriangleFeature::vertex_a: return mesh.vertex_normals[t[0]];
        case TriangleFeature::vertex_b: return mesh.vertex_normals[t[1]];
        case TriangleFeature::vertex_c: return mesh.vertex_normals[t[2]];
        case TriangleFeature::edge_ab: return mesh.edge_normals[tri][0];
        case TriangleFeature::edge_bc: return mesh.edge_normals[tri][1];
        case TriangleFeature::edge_ca: return mesh.edge_normals[tri][2];
        case TriangleFeature::face: break;
    }
    return mesh.normals[tri];
}

/// Axis-aligned bounding-volume hierarchy over the triangles of one mesh.
/// Immutable after construction; concurrent queries are safe.
class ProximityAccelerator {
public:
    struct Node {
        Eigen::AlignedBox3d box;
        std::int32_t left = -1;   // child index, or -1 for a leaf
        std::int32_t right = -1;
        std::int32_t first = 0;   // leaf range into order()
        std::int32_t count = 0;
    };

    ProximityAccelerator() = default;

    explicit ProximityAccelerator(const TriangleMesh& mesh, int leaf_size = 4) : leaf_size_(std::max(1, leaf_size)) {
        if (mesh.empty()) return;
        order_.resize(mesh.triangles.size());
        std::iota(order_.begin(), order_.end(), 0);
        centroids_.reserve(mesh.triangles.size());
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto c = mesh.corners(t);
            centroids_.push_back((c[0] + c[1] + c[2]) / 3.0);
        }
        nodes_.reserve(2 * mesh.triangles.size() / leaf_size_ + 1);
        build(mesh, 0, static_cast<int>(order_.size()));
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<int>& order() const { return order_; }
    int leaf_size() const { return leaf_size_; }
    bool empty() const { return nodes_.empty(); }

    /// Exact closest point; identical to exhaustive search up to kTieTolerance.
    ClosestPoint closest(const TriangleMesh& mesh, const Vec3& query) const {
        if (nodes_.empty()) throw InvalidInput("closest point query on an empty mesh");
        ClosestPoint best;
        std::vector<std::int32_t> stack;
        stack.reserve(64);
        stack.push_back(0);
        while (!stack.empty()) {
            const Node& node = nodes_[stack.back()];
            stack.pop_back();
            if (std::sqrt(node.box.squaredExteriorDistance(query)) > best.distance + kTieTolerance) continue;
            if (node.left < 0) {
                for (int k = node.first; k < node.first + node.count; ++k) consider(mesh, query, order_[k], best);
                continue;
            }
            const double dl = nodes_[node.left].box.squaredExteriorDistance(query);
            const double dr = nodes_[node.right].box.squaredExteriorDistance(query);
            // Visit the nearer child first.
            if (dl <= dr) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
        return best;
    }

    static void consider(const TriangleMesh& mesh, const Vec3& query, int tri, ClosestPoint& best) {
        const auto c = mesh.corners(tri);
        const TrianglePoint p = closest_feature_on_triangle(query, c[0], c[1], c[2]);
        const double d = (query - p.point).norm();
        const bool better = d < best.distance - kTieTolerance ||
                            (d <= best.distance + kTieTolerance && (best.triangle < 0 || tri < best.triangle));
        if (better) {
            best.point = p.point;
            best.distance = d;
            best.normal = mesh.normals[tri];
            best.pseudo_normal = feature_normal(mesh, tri, p.feature);
            best.triangle = tri;
        }
    }

private:
    int build(const TriangleMesh& mesh, int first, int count) {
        const int index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        Eigen::AlignedBox3d box;
        Eigen::AlignedBox3d centroid_box;
        for (int k = first; k < first + count; ++k) {
            for (const auto& v : mesh.corners(order_[k])) box.extend(v);
            centroid_box.extend(centroids_[order_[k]]);
        }
        nodes_[index].box = box;
        if (count <= leaf_size_) {
            nodes_[index].first = first;
            nodes_[index].count = count;
            return index;
        }
        int axis = 0;
        centroid_box.sizes().maxCoeff(&axis);
        const int mid = first + count / 2;
        std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                         [&](int a, int b) {
                             const double ca = centroids_[a][axis], cb = centroids_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        const int left = build(mesh, first, mid - first);
        const int right = build(mesh, mid, first + count - mid);
        nodes_[index].left = left;
        nodes_[index].right = right;
        return index;
    }

    int leaf_size_ = 4;
    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Vec3> centroids_;
};

/// Mesh plus its accelerator and the mass properties the wrench computation needs.
struct MeshModel {
    TriangleMesh mesh;
    ProximityAccelerator accelerator;
    Vec3 center_of_mass = Vec3::Zero();  // area-weighted surface centroid
    double max_radius = 0.0;             // max vertex distance from center_of_mass

    MeshModel() = default;

    explicit MeshModel(TriangleMesh m) : mesh(std::move(m)), accelerator(mesh) {
        if (mesh.empty()) throw InvalidInput("mesh has no usable triangles");
        double area_sum = 0.0;
        Vec3 weighted = Vec3::Zero();
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto c = mesh.corners(t);
            const double a = 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
            area_sum += a;
            weighted += a * (c[0] + c[1] + c[2]) / 3.0;
        }
        center_of_mass = weighted / area_sum;
        for (const auto& t : mesh.triangles)
            for (int idx : t) max_radius = std::max(max_radius, (mesh.vertices[idx] - center_of_mass).norm());
    }

    ClosestPoint closest(const Vec3& query) const { return accelerator.closest(mesh, query); }
};

inline ClosestPoint closest_point_on_mesh(const Vec3& query, const TriangleMesh& mesh,
                                          const ProximityAccelerator& accelerator) {
    if (mesh.empty()) throw InvalidInput("closest point query on an empty mesh");
    return accelerator.closest(mesh, query);
}

/// Object mesh placed in the world. Queries are answered in the object frame and mapped back.
struct PosedMesh {
    const MeshModel* model = nullptr;
    Pose pose;

    ClosestPoint closest(const Vec3& world_query) const {
        ClosestPoint local = model->closest(pose.inverse().apply(world_query));
        local.point = pose.apply(local.point);
        local.normal = pose.apply_direction(local.normal);
        local.pseudo_normal = pose.apply_direction(local.pseudo_normal);
        return local;
    }

    Vec3 center_of_mass() const { return pose.apply(model->center_of_mass); }
};

}  // namespace graspq
