#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "graspq/bvh.hpp"
#include "graspq/error.hpp"
#include "graspq/hand.hpp"

namespace graspq {

struct ContactParams {
    double tolerance = 0.003;     // delta, m
    double dedup_radius = 0.008;  // m
    double mu = 0.8;
    int cone_edges = 8;

    void validate() const {
        if (!(tolerance > 0) || !std::isfinite(tolerance)) throw InvalidInput("contact tolerance must be > 0");
        if (!(dedup_radius >= 0) || !std::isfinite(dedup_radius)) throw InvalidInput("dedup_radius must be >= 0");
        if (!(mu >= 0) || !std::isfinite(mu)) throw InvalidInput("friction coefficient must be >= 0");
        if (cone_edges < 3) throw InvalidInput("cone_edges must be >= 3");
    }
};

struct Contact {
    Vec3 point = Vec3::Zero();   // on the object surface
    Vec3 normal = Vec3::UnitZ(); // outward object normal
    double depth = 0.0;          // separation if >= 0, penetration if < 0
    std::string_view source;     // proxy label
    int source_index = -1;       // proxy position in HandProxies
};

struct ContactSet {
    std::vector<Contact> contacts;
    std::string object_id;

    bool empty() const { return contacts.empty(); }
    std::size_t size() const { return contacts.size(); }
};

// Capsule axis sampling and golden-section refinement settings.
inline constexpr int kAxisSamples = 9;
inline constexpr int kGoldenIterations = 20;
// Distances within this of the minimum count as the same level (meters).
inline constexpr double kPlateauTolerance = 1e-9;
inline constexpr int kPlateauBisections = 40;

/// Signed distance from an axis point to the surface, along with the surface feature.
/// Negative when the query is inside a closed mesh, judged by the pseudo-normal of the
/// closest feature.
struct SurfaceProbe {
    ClosestPoint closest;
    double signed_distance = 0.0;
    double t = 0.0;
};

inline SurfaceProbe probe_surface(const PosedMesh& mesh, const Capsule& capsule, double t) {
    SurfaceProbe s;
    s.t = t;
    const Vec3 q = capsule.point_at(t);
    s.closest = mesh.closest(q);
    s.signed_distance = s.closest.behind(q) ? -s.closest.distance : s.closest.distance;
    return s;
}

/// Minimizes the signed axis-to-surface distance along the capsule: 9 samples,
/// then golden-section search inside the bracket around the best sample.
///
/// An axis parallel to a face has a flat stretch of minimal distance. There the middle
/// of the stretch is returned, so the point does not hinge on rounding noise.
inline SurfaceProbe closest_along_capsule(const PosedMesh& mesh, const Capsule& capsule) {
    if (capsule.length() == 0.0) return probe_surface(mesh, capsule, 0.0);

    std::array<SurfaceProbe, kAxisSamples> samples;
    int best_k = 0;
    for (int k = 0; k < kAxisSamples; ++k) {
        samples[k] = probe_surface(mesh, capsule, double(k) / (kAxisSamples - 1));
        if (samples[k].signed_distance < samples[best_k].signed_distance) best_k = k;
    }
    SurfaceProbe best = samples[best_k];

    const double step = 1.0 / (kAxisSamples - 1);
    double lo = std::max(0.0, (best_k - 1) * step), hi = std::min(1.0, (best_k + 1) * step);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    SurfaceProbe f1 = probe_surface(mesh, capsule, x1), f2 = probe_surface(mesh, capsule, x2);
    for (int it = 0; it < kGoldenIterations; ++it) {
        if (f1.signed_distance <= f2.signed_distance) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = probe_surface(mesh, capsule, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = probe_surface(mesh, capsule, x2);
        }
    }
    const SurfaceProbe& refined = f1.signed_distance <= f2.signed_distance ? f1 : f2;
    if (refined.signed_distance < best.signed_distance) best = refined;

    const double level = best.signed_distance + kPlateauTolerance;
    auto flat = [&](double t) { return probe_surface(mesh, capsule, t).signed_distance <= level; };
    auto boundary = [&](double inside, double outside) {
        for (int i = 0; i < kPlateauBisections; ++i) {
            const double mid = 0.5 * (inside + outside);
            (flat(mid) ? inside : outside) = mid;
        }
        return inside;
    };
    double a = best.t, b = best.t;
    int k = static_cast<int>(std::floor(best.t / step));
    while (k >= 0 && samples[k].t <= a && samples[k].signed_distance <= level) a = samples[k--].t;
    if (k >= 0) a = boundary(a, samples[k].t);
    k = static_cast<int>(std::ceil(best.t / step));
    while (k < kAxisSamples && samples[k].t >= b && samples[k].signed_distance <= level) b = samples[k++].t;
    if (k < kAxisSamples) b = boundary(b, samples[k].t);
    if (b - a <= kPlateauTolerance) return best;
    const SurfaceProbe centre = probe_surface(mesh, capsule, 0.5 * (a + b));
    return centre.signed_distance <= level ? centre : best;
}

/// One candidate per capsule whose surface comes within the tolerance of the mesh;
/// no deduplication. Ordered by capsule index.
inline std::vector<Contact> candidate_contacts(const HandProxies& proxies, const PosedMesh& mesh,
                                               const ContactParams& params) {
    std::vector<Contact> out;
    for (std::size_t i = 0; i < proxies.capsules.size(); ++i) {
        const Capsule& cap = proxies.capsules[i];
        const SurfaceProbe s = closest_along_capsule(mesh, cap);
        const double depth = s.signed_distance - cap.radius;
        if (depth <= params.tolerance)
            out.push_back({s.closest.point, s.closest.normal, depth, cap.label, static_cast<int>(i)});
    }
    return out;
}

/// Greedy merge: deepest contacts first, dropping any within dedup_radius of a kept one.
/// The result is returned in capsule order.
inline std::vector<Contact> deduplicate_contacts(std::vector<Contact> contacts, double dedup_radius) {
    std::vector<std::size_t> order(contacts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return contacts[a].depth < contacts[b].depth; });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return (contacts[k].point - contacts[idx].point).norm() < dedup_radius;
        });
        if (!clash) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Contact> out;
    out.reserve(kept.size());
    for (std::size_t k : kept) out.push_back(contacts[k]);
    return out;
}

inline ContactSet extract_contacts(const HandProxies& proxies, const PosedMesh& mesh, const ContactParams& params,
                                   std::string object_id = {}) {
    params.validate();
    ContactSet set;
    set.object_id = std::move(object_id);
    set.contacts = deduplicate_contacts(candidate_contacts(proxies, mesh, params), params.dedup_radius);
    return set;
}

/// Orthonormal tangents (t1, t2) with t1 x t2 = n. Pivot on the smallest |n_k|.
inline std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
    int pivot = 0;
    n.cwiseAbs().minCoeff(&pivot);
    const Vec3 t1 = n.cross(Vec3::Unit(pivot)).normalized();
    return {t1, n.cross(t1)};
}

/// Linearized Coulomb cone around the unit axis n: m unit edges at half-angle atan(mu).
inline std::vector<Vec3> discretize_friction_cone(const Vec3& normal, double mu, int m) {
    const double len = normal.norm();
    if (!(len > 1e-12) || !std::isfinite(len)) throw InvalidInput("friction cone axis must be non-zero");
    if (m < 3) throw InvalidInput("friction cone needs at least 3 edges");
    if (!(mu >= 0)) throw InvalidInput("friction coefficient must be >= 0");
    const Vec3 n = normal / len;
    const auto [t1, t2] = tangent_basis(n);
    const double two_pi = 6.283185307179586476925;
    std::vector<Vec3> edges;
    edges.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double a = two_pi * j / m;
        edges.push_back((n + mu * (std::cos(a) * t1 + std::sin(a) * t2)).normalized());
    }
    return edges;
}

}  // namespace graspq
