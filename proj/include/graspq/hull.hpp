#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "graspq/error.hpp"

namespace graspq {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct HullFacet {
    Vec6 normal = Vec6::Zero();  // outward, unit length
    double offset = 0.0;         // normal . x <= offset for every hull point
    std::vector<int> vertices;   // input point indices on the facet
};

/// Convex hull of a 6-D point set. Facets from convex_hull_6d are simplicial
/// (coplanar regions are triangulated); brute_force_hull merges them per hyperplane.
struct WrenchHull {
    std::vector<Vec6> points;
    std::vector<HullFacet> facets;
    double volume = 0.0;
    bool full_dimensional = false;
    Vec6 interior_point = Vec6::Zero();

    /// Point-membership predicate with an absolute slack.
    bool contains(const Vec6& x, double slack = 1e-9) const {
        if (!full_dimensional) return false;
        return std::all_of(facets.begin(), facets.end(),
                           [&](const HullFacet& f) { return f.normal.dot(x) <= f.offset + slack; });
    }
};

/// Relative singular-value threshold for the affine rank test.
inline constexpr double kRankThreshold = 1e-9;
/// Relative distance below which a point counts as lying on a facet plane.
inline constexpr double kPlaneTolerance = 1e-10;

/// Affine rank of a point set: singular values of the centered points above
/// kRankThreshold times the largest one.
inline int affine_rank(std::span<const Vec6> points) {
    if (points.size() < 2) return 0;
    Vec6 c = Vec6::Zero();
    for (const auto& p : points) c += p;
    c /= static_cast<double>(points.size());
    Eigen::MatrixXd centered(points.size(), 6);
    for (std::size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - c).transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& s = svd.singularValues();
    if (!(s(0) > 0)) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > kRankThreshold * s(0)) ++rank;
    return rank;
}

namespace detail {

inline double point_scale(std::span<const Vec6> points) {
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    return scale > 0 ? scale : 1.0;
}

/// Normal of the hyperplane through 6 points: null vector of the 5x6 difference matrix
/// by Gaussian elimination with complete pivoting, scaled to the generalized cross
/// product (its length is 5! times the facet's 5-volume). Zero if degenerate.
inline Vec6 hyperplane_normal(const std::array<const Vec6*, 6>& v) {
    double a[5][6];
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 6; ++c) a[r][c] = (*v[r + 1])(c) - (*v[0])(c);
    std::array<int, 6> col{0, 1, 2, 3, 4, 5};
    for (int k = 0; k < 5; ++k) {
        // Row pivoting; a column swap only when column k has nothing usable left.
        int pr = k;
        double best = std::abs(a[k][k]);
        for (int r = k + 1; r < 5; ++r)
            if (std::abs(a[r][k]) > best) best = std::abs(a[r][k]), pr = r;
        if (best <= 1e-3 * std::abs(a[k][5])) {
            int pc = k;
            for (int r = k; r < 5; ++r)
                for (int c = k; c < 6; ++c)
                    if (std::abs(a[r][c]) > best) best = std::abs(a[r][c]), pr = r, pc = c;
            if (pc != k) {
                for (int r = 0; r < 5; ++r) std::swap(a[r][k], a[r][pc]);
                std::swap(col[k], col[pc]);
            }
        }
        if (best == 0.0) return Vec6::Zero();
        if (pr != k)
            for (int c = 0; c < 6; ++c) std::swap(a[k][c], a[pr][c]);
        const double inv = 1.0 / a[k][k];
        for (int r = k + 1; r < 5; ++r) {
            const double f = a[r][k] * inv;
            for (int c = k + 1; c < 6; ++c) a[r][c] -= f * a[k][c];
        }
    }
    double x[6];
    x[5] = 1.0;
    double pivots = 1.0;
    for (int k = 0; k < 5; ++k) pivots *= a[k][k];
    for (int k = 4; k >= 0; --k) {
        double s = 0.0;
        for (int c = k + 1; c < 6; ++c) s += a[k][c] * x[c];
        x[k] = -s / a[k][k];
    }
    Vec6 n;
    for (int k = 0; k < 6; ++k) n(col[k]) = x[k] * pivots;
    return n;
}

struct WorkFacet {
    std::array<int, 6> v;   // sorted
    std::array<int, 6> nb;  // facet across the ridge opposite v[k]
    Vec6 normal;
    double offset;
    std::vector<int> outside;
    bool alive = true;
    double measure = 0.0;  // generalized cross product length
};

}  // namespace detail

/// Degenerate (lower-dimensional) hull: no facets, zero volume.
inline WrenchHull degenerate_hull(std::span<const Vec6> points) {
    WrenchHull h;
    h.points.assign(points.begin(), points.end());
    if (!points.empty()) {
        for (const auto& p : points) h.interior_point += p;
        h.interior_point /= static_cast<double>(points.size());
    }
    return h;
}

/// Incremental beneath-beyond hull in 6-D with outside sets (quickhull order).
/// Points within kPlaneTolerance * scale of a facet plane are treated as beneath it.
inline constexpr std::size_t kMaxHullPoints = 65536;

inline WrenchHull convex_hull_6d(std::span<const Vec6> points) {
    for (const auto& p : points)
        if (!p.allFinite()) throw InvalidInput("convex_hull_6d: non-finite input point");
    if (points.size() > kMaxHullPoints) throw InvalidInput("convex_hull_6d: more than 65536 points");
    if (points.size() < 7 || affine_rank(points) < 6) return degenerate_hull(points);

    const int n = static_cast<int>(points.size());
    const double eps = kPlaneTolerance * detail::point_scale(points);

    // Initial simplex: farthest point from the centroid, then repeatedly the point
    // farthest from the affine span of those chosen.
    Vec6 centroid = Vec6::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= n;
    std::vector<int> simplex;
    {
        int first = 0;
        double best = -1;
        for (int i = 0; i < n; ++i)
            if (const double d = (points[i] - centroid).squaredNorm(); d > best) best = d, first = i;
        simplex.push_back(first);
        std::vector<Vec6> basis;
        while (simplex.size() < 7) {
            int pick = -1;
            double far = -1;
            for (int i = 0; i < n; ++i) {
                Vec6 r = points[i] - points[simplex[0]];
                for (const auto& b : basis) r -= r.dot(b) * b;
                if (const double d = r.squaredNorm(); d > far) far = d, pick = i;
            }
            Vec6 r = points[pick] - points[simplex[0]];
            for (const auto& b : basis) r -= r.dot(b) * b;
            if (!(r.norm() > eps)) return degenerate_hull(points);
            basis.push_back(r.normalized());
            simplex.push_back(pick);
        }
    }
    Vec6 interior = Vec6::Zero();
    for (int i : simplex) interior += points[i];
    interior /= 7.0;

    std::vector<detail::WorkFacet> facets;
    facets.reserve(std::min<std::size_t>(400 * points.size(), 1 << 17));
    // Live facets with a non-empty outside set, processed lowest index first.
    std::set<int> pending;

    // Exact plane through six points by elimination, oriented away from the interior.
    auto exact_plane = [&](const std::array<int, 6>& v, Vec6& nrm, double& off) {
        std::array<const Vec6*, 6> ptr;
        for (int k = 0; k < 6; ++k) ptr[k] = &points[v[k]];
        nrm = detail::hyperplane_normal(ptr);
        const double len = nrm.norm();
        if (!(len > 0) || !std::isfinite(len)) throw NumericalError("convex_hull_6d: degenerate facet");
        nrm /= len;
        off = nrm.dot(points[v[0]]);
        if (nrm.dot(interior) > off) {
            nrm = -nrm;
            off = -off;
        }
        return len;
    };
    auto make_facet = [&](std::array<int, 6> v) {
        std::sort(v.begin(), v.end());
        Vec6 nrm;
        double off;
        const double len = exact_plane(v, nrm, off);
        facets.push_back({v, {-1, -1, -1, -1, -1, -1}, nrm, off, {}, true, len});
        return static_cast<int>(facets.size()) - 1;
    };
    // A new facet through a horizon ridge has its normal in the span of the two facet
    // normals at that ridge. Falls back to elimination if the combination drifts.
    const double drift = 1e-2 * eps;
    auto make_facet_at_ridge = [&](std::array<int, 6> v, int vis, int hid, int apex) {
        std::sort(v.begin(), v.end());
        const auto& V = facets[vis];
        const auto& H = facets[hid];
        const double hv = V.normal.dot(points[apex]) - V.offset;
        const double hh = H.normal.dot(points[apex]) - H.offset;
        Vec6 nrm = hv * H.normal - hh * V.normal;
        const double len = nrm.norm();
        bool ok = len > 0 && std::isfinite(len);
        double off = 0;
        if (ok) {
            nrm /= len;
            off = nrm.dot(points[apex]);
            for (int k = 0; k < 6 && ok; ++k) ok = std::abs(nrm.dot(points[v[k]]) - off) <= drift;
            ok = ok && nrm.dot(interior) < off;
        }
        if (!ok) return make_facet(v);
        // Measure is only needed for surviving facets and is filled in at the end.
        facets.push_back({v, {-1, -1, -1, -1, -1, -1}, nrm, off, {}, true, 0.0});
        return static_cast<int>(facets.size()) - 1;
    };
    auto height = [&](int f, int p) { return facets[f].normal.dot(points[p]) - facets[f].offset; };
    // Position in facet f of the one vertex not on the ridge it shares with g.
    auto opposite = [&](int f, int g) {
        for (int k = 0; k < 6; ++k)
            if (facets[f].nb[k] == g) return k;
        throw NumericalError("convex_hull_6d: broken facet adjacency");
    };

    for (int skip = 0; skip < 7; ++skip) {
        std::array<int, 6> v;
        for (int k = 0, j = 0; k < 7; ++k)
            if (k != skip) v[j++] = simplex[k];
        make_facet(v);
    }
    // Facet i omits simplex[i]; across the ridge opposite simplex[j] lies facet j.
    for (int i = 0; i < 7; ++i)
        for (int k = 0; k < 6; ++k)
            facets[i].nb[k] = static_cast<int>(std::find(simplex.begin(), simplex.end(), facets[i].v[k]) - simplex.begin());

    auto assign = [&](int p, std::size_t from, std::size_t to) {
        for (std::size_t f = from; f < to; ++f) {
            auto& fc = facets[f];
            if (fc.alive && height(static_cast<int>(f), p) > eps) {
                fc.outside.push_back(p);
                pending.insert(static_cast<int>(f));
                return;
            }
        }
    };
    {
        std::vector<bool> in_simplex(n, false);
        for (int i : simplex) in_simplex[i] = true;
        for (int i = 0; i < n; ++i)
            if (!in_simplex[i]) assign(i, 0, facets.size());
    }

    struct Horizon {
        int visible, slot, hidden;
    };
    // Ridges through the apex pair up new facets with each other. Open addressing,
    // entries tagged with the round so the table never needs clearing.
    struct OpenRidge {
        std::uint64_t key;
        int facet, slot, round;
    };
    std::vector<OpenRidge> table(64, OpenRidge{0, 0, 0, 0});
    std::size_t unmatched = 0;
    auto link_ridge = [&](std::uint64_t key, int facet, int slot, int round) {
        const std::size_t mask = table.size() - 1;
        for (std::size_t i = (key * 0x9E3779B97F4A7C15ull) >> 20 & mask;; i = (i + 1) & mask) {
            auto& e = table[i];
            if (e.round != round) {
                e = {key, facet, slot, round};
                ++unmatched;
                return;
            }
            if (e.key == key && e.facet >= 0) {
                facets[facet].nb[slot] = e.facet;
                facets[e.facet].nb[e.slot] = facet;
                e.facet = -1;
                --unmatched;
                return;
            }
        }
    };
    std::vector<int> visible, stack, stamp;
    std::vector<Horizon> horizon;
    for (int round = 1; !pending.empty(); ++round) {
        const int base = *pending.begin();
        // Farthest outside point of this facet, lowest index on ties.
        int apex = -1;
        double far = -1;
        for (int p : facets[base].outside)
            if (const double d = height(base, p); d > far || (d == far && p < apex)) far = d, apex = p;

        // Visible region: connected set of facets around base seen from the apex.
        // stamp = round marks visible, -round marks hidden.
        stamp.resize(facets.size(), 0);
        visible.clear();
        horizon.clear();
        stack.assign(1, base);
        stamp[base] = round;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            visible.push_back(f);
            for (int k = 0; k < 6; ++k) {
                const int g = facets[f].nb[k];
                if (std::abs(stamp[g]) != round) {
                    stamp[g] = height(g, apex) > eps ? round : -round;
                    if (stamp[g] == round) stack.push_back(g);
                }
                if (stamp[g] == -round) horizon.push_back({f, k, g});
            }
        }
        std::vector<int> orphans;
        for (int f : visible) {
            for (int p : facets[f].outside)
                if (p != apex) orphans.push_back(p);
            facets[f].outside.clear();
            facets[f].outside.shrink_to_fit();
            facets[f].alive = false;
            pending.erase(f);
        }

        const std::size_t first_new = facets.size();
        // At most five open ridges per new facet; keep the load factor under a half.
        while (table.size() < 10 * horizon.size() + 16) table.assign(2 * table.size(), OpenRidge{0, 0, 0, 0});
        for (const auto& h : horizon) {
            std::array<int, 6> v = facets[h.visible].v;
            v[h.slot] = apex;
            const int slot_in_hidden = opposite(h.hidden, h.visible);
            const int id = make_facet_at_ridge(v, h.visible, h.hidden, apex);
            auto& nf = facets[id];
            for (int k = 0; k < 6; ++k) {
                if (nf.v[k] == apex) {
                    nf.nb[k] = h.hidden;
                    continue;
                }
                // The apex is on every one of these ridges, so the other four identify it.
                std::uint64_t key = 0;
                for (int a = 0; a < 6; ++a)
                    if (a != k && nf.v[a] != apex) key = (key << 16) | static_cast<std::uint64_t>(nf.v[a]);
                link_ridge(key, id, k, round);
            }
            facets[h.hidden].nb[slot_in_hidden] = id;
        }
        if (unmatched != 0) throw NumericalError("convex_hull_6d: unmatched ridge");

        std::sort(orphans.begin(), orphans.end());
        for (int p : orphans) assign(p, first_new, facets.size());
    }

    WrenchHull hull;
    hull.points.assign(points.begin(), points.end());
    hull.full_dimensional = true;
    hull.interior_point = interior;
    for (auto& f : facets) {
        if (!f.alive) continue;
        f.measure = exact_plane(f.v, f.normal, f.offset);
        hull.volume += (f.offset - f.normal.dot(interior)) * f.measure / 720.0;
        hull.facets.push_back({f.normal, f.offset, std::vector<int>(f.v.begin(), f.v.end())});
    }
    return hull;
}

namespace detail {

template <int D>
using VecD = Eigen::Matrix<double, D, 1>;

inline bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

struct BruteFacet {
    std::vector<int> members;
    Eigen::VectorXd normal;
    double offset;
};

/// Supporting hyperplanes found by testing every D-subset, one per distinct member set.
template <int D>
std::vector<BruteFacet> brute_facets(const std::vector<VecD<D>>& pts, const VecD<D>& inside, double tol) {
    const int n = static_cast<int>(pts.size());
    std::vector<BruteFacet> out;
    std::set<std::vector<int>> seen;
    std::vector<int> idx(D);
    std::iota(idx.begin(), idx.end(), 0);
    do {
        Eigen::Matrix<double, D - 1, D> diff;
        for (int r = 0; r < D - 1; ++r) diff.row(r) = (pts[idx[r + 1]] - pts[idx[0]]).transpose();
        Eigen::FullPivLU<Eigen::Matrix<double, D - 1, D>> lu(diff);
        lu.setThreshold(1e-10);
        if (lu.rank() != D - 1) continue;
        VecD<D> nrm = lu.kernel().col(0);
        nrm.normalize();
        double off = nrm.dot(pts[idx[0]]);
        if (nrm.dot(inside) > off) {
            nrm = -nrm;
            off = -off;
        }
        bool supporting = true;
        std::vector<int> members;
        for (int i = 0; i < n && supporting; ++i) {
            const double s = nrm.dot(pts[i]) - off;
            if (s > tol) supporting = false;
            else if (s >= -tol) members.push_back(i);
        }
        if (!supporting || !seen.insert(members).second) continue;
        out.push_back({std::move(members), Eigen::VectorXd(nrm), off});
    } while (next_combination(idx, n));
    return out;
}

/// Volume of the convex hull of pts in D dimensions, as the sum over facets of
/// (height from the centroid) * (facet volume in D-1 dimensions) / D.
template <int D>
double brute_volume(const std::vector<VecD<D>>& pts, double tol) {
    if constexpr (D == 1) {
        double lo = pts.front()(0), hi = lo;
        for (const auto& p : pts) lo = std::min(lo, p(0)), hi = std::max(hi, p(0));
        return hi - lo;
    } else {
        if (static_cast<int>(pts.size()) < D + 1) return 0.0;
        VecD<D> c = VecD<D>::Zero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(pts.size());
        Eigen::MatrixXd centered(pts.size(), D);
        for (std::size_t i = 0; i < pts.size(); ++i) centered.row(i) = (pts[i] - c).transpose();
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
        const auto& s = svd.singularValues();
        if (!(s(0) > 0) || s(D - 1) <= kRankThreshold * s(0)) return 0.0;

        double volume = 0.0;
        for (const auto& f : brute_facets<D>(pts, c, tol)) {
            const VecD<D> nrm = f.normal;
            // Orthonormal basis of the facet hyperplane: columns 1..D-1 of Q.
            Eigen::Matrix<double, D, D> seed = Eigen::Matrix<double, D, D>::Identity();
            seed.col(0) = nrm;
            const Eigen::Matrix<double, D, D> q =
                Eigen::HouseholderQR<Eigen::Matrix<double, D, D>>(seed).householderQ();
            std::vector<VecD<D - 1>> projected;
            projected.reserve(f.members.size());
            for (int i : f.members) projected.push_back(q.rightCols(D - 1).transpose() * pts[i]);
            const double height = f.offset - nrm.dot(c);
            volume += height * brute_volume<D - 1>(projected, tol) / D;
        }
        return volume;
    }
}

}  // namespace detail

inline constexpr std::size_t kBruteForceMaxPoints = 25;

/// Reference hull by exhaustive enumeration of 6-point subsets. For test oracles;
/// limited to kBruteForceMaxPoints inputs.
inline WrenchHull brute_force_hull(std::span<const Vec6> points) {
    if (points.size() > kBruteForceMaxPoints)
        throw InvalidInput("brute_force_hull accepts at most " + std::to_string(kBruteForceMaxPoints) + " points");
    for (const auto& p : points)
        if (!p.allFinite()) throw InvalidInput("brute_force_hull: non-finite input point");
    WrenchHull hull = degenerate_hull(points);
    if (points.size() < 7 || affine_rank(points) < 6) return hull;

    const double tol = 1e-9 * detail::point_scale(points);
    const std::vector<Vec6> pts(points.begin(), points.end());
    hull.full_dimensional = true;
    for (auto& f : detail::brute_facets<6>(pts, hull.interior_point, tol))
        hull.facets.push_back({Vec6(f.normal), f.offset, std::move(f.members)});
    hull.volume = detail::brute_volume<6>(pts, tol);
    return hull;
}

/// Ferrari-Canny worst-case measure: radius of the largest origin-centered ball inside
/// the hull. Zero when the hull is degenerate or the origin is not strictly interior.
inline double epsilon_metric(const WrenchHull& hull) {
    if (!hull.full_dimensional || hull.facets.empty()) return 0.0;
    const double eps = kPlaneTolerance * detail::point_scale(hull.points);
    double best = hull.facets.front().offset;
    for (const auto& f : hull.facets) best = std::min(best, f.offset);
    return best > eps ? best : 0.0;
}

/// Ferrari-Canny average-case measure: hull volume.
inline double volume_metric(const WrenchHull& hull) { return hull.full_dimensional ? hull.volume : 0.0; }

}  // namespace graspq
