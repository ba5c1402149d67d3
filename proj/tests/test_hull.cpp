#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "graspq/hull.hpp"
#include "graspq/wrench.hpp"
#include "oracles.hpp"

using namespace graspq;

namespace {

std::set<std::vector<int>> facet_sets(const WrenchHull& h) {
    std::set<std::vector<int>> out;
    for (auto f : h.facets) {
        std::sort(f.vertices.begin(), f.vertices.end());
        out.insert(f.vertices);
    }
    return out;
}

std::vector<Vec6> cube6(double half) {
    std::vector<Vec6> pts;
    for (int mask = 0; mask < 64; ++mask) {
        Vec6 p;
        for (int k = 0; k < 6; ++k) p(k) = (mask >> k & 1) ? half : -half;
        pts.push_back(p);
    }
    return pts;
}

void expect_valid(const WrenchHull& h) {
    for (const auto& f : h.facets) {
        EXPECT_NEAR(f.normal.norm(), 1.0, 1e-9);
        for (const auto& p : h.points) EXPECT_LE(f.normal.dot(p), f.offset + 1e-9);
    }
    EXPECT_GE(h.volume, 0.0);
}

ContactSet contacts_at(std::initializer_list<std::pair<Vec3, Vec3>> pn) {
    ContactSet s;
    for (const auto& [p, n] : pn) s.contacts.push_back({p, n, 0.0, "c", 0});
    return s;
}

}  // namespace

TEST(ConvexHull, CrossPolytope) {
    const auto pts = oracle::cross_polytope();
    for (const auto& h : {convex_hull_6d(pts), brute_force_hull(pts)}) {
        ASSERT_TRUE(h.full_dimensional);
        EXPECT_EQ(h.facets.size(), 64u);
        EXPECT_NEAR(h.volume, 64.0 / 720.0, 1e-12);
        for (const auto& f : h.facets) EXPECT_NEAR(f.offset, 1.0 / std::sqrt(6.0), 1e-12);
        EXPECT_NEAR(epsilon_metric(h), 1.0 / std::sqrt(6.0), 1e-12);
        EXPECT_NEAR(volume_metric(h), 0.0888888888888889, 1e-9);
        expect_valid(h);
    }
}

TEST(ConvexHull, UnitSimplex) {
    const auto pts = oracle::unit_simplex();
    for (const auto& h : {convex_hull_6d(pts), brute_force_hull(pts)}) {
        ASSERT_TRUE(h.full_dimensional);
        EXPECT_EQ(h.facets.size(), 7u);
        EXPECT_NEAR(h.volume, 1.0 / 720.0, 1e-15);
        EXPECT_EQ(epsilon_metric(h), 0.0);
        expect_valid(h);
    }
}

TEST(ConvexHull, CubeWithCoplanarVertices) {
    auto pts = cube6(0.5);
    pts.push_back(Vec6::Zero());
    pts.push_back(Vec6::Constant(0.1));
    pts.push_back(pts[5]);  // duplicate
    const auto h = convex_hull_6d(pts);
    ASSERT_TRUE(h.full_dimensional);
    EXPECT_NEAR(h.volume, 1.0, 1e-9);
    EXPECT_NEAR(epsilon_metric(h), 0.5, 1e-12);
    expect_valid(h);
}

TEST(ConvexHull, MatchesBruteForceOnRandomSets) {
    auto g = oracle::rng(101);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 7 + trial % 14;
        const auto pts = oracle::random_points6(g, n);
        const auto fast = convex_hull_6d(pts);
        const auto slow = brute_force_hull(pts);
        ASSERT_EQ(fast.full_dimensional, slow.full_dimensional);
        EXPECT_EQ(facet_sets(fast), facet_sets(slow)) << "trial " << trial;
        EXPECT_NEAR(fast.volume, slow.volume, 1e-9 * std::max(1.0, slow.volume));
        EXPECT_NEAR(epsilon_metric(fast), epsilon_metric(slow), 1e-9);
        expect_valid(fast);
        for (int q = 0; q < 100; ++q) {
            const Vec6 x = 0.8 * oracle::random_gaussian6(g);
            EXPECT_EQ(fast.contains(x, 0.0), slow.contains(x, 0.0));
        }
    }
}

TEST(ConvexHull, RankDeficientInputIsDegenerate) {
    auto g = oracle::rng(5);
    std::vector<Vec6> flat;
    for (int i = 0; i < 30; ++i) {
        Vec6 p = oracle::random_gaussian6(g);
        p(3) = 0.25;  // affine 5-flat
        flat.push_back(p);
    }
    EXPECT_EQ(affine_rank(flat), 5);
    for (const auto& h : {convex_hull_6d(flat), brute_force_hull(std::span(flat).first(20))}) {
        EXPECT_FALSE(h.full_dimensional);
        EXPECT_TRUE(h.facets.empty());
        EXPECT_EQ(volume_metric(h), 0.0);
        EXPECT_EQ(epsilon_metric(h), 0.0);
    }
    const auto six = oracle::random_points6(g, 6);
    EXPECT_FALSE(convex_hull_6d(six).full_dimensional);
    EXPECT_FALSE(convex_hull_6d(std::vector<Vec6>{}).full_dimensional);
}

TEST(ConvexHull, IsometryInvariance) {
    auto g = oracle::rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pts = oracle::random_points6(g, 30);
        const Mat6 q = oracle::random_orthogonal6(g);
        std::vector<Vec6> moved;
        for (const auto& p : pts) moved.push_back(q * p);
        const auto a = convex_hull_6d(pts), b = convex_hull_6d(moved);
        EXPECT_NEAR(epsilon_metric(a), epsilon_metric(b), 1e-9);
        EXPECT_NEAR(volume_metric(a), volume_metric(b), 1e-9);
    }
}

TEST(ConvexHull, ScalingHomogeneity) {
    auto g = oracle::rng(8);
    for (double s : {2.0, 0.37, 11.0}) {
        const auto pts = oracle::random_points6(g, 25);
        std::vector<Vec6> scaled;
        for (const auto& p : pts) scaled.push_back(s * p);
        const auto a = convex_hull_6d(pts), b = convex_hull_6d(scaled);
        ASSERT_GT(epsilon_metric(a), 0.0);
        EXPECT_NEAR(epsilon_metric(b), s * epsilon_metric(a), 1e-9 * s * epsilon_metric(a));
        EXPECT_NEAR(volume_metric(b), std::pow(s, 6) * volume_metric(a), 1e-9 * std::pow(s, 6) * volume_metric(a));
    }
}

TEST(ConvexHull, AddingPointsNeverShrinksMetrics) {
    auto g = oracle::rng(9);
    auto pts = oracle::random_points6(g, 8);
    double eps = epsilon_metric(convex_hull_6d(pts)), vol = volume_metric(convex_hull_6d(pts));
    for (int i = 0; i < 30; ++i) {
        pts.push_back(oracle::random_gaussian6(g));
        const auto h = convex_hull_6d(pts);
        EXPECT_GE(epsilon_metric(h), eps - 1e-12);
        EXPECT_GE(volume_metric(h), vol - 1e-12);
        eps = epsilon_metric(h);
        vol = volume_metric(h);
    }
}

TEST(ConvexHull, EpsilonPositiveIffOriginInterior) {
    auto g = oracle::rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        auto pts = oracle::random_points6(g, 12);
        const Vec6 shift = 0.6 * oracle::random_gaussian6(g);
        for (auto& p : pts) p += shift;
        const auto h = convex_hull_6d(pts);
        const auto ref = brute_force_hull(pts);
        bool strictly_inside = true;
        for (const auto& f : ref.facets) strictly_inside = strictly_inside && f.offset > 1e-9;
        EXPECT_EQ(epsilon_metric(h) > 0, strictly_inside);
    }
}

TEST(ConvexHull, BruteForceRejectsLargeInputs) {
    auto g = oracle::rng(11);
    EXPECT_THROW(brute_force_hull(oracle::random_points6(g, 26)), InvalidInput);
}

TEST(Wrenches, PrimitiveExamples) {
    ContactParams frictionless;
    frictionless.mu = 0.0;
    frictionless.cone_edges = 3;

    const auto a = primitive_wrenches(contacts_at({{Vec3(0, 0, 1), Vec3(0, 0, 1)}}), frictionless, Vec3::Zero(), 1.0);
    ASSERT_EQ(a.size(), 3u);
    Vec6 expected_a;
    expected_a << 0, 0, -1, 0, 0, 0;
    EXPECT_LT((a[0].vector() - expected_a).norm(), 1e-15);

    const auto b = primitive_wrenches(contacts_at({{Vec3(1, 0, 0), Vec3(0, -1, 0)}}), frictionless, Vec3::Zero(), 1.0);
    Vec6 expected_b;
    expected_b << 0, 1, 0, 0, 0, 1;
    EXPECT_LT((b[0].vector() - expected_b).norm(), 1e-15);
}

TEST(Wrenches, LambdaScalesTorqueOnly) {
    const auto set = contacts_at({{Vec3(0.3, -0.1, 0.2), Vec3(0, 0.6, 0.8)}, {Vec3(-0.2, 0.4, 0.1), Vec3(1, 0, 0)}});
    const ContactParams params;
    const auto w1 = primitive_wrenches(set, params, Vec3(0.01, 0.02, 0.03), 1.0);
    const auto w2 = primitive_wrenches(set, params, Vec3(0.01, 0.02, 0.03), 2.0);
    ASSERT_EQ(w1.size(), 2u * params.cone_edges);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        EXPECT_EQ(w1[i].force, w2[i].force);
        EXPECT_LT((2.0 * w1[i].torque - w2[i].torque).norm(), 1e-15);
        EXPECT_NEAR(w1[i].force.norm(), 1.0, 1e-12);
    }
    EXPECT_THROW(primitive_wrenches(set, params, Vec3::Zero(), 0.0), InvalidInput);
}

TEST(Wrenches, ConeFrameMovesEdgesWithTheScene) {
    auto g = oracle::rng(23);
    const ContactParams params;
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 p = oracle::random_vec3(g, -0.1, 0.1), n = oracle::random_vec3(g, -1, 1).normalized();
        const Vec3 c = oracle::random_vec3(g, -0.05, 0.05);
        const Eigen::Quaterniond frame(oracle::rodrigues(oracle::random_vec3(g, -2, 2)));
        const Eigen::Matrix3d r = oracle::rodrigues(oracle::random_vec3(g, -2, 2));
        const auto base = primitive_wrenches(contacts_at({{p, n}}), params, c, 1.5, frame);
        const auto moved =
            primitive_wrenches(contacts_at({{r * p, r * n}}), params, r * c, 1.5, Eigen::Quaterniond(r) * frame);
        ASSERT_EQ(base.size(), moved.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            EXPECT_LT((r * base[i].force - moved[i].force).norm(), 1e-12);
            EXPECT_LT((r * base[i].torque - moved[i].torque).norm(), 1e-12);
            // pushes into the surface
            EXPECT_LT(base[i].force.dot(n), 0.0);
        }
    }
}

TEST(Wrenches, AntipodalPairHasNoTorqueAboutItsAxis) {
    ContactParams params;
    params.mu = 0.5;
    params.cone_edges = 8;
    const auto set = contacts_at({{Vec3(1, 0, 0), Vec3(1, 0, 0)}, {Vec3(-1, 0, 0), Vec3(-1, 0, 0)}});
    const auto pts = wrench_vectors(primitive_wrenches(set, params, Vec3::Zero(), 1.0));
    ASSERT_EQ(pts.size(), 16u);

    Eigen::MatrixXd m(pts.size(), 6);
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(m(i, 3), 0.0, 1e-15);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    EXPECT_EQ(lu.rank(), 5);

    EXPECT_FALSE(brute_force_hull(pts).full_dimensional);
    const auto q = quality_metrics(pts, 2);
    EXPECT_EQ(q.epsilon, 0.0);
    EXPECT_EQ(q.volume, 0.0);
    EXPECT_EQ(q.contact_count, 2);
}

TEST(Wrenches, NoContactsGiveSentinel) {
    const auto q = quality_metrics({}, 0);
    EXPECT_EQ(q.epsilon, -1.0);
    EXPECT_EQ(q.volume, 0.0);
}

TEST(WrenchCsv, ParsesWithAndWithoutHeader) {
    std::istringstream a("fx,fy,fz,tx,ty,tz\n1,0,0,0,0,0\n0,1,0,0,0,-2.5\n");
    const auto wa = parse_wrench_csv(a);
    ASSERT_EQ(wa.size(), 2u);
    EXPECT_EQ(wa[1](5), -2.5);
    std::istringstream b("1,0,0,0,0,0\n\n0,1,0,0,0,1e-3\n");
    EXPECT_EQ(parse_wrench_csv(b).size(), 2u);
}

TEST(WrenchCsv, RejectsMalformedRows) {
    std::istringstream few("1,2,3,4,5\n");
    EXPECT_THROW(parse_wrench_csv(few), ParseError);
    std::istringstream text("1,2,3,4,5,x\n");
    EXPECT_THROW(parse_wrench_csv(text), ParseError);
    EXPECT_THROW(load_wrench_csv("/nonexistent/w.csv"), IoError);
}

TEST(WrenchCsv, RoundTrip) {
    auto g = oracle::rng(12);
    const auto pts = oracle::random_points6(g, 10);
    std::stringstream s;
    write_wrench_csv(pts, s);
    const auto back = parse_wrench_csv(s);
    ASSERT_EQ(back.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i], pts[i]);
}
