#include "brep/errors.hpp"
#include "brep/geom_eval.hpp"
#include "brep/synth.hpp"
#include "brep/topo_nav.hpp"

#include <gtest/gtest.h>

#include <random>
#include <thread>

using namespace brep;

namespace {

Part square_loop_part(bool reverse_one, bool break_chain = false) {
    synth::PartBuilder b;
    const Vec3 corners[4] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    Index v[4];
    for (int k = 0; k < 4; ++k) v[k] = b.add_vertex(corners[k]);
    std::vector<Index> hes;
    for (int k = 0; k < 4; ++k) {
        Index a = v[k], c = v[(k + 1) % 4];
        if (break_chain && k == 2) c = v[0];
        const bool flip = reverse_one && k == 1;
        const Vec3 p = corners[k], q = corners[(k + 1) % 4];
        const Vec3 from = flip ? q : p, to = flip ? p : q;
        const Index curve = b.add_curve3d({3, {0, 1}, std::nullopt, LineCurve{from, to - from}});
        const Index e = flip ? b.add_edge(curve, c, a) : b.add_edge(curve, a, c);
        const Index pc = b.add_curve2d({2, {0, 1}, std::nullopt, LineCurve{p, q - p}});
        hes.push_back(b.add_halfedge(pc, e, !flip));
    }
    const Index loop = b.add_loop(hes);
    const Index s = b.add_surface({UVBox{0, 1, 0, 1}, std::nullopt, PlaneSurface{}});
    b.add_face(s, true, {loop}, loop, UVBox{0, 1, 0, 1});
    return break_chain ? b.build_unchecked() : b.build();
}

// Enumerates forward links as (kind, parent, child) and checks both directions.
void check_reverse_round_trip(const Part& p, const ReverseIndex& r) {
    const auto& t = p.topology;
    auto contains = [](const std::vector<Index>& v, std::size_t x) {
        return std::find(v.begin(), v.end(), static_cast<Index>(x)) != v.end();
    };
    for (std::size_t s = 0; s < t.solids.size(); ++s)
        for (Index sh : t.solids[s].shells) EXPECT_TRUE(contains(r.shell_solids[sh], s));
    for (std::size_t s = 0; s < r.shell_solids.size(); ++s)
        for (Index so : r.shell_solids[s]) EXPECT_TRUE(contains(t.solids[so].shells, s));
    for (std::size_t s = 0; s < t.shells.size(); ++s)
        for (Index f : t.shells[s].faces) EXPECT_TRUE(contains(r.face_shells[f], s));
    for (std::size_t f = 0; f < r.face_shells.size(); ++f)
        for (Index s : r.face_shells[f]) EXPECT_TRUE(contains(t.shells[s].faces, f));
    for (std::size_t f = 0; f < t.faces.size(); ++f) {
        for (Index l : t.faces[f].loops) EXPECT_EQ(r.loop_face[l], static_cast<Index>(f));
        EXPECT_TRUE(contains(r.surface_faces[t.faces[f].surface], f));
    }
    for (std::size_t l = 0; l < r.loop_face.size(); ++l)
        if (r.loop_face[l] >= 0) EXPECT_TRUE(contains(t.faces[r.loop_face[l]].loops, l));
    for (std::size_t s = 0; s < r.surface_faces.size(); ++s)
        for (Index f : r.surface_faces[s]) EXPECT_EQ(t.faces[f].surface, static_cast<Index>(s));
    for (std::size_t l = 0; l < t.loops.size(); ++l)
        for (Index h : t.loops[l].halfedges) EXPECT_EQ(r.halfedge_loop[h], static_cast<Index>(l));
    for (std::size_t h = 0; h < r.halfedge_loop.size(); ++h)
        if (r.halfedge_loop[h] >= 0) EXPECT_TRUE(contains(t.loops[r.halfedge_loop[h]].halfedges, h));
    for (std::size_t h = 0; h < t.halfedges.size(); ++h)
        EXPECT_TRUE(contains(r.edge_halfedges[t.halfedges[h].edge], h));
    for (std::size_t e = 0; e < r.edge_halfedges.size(); ++e)
        for (Index h : r.edge_halfedges[e]) EXPECT_EQ(t.halfedges[h].edge, static_cast<Index>(e));
    for (std::size_t e = 0; e < t.edges.size(); ++e)
        EXPECT_TRUE(contains(r.curve3d_edges[t.edges[e].curve3d], e));
    for (std::size_t c = 0; c < r.curve3d_edges.size(); ++c)
        for (Index e : r.curve3d_edges[c]) EXPECT_EQ(t.edges[e].curve3d, static_cast<Index>(c));
}

}  // namespace

TEST(ReverseIndex, RoundTripOnEveryFixture) {
    for (const auto& f : synth::standard_fixtures(2)) {
        SCOPED_TRACE(f.name);
        check_reverse_round_trip(f.part, build_reverse_index(f.part));
    }
}

TEST(ReverseIndex, SingleFaceLoop) {
    const Part p = square_loop_part(false);
    const ReverseIndex r = build_reverse_index(p);
    EXPECT_EQ(r.loop_face[0], 0);
}

TEST(ReverseIndex, BoxEdgesHaveTwoHalfEdges) {
    const ReverseIndex r = build_reverse_index(synth::primitive_box(1, 1, 1));
    ASSERT_EQ(r.edge_halfedges.size(), 12u);
    for (const auto& hs : r.edge_halfedges) EXPECT_EQ(hs.size(), 2u);
}

TEST(ReverseIndex, SharedFaceHasTwoShells) {
    const Part p = synth::nonmanifold_stacked_cubes();
    const ReverseIndex r = build_reverse_index(p);
    int shared = 0;
    for (const auto& shells : r.face_shells) shared += shells.size() == 2;
    EXPECT_EQ(shared, 1);
}

TEST(ReverseIndex, HalfEdgeInTwoLoopsIsInconsistent) {
    Part p = synth::primitive_box(1, 1, 1);
    p.topology.loops[1].halfedges.push_back(p.topology.loops[0].halfedges[0]);
    EXPECT_THROW(build_reverse_index(p), InconsistentTopology);
    Part q = synth::primitive_box(1, 1, 1);
    q.topology.faces[1].loops.push_back(q.topology.faces[0].loops[0]);
    EXPECT_THROW(build_reverse_index(q), InconsistentTopology);
}

TEST(ReverseIndex, NavigatorBuildsOnceAcrossThreads) {
    const Part p = synth::fan_fixture(12);
    const PartNavigator nav(p);
    std::vector<const ReverseIndex*> seen(8);
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < seen.size(); ++k)
        threads.emplace_back([&, k] { seen[k] = &nav.reverse(); });
    for (auto& t : threads) t.join();
    for (const ReverseIndex* r : seen) EXPECT_EQ(r, seen[0]);
    check_reverse_round_trip(p, *seen[0]);
}

TEST(LoopTraversal, SquareLoopAllForward) {
    const Part p = square_loop_part(false);
    const auto hs = loop_halfedges_oriented(p, 0);
    ASSERT_EQ(hs.size(), 4u);
    for (const auto& h : hs) EXPECT_FALSE(h.flip);
}

TEST(LoopTraversal, ReversedEdgeFlipsAndStillCloses) {
    const Part p = square_loop_part(true);
    const auto hs = loop_halfedges_oriented(p, 0);
    ASSERT_EQ(hs.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(hs[k].flip, k == 1);
}

TEST(LoopTraversal, BrokenChainIsOpenLoop) {
    EXPECT_THROW(loop_halfedges_oriented(square_loop_part(false, true), 0), OpenLoop);
}

TEST(LoopTraversal, EveryFixtureLoopCloses) {
    for (const auto& f : synth::standard_fixtures(4))
        for (std::size_t l = 0; l < f.part.topology.loops.size(); ++l)
            EXPECT_NO_THROW(loop_halfedges_oriented(f.part, static_cast<Index>(l))) << f.name;
}

TEST(HalfEdgeEval, EndpointsFollowOrientation) {
    const Part p = square_loop_part(true);
    for (Index h = 0; h < 4; ++h) {
        const Interval iv = halfedge_interval(p, h);
        const Edge& e = p.topology.edges[p.topology.halfedges[h].edge];
        const Vec3& start = p.geometry.vertices[e.start_vertex];
        const Vec3& end = p.geometry.vertices[e.end_vertex];
        const Vec3 at0 = halfedge_eval(p, h, iv.t0, EvalSpace::World3d);
        if (p.topology.halfedges[h].orientation_wrt_edge)
            EXPECT_LT((at0 - start).norm(), 1e-9);
        else
            EXPECT_LT((at0 - end).norm(), 1e-9);
    }
    EXPECT_THROW(halfedge_eval(p, 0, 1.5, EvalSpace::World3d), DomainError);
}

// The pcurve lifted through the surface traces the same points as the edge
// curve, and stays inside the face's exact domain.
TEST(HalfEdgeEval, PcurveLiftsOntoEdgeCurve) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0, 1);
    for (const auto& f : synth::standard_fixtures(4)) {
        SCOPED_TRACE(f.name);
        const Part& p = f.part;
        const ReverseIndex r = build_reverse_index(p);
        const double tol = 1e-9 * std::max(1.0, p.geometry.bbox.diagonal());
        for (std::size_t h = 0; h < p.topology.halfedges.size(); ++h) {
            const Index loop = r.halfedge_loop[h];
            if (loop < 0) continue;
            const Face& face = p.topology.faces[r.loop_face[loop]];
            const SurfaceSpec& s = p.geometry.surfaces[face.surface];
            const Interval iv = halfedge_interval(p, static_cast<Index>(h));
            for (int k = 0; k < 8; ++k) {
                const double t = iv.t0 + unit(rng) * (iv.t1 - iv.t0);
                const Vec3 uv = halfedge_eval(p, static_cast<Index>(h), t, EvalSpace::Param2d);
                const UVBox& d = face.exact_domain;
                EXPECT_GE(uv.x(), d.u0 - 1e-9);
                EXPECT_LE(uv.x(), d.u1 + 1e-9);
                EXPECT_GE(uv.y(), d.v0 - 1e-9);
                EXPECT_LE(uv.y(), d.v1 + 1e-9);
                const Vec3 lifted = eval_surface(s, uv.x(), uv.y()).position;
                const Vec3 world = halfedge_eval(p, static_cast<Index>(h), t, EvalSpace::World3d);
                EXPECT_LT((lifted - world).norm(), tol) << "half-edge " << h << " t " << t;
            }
        }
    }
}

TEST(HalfEdgeEval, MatesCoincideGeometrically) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0, 1);
    for (const auto& f : synth::standard_fixtures(4)) {
        SCOPED_TRACE(f.name);
        const Part& p = f.part;
        const double tol = 1e-7 * std::max(1.0, p.geometry.bbox.diagonal());
        for (std::size_t h = 0; h < p.topology.halfedges.size(); ++h) {
            const HalfEdge& he = p.topology.halfedges[h];
            for (Index m : he.mates) {
                const HalfEdge& mate = p.topology.halfedges[m];
                const Interval a = halfedge_interval(p, static_cast<Index>(h));
                const Interval b = halfedge_interval(p, m);
                const double s = unit(rng);
                const double t = a.t0 + s * (a.t1 - a.t0);
                const double sm = he.orientation_wrt_edge == mate.orientation_wrt_edge ? s : 1 - s;
                const double tm = b.t0 + sm * (b.t1 - b.t0);
                const Vec3 x = halfedge_eval(p, static_cast<Index>(h), t, EvalSpace::World3d);
                const Vec3 y = halfedge_eval(p, m, tm, EvalSpace::World3d);
                EXPECT_LT((x - y).norm(), tol);
            }
        }
    }
}

TEST(Euler, ClosedManifoldFixtures) {
    EXPECT_EQ(euler_characteristic(synth::primitive_box(1, 2, 3)), 2);
    EXPECT_EQ(euler_characteristic(synth::primitive_cylinder_capped(1, 2)), 2);
    EXPECT_EQ(euler_characteristic(synth::primitive_torus(3, 1)), 0);
}

TEST(OrientedNormal, BoxSolidNormalsPointOutward) {
    const Part p = synth::primitive_box(2, 3, 4);
    const Vec3 centroid(1, 1.5, 2);
    for (std::size_t f = 0; f < p.topology.faces.size(); ++f) {
        const Face& face = p.topology.faces[f];
        const double uu = 0.5 * (face.exact_domain.u0 + face.exact_domain.u1);
        const double vv = 0.5 * (face.exact_domain.v0 + face.exact_domain.v1);
        const Vec3 x = eval_surface(p.geometry.surfaces[face.surface], uu, vv).position;
        const Vec3 n = face_oriented_normal(p, static_cast<Index>(f), uu, vv, Index{0});
        EXPECT_NEAR(n.norm(), 1.0, 1e-12);
        EXPECT_NEAR(n.dot((x - centroid).normalized()), 1.0, 1e-12);
        EXPECT_EQ(n, face_oriented_normal(p, static_cast<Index>(f), uu, vv));
    }
}

TEST(OrientedNormal, SurfaceOrientationFlagNegates) {
    Part p = synth::primitive_box(1, 1, 1);
    const Vec3 before = face_oriented_normal(p, 0, 0.5, 0.5);
    p.topology.faces[0].surface_orientation = !p.topology.faces[0].surface_orientation;
    EXPECT_EQ(face_oriented_normal(p, 0, 0.5, 0.5), -before);
}

TEST(OrientedNormal, SharedFaceSolidNormalsAreOpposite) {
    const Part p = synth::nonmanifold_stacked_cubes();
    const ReverseIndex r = build_reverse_index(p);
    bool found = false;
    for (std::size_t f = 0; f < r.face_shells.size(); ++f) {
        if (r.face_shells[f].size() != 2) continue;
        found = true;
        const Face& face = p.topology.faces[f];
        const double uu = 0.5 * (face.exact_domain.u0 + face.exact_domain.u1);
        const double vv = 0.5 * (face.exact_domain.v0 + face.exact_domain.v1);
        const Vec3 a = face_oriented_normal(p, static_cast<Index>(f), uu, vv, r.face_shells[f][0]);
        const Vec3 b = face_oriented_normal(p, static_cast<Index>(f), uu, vv, r.face_shells[f][1]);
        EXPECT_EQ(a, -b);
    }
    EXPECT_TRUE(found);
    EXPECT_THROW(face_oriented_normal(p, 0, 0.5, 0.5, Index{1}), DomainError);
}

TEST(TopoRefAccess, KindChecked) {
    const Part p = synth::primitive_box(1, 1, 1);
    const TopoRef face{TopoKind::Face, 2, &p};
    EXPECT_EQ(face.surface().kind(), SurfaceKind::Plane);
    EXPECT_THROW(face.edge(), std::logic_error);
    const TopoRef edge{TopoKind::Edge, 3, &p};
    EXPECT_EQ(edge.curve().kind(), CurveKind::Line);
}
