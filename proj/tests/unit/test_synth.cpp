#include "brep/errors.hpp"
#include "brep/synth.hpp"
#include "brep/validate.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace brep;
using namespace brep::synth;

namespace {

std::vector<Violation> errors_of(const Part& p) {
    std::vector<Violation> out;
    for (const Violation& v : validate_part(p))
        if (v.severity == Severity::Error) out.push_back(v);
    return out;
}

std::size_t diff_count(const Part& a, const Part& b) {
    std::size_t n = 0;
    auto count = [&n](const auto& x, const auto& y) {
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) n += !(x[i] == y[i]);
        n += std::max(x.size(), y.size()) - std::min(x.size(), y.size());
    };
    count(a.geometry.curves2d, b.geometry.curves2d);
    count(a.geometry.curves3d, b.geometry.curves3d);
    count(a.geometry.surfaces, b.geometry.surfaces);
    count(a.geometry.vertices, b.geometry.vertices);
    count(a.topology.solids, b.topology.solids);
    count(a.topology.shells, b.topology.shells);
    count(a.topology.faces, b.topology.faces);
    count(a.topology.loops, b.topology.loops);
    count(a.topology.halfedges, b.topology.halfedges);
    count(a.topology.edges, b.topology.edges);
    count(a.meshes, b.meshes);
    n += !(a.geometry.bbox == b.geometry.bbox);
    return n;
}

}  // namespace

TEST(Synth, EveryFixtureValidates) {
    for (const auto& f : standard_fixtures(3)) {
        SCOPED_TRACE(f.name);
        EXPECT_TRUE(errors_of(f.part).empty());
        EXPECT_EQ(f.part.meshes.size(), f.part.topology.faces.size());
    }
}

TEST(Synth, BoxCounts) {
    const Part box = primitive_box(1, 2, 3);
    const auto& t = box.topology;
    EXPECT_EQ(box.geometry.vertices.size(), 8u);
    EXPECT_EQ(t.edges.size(), 12u);
    EXPECT_EQ(t.faces.size(), 6u);
    EXPECT_EQ(t.halfedges.size(), 24u);
    EXPECT_EQ(t.shells.size(), 1u);
    EXPECT_EQ(t.solids.size(), 1u);
    const long euler = static_cast<long>(box.geometry.vertices.size()) -
                       static_cast<long>(t.edges.size()) + static_cast<long>(t.faces.size());
    EXPECT_EQ(euler, 2);
    for (const HalfEdge& h : t.halfedges) EXPECT_EQ(h.mates.size(), 1u);
    for (const FaceMesh& m : box.meshes) {
        EXPECT_EQ(m.points.size(), 4u);
        EXPECT_EQ(m.triangles.size(), 2u);
    }
    EXPECT_EQ(box.geometry.bbox.max, Vec3(1, 2, 3));
}

TEST(Synth, BoxRejectsBadExtents) {
    EXPECT_THROW(primitive_box(0, 1, 1), DomainError);
}

TEST(Synth, CylinderSideIsPeriodicFace) {
    const Part c = primitive_cylinder_capped(1.5, 2);
    const auto& side = c.geometry.surfaces[static_cast<std::size_t>(c.topology.faces[0].surface)];
    EXPECT_EQ(side.kind(), SurfaceKind::Cylinder);
    EXPECT_DOUBLE_EQ(side.trim_domain.u0, 0.0);
    EXPECT_DOUBLE_EQ(side.trim_domain.u1, 2 * std::numbers::pi);
    EXPECT_EQ(c.topology.faces.size(), 3u);
}

TEST(Synth, AnnulusTopFaceHasTwoLoops) {
    const Part a = primitive_annulus_plate(1, 2, 0.5);
    const Face& top = a.topology.faces[0];
    ASSERT_EQ(top.loops.size(), 2u);
    EXPECT_EQ(top.outer_loop, top.loops[0]);
    for (const Face& f : a.topology.faces) EXPECT_FALSE(f.has_singularities);
}

TEST(Synth, TorusIsGenusOne) {
    const Part t = primitive_torus(3, 1);
    EXPECT_EQ(t.geometry.vertices.size(), 1u);
    EXPECT_EQ(t.topology.edges.size(), 2u);
    EXPECT_EQ(t.topology.faces.size(), 1u);
}

TEST(Synth, SphereDeclaresPoles) {
    const Part s = primitive_sphere(2);
    const Face& f = s.topology.faces[0];
    EXPECT_TRUE(f.has_singularities);
    EXPECT_EQ(f.nr_singularities, 2);
}

class FanCounts : public ::testing::TestWithParam<int> {};

TEST_P(FanCounts, MatchClosedForm) {
    const int n = GetParam();
    const Part fan = fan_fixture(n);
    EXPECT_EQ(fan.topology.faces.size(), static_cast<std::size_t>(2 * n + 1));
    EXPECT_EQ(fan.geometry.vertices.size(), static_cast<std::size_t>(5 * n));
    EXPECT_EQ(fan.topology.edges.size(), static_cast<std::size_t>(7 * n));
    std::size_t spline_pcurves = 0;
    for (const CurveSpec& c : fan.geometry.curves2d) spline_pcurves += c.kind() == CurveKind::BSpline;
    EXPECT_EQ(spline_pcurves, fan.geometry.curves2d.size());
}

INSTANTIATE_TEST_SUITE_P(Blades, FanCounts, ::testing::Values(3, 8, 17, 64));

TEST(Synth, FanRejectsBladeCountOutOfRange) {
    EXPECT_THROW(fan_fixture(2), DomainError);
    EXPECT_THROW(fan_fixture(65), DomainError);
}

TEST(Synth, NonManifoldSharedFace) {
    const Part p = nonmanifold_stacked_cubes();
    ASSERT_EQ(p.topology.shells.size(), 2u);
    const auto& a = p.topology.shells[0];
    const auto& b = p.topology.shells[1];
    std::set<Index> fa(a.faces.begin(), a.faces.end());
    Index shared = -1;
    for (std::size_t k = 0; k < b.faces.size(); ++k)
        if (fa.count(b.faces[k])) {
            shared = b.faces[k];
            EXPECT_FALSE(b.orientation_wrt_solid[k]);
        }
    ASSERT_GE(shared, 0);
    EXPECT_EQ(p.topology.faces.size(), 11u);
    bool warned = false;
    for (const Violation& v : validate_part(p)) warned |= v.kind == ViolationKind::NonManifoldMates;
    EXPECT_TRUE(warned);
}

TEST(Synth, ShowcaseCoversEveryKind) {
    const Part p = geometry_showcase(1);
    std::set<SurfaceKind> sk;
    for (const auto& s : p.geometry.surfaces) sk.insert(s.kind());
    EXPECT_EQ(sk.size(), 10u);
    std::set<CurveKind> ck3, ck2;
    for (const auto& c : p.geometry.curves3d) ck3.insert(c.kind());
    for (const auto& c : p.geometry.curves2d) ck2.insert(c.kind());
    EXPECT_EQ(ck3.size(), 5u);
    EXPECT_EQ(ck2.size(), 5u);
    EXPECT_EQ(geometry_showcase(1), geometry_showcase(1));
    EXPECT_FALSE(geometry_showcase(1) == geometry_showcase(2));
}

TEST(Synth, BuilderRejectsInvalidPart) {
    PartBuilder b;
    b.add_face(5, true, {}, 0, {});
    EXPECT_THROW(b.build(), ValidationError);
    EXPECT_NO_THROW(b.build_unchecked());
}

// Each mutation produces exactly the targeted violation, on the named entity,
// and touches exactly one entity.
TEST(Corrupt, EachMutationIsDetectedAtItsTarget) {
    const std::vector<Part> bases{primitive_box(1, 1, 1), primitive_annulus_plate(1, 2, 1),
                                  fan_fixture(5), two_face_sheet()};
    for (const Part& base : bases) {
        for (Mutation m : all_mutations()) {
            SCOPED_TRACE(std::string(mutation_name(m)));
            const Part bad = corrupt(base, m);
            EXPECT_EQ(diff_count(base, bad), 1u);
            const auto target = mutation_target(base, m);
            const auto errs = errors_of(bad);
            ASSERT_EQ(errs.size(), 1u) << errs.front().path << " " << errs.front().message;
            EXPECT_EQ(errs[0].kind, target.kind);
            EXPECT_EQ(errs[0].path, target.path);
        }
    }
}

TEST(Corrupt, NamesRoundTrip) {
    for (Mutation m : all_mutations()) EXPECT_EQ(mutation_from_name(mutation_name(m)), m);
    EXPECT_THROW(mutation_from_name("teleport"), UnknownMutation);
    EXPECT_THROW(corrupt(primitive_box(1, 1, 1), static_cast<Mutation>(42)), UnknownMutation);
}

TEST(Corrupt, ValidatorMessagesNameTheProblem) {
    const Part box = primitive_box(1, 1, 1);
    const auto overflow = errors_of(corrupt(box, Mutation::IndexOverflow));
    ASSERT_EQ(overflow.size(), 1u);
    EXPECT_NE(overflow[0].message.find("index out of range"), std::string::npos);
    const auto mates = errors_of(corrupt(box, Mutation::BrokenMates));
    ASSERT_EQ(mates.size(), 1u);
    EXPECT_NE(mates[0].message.find("mates not symmetric"), std::string::npos);
}
