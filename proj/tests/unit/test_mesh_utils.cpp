#include "brep/hdf5_io.hpp"
#include "brep/mesh_utils.hpp"
#include "brep/synth.hpp"
#include "support/tempdir.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

using namespace brep;
using brep::testing::TempDir;

namespace {

FaceMesh quad(double x0) {
    FaceMesh m;
    m.points = {Vec3(x0, 0, 0), Vec3(x0 + 1, 0, 0), Vec3(x0 + 1, 1, 0), Vec3(x0, 1, 0)};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

void check_valid(const TriangleMesh& m) {
    for (const auto& t : m.triangles)
        for (Index i : t) {
            EXPECT_GE(i, 0);
            EXPECT_LT(i, static_cast<Index>(m.vertices.size()));
        }
}

}  // namespace

TEST(GetMesh, TwoPatchesShareASeam) {
    const std::vector<PartMeshes> meshes{{quad(0), quad(1)}};
    const TriangleMesh m = get_mesh(meshes);
    EXPECT_EQ(m.vertices.size(), 6u);
    EXPECT_EQ(m.triangles.size(), 4u);
    check_valid(m);
}

TEST(GetMesh, EmptyInput) {
    EXPECT_TRUE(get_mesh(std::vector<PartMeshes>{}).empty());
    const std::vector<PartMeshes> failed{{std::nullopt, std::nullopt}, {}};
    const TriangleMesh m = get_mesh(failed);
    EXPECT_TRUE(m.vertices.empty());
    EXPECT_TRUE(m.triangles.empty());
}

TEST(GetMesh, SinglePatchPassesThrough) {
    const FaceMesh q = quad(3);
    const TriangleMesh m = get_mesh(std::vector<PartMeshes>{{q}});
    EXPECT_EQ(m.vertices, q.points);
    EXPECT_EQ(m.triangles, q.triangles);
}

TEST(GetMesh, BoxWeldsToEightVertices) {
    const TriangleMesh m = get_mesh({synth::primitive_box(1, 2, 3)});
    EXPECT_EQ(m.vertices.size(), 8u);
    EXPECT_EQ(m.triangles.size(), 12u);
    // Consistently oriented closed surface: every directed edge appears once,
    // and so does its reverse.
    std::map<std::pair<Index, Index>, int> directed;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) directed[{t[k], t[(k + 1) % 3]}]++;
    for (const auto& [e, n] : directed) {
        EXPECT_EQ(n, 1);
        EXPECT_EQ(directed.count({e.second, e.first}), 1u);
    }
}

TEST(GetMesh, OrientationFlagReversesWinding) {
    Part p = synth::primitive_box(1, 1, 1);
    const TriangleMesh before = get_mesh({p});
    p.topology.faces[0].surface_orientation = !p.topology.faces[0].surface_orientation;
    const TriangleMesh after = get_mesh({p});
    EXPECT_EQ(after.triangles[0][0], before.triangles[0][0]);
    EXPECT_EQ(after.triangles[0][1], before.triangles[0][2]);
    EXPECT_EQ(after.triangles[0][2], before.triangles[0][1]);
    EXPECT_EQ(after.triangles[2], before.triangles[2]);

    // read_meshes form: same result when the parts are supplied.
    std::vector<PartMeshes> meshes(1);
    for (const FaceMesh& f : p.meshes) meshes[0].push_back(f);
    const std::vector<Part> parts{p};
    EXPECT_EQ(get_mesh(meshes, &parts).triangles, after.triangles);
    EXPECT_EQ(get_mesh(meshes).triangles, before.triangles);
}

TEST(GetMesh, CountsAndIdempotence) {
    for (const auto& f : synth::standard_fixtures(1)) {
        SCOPED_TRACE(f.name);
        std::size_t points = 0, tris = 0;
        for (const FaceMesh& m : f.part.meshes) {
            points += m.points.size();
            tris += m.triangles.size();
        }
        const TriangleMesh m = get_mesh({f.part});
        EXPECT_LE(m.vertices.size(), points);
        EXPECT_EQ(m.triangles.size(), tris);
        check_valid(m);
        const TriangleMesh again = weld(m);
        EXPECT_EQ(again.vertices, m.vertices);
        EXPECT_EQ(again.triangles, m.triangles);
    }
}

TEST(GetMesh, NearbyPointsMergeWithinTolerance) {
    FaceMesh a = quad(0), b = quad(1);
    // diagonal of the union is sqrt(5); 1e-9 is well inside 1e-7 * diag.
    b.points[0].y() += 1e-9;
    b.points[3].x() += 1e-5;  // far outside the tolerance
    const TriangleMesh m = get_mesh(std::vector<PartMeshes>{{a, b}});
    EXPECT_EQ(m.vertices.size(), 7u);
}

TEST(GetMesh, BadTrianglesAreDropped) {
    FaceMesh q = quad(0);
    q.triangles.push_back({0, 1, 9});
    const TriangleMesh m = get_mesh(std::vector<PartMeshes>{{q}});
    EXPECT_EQ(m.triangles.size(), 2u);
    EXPECT_EQ(m.dropped_triangles, 1u);
}

TEST(MeshFailure, OneOfSixAndCorpus) {
    TempDir dir;
    const Part failed = synth::box_with_failed_mesh();
    EXPECT_EQ(failed_mesh_count(failed), 1u);
    write_parts({failed}, dir / "a.h5");
    write_parts({failed}, dir / "b.h5");
    std::ofstream(dir / "junk.h5") << "junk";
    const MeshFailureReport one = mesh_failure_rate({dir / "a.h5"});
    EXPECT_DOUBLE_EQ(one.rate(), 1.0 / 6.0);
    const MeshFailureReport two = mesh_failure_rate({dir / "a.h5", dir / "b.h5", dir / "junk.h5"});
    EXPECT_DOUBLE_EQ(two.rate(), 1.0 / 6.0);
    ASSERT_EQ(two.files.size(), 3u);
    EXPECT_DOUBLE_EQ(two.files[0].rate(), 1.0 / 6.0);
    EXPECT_FALSE(two.files[2].error.empty());
    EXPECT_EQ(two.faces, 12u);
}

TEST(Obj, Format) {
    const TriangleMesh m = get_mesh(std::vector<PartMeshes>{{quad(0)}});
    std::ostringstream out;
    write_obj(m, out);
    EXPECT_EQ(out.str(), "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3\nf 1 3 4\n");
}
