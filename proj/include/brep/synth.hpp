#pragma once

// Programmatic construction of valid parts, used as fixtures by the tests and
// by `brep fixtures`.

#include "brep/model.hpp"
#include "brep/validate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brep::synth {

/// Low-level staging area. Indices returned by add_* are the final entity
/// indices. Mates are derived at build(): every pair of half-edges that share an
/// edge are mates.
class PartBuilder {
public:
    Index add_vertex(const Vec3& p);
    Index add_curve2d(CurveSpec curve);
    Index add_curve3d(CurveSpec curve);
    Index add_surface(SurfaceSpec surface);
    Index add_edge(Index curve3d, Index start_vertex, Index end_vertex);
    Index add_halfedge(Index curve2d, Index edge, bool orientation_wrt_edge);
    Index add_loop(std::vector<Index> halfedges);
    Index add_face(Index surface, bool surface_orientation, std::vector<Index> loops,
                   Index outer_loop, const UVBox& exact_domain,
                   std::vector<Vec2> singularities = {});
    /// A face with no loops covers its whole trim domain.
    Index add_untrimmed_face(Index surface, bool surface_orientation = true);
    Index add_shell(std::vector<Index> faces, std::vector<bool> orientation_wrt_solid);
    Index add_solid(std::vector<Index> shells);
    void set_mesh(Index face, FaceMesh mesh);
    /// Overrides the bounding box that build() would compute from vertices and mesh points.
    void set_bbox(const BoundingBox& bbox);

    const Vec3& vertex(Index i) const;
    std::size_t face_count() const { return topo_.faces.size(); }

    /// Throws ValidationError if the staged part has invariant errors.
    Part build() const;
    /// Same, without validation (for deliberately broken fixtures).
    Part build_unchecked() const;

private:
    GeometryStore geo_;
    TopologyStore topo_;
    std::vector<FaceMesh> meshes_;
    std::optional<BoundingBox> bbox_;
};

/// Axis-aligned box [0,dx]x[0,dy]x[0,dz]: 6 planar faces with outward normals,
/// 12 line edges, 24 half-edges, and a two-triangle mesh per face.
Part primitive_box(double dx, double dy, double dz);

/// Radius r, height h, axis z from the origin. A periodic side face with a seam
/// edge and two planar caps bounded by circles.
Part primitive_cylinder_capped(double r, double h);

/// Plate 0 <= z <= h between radii r_in < r_out. The top and bottom faces each
/// have an outer circle loop and an inner (hole) loop.
Part primitive_annulus_plate(double r_in, double r_out, double h);

/// Single toroidal face with two seam circles: V = 1, E = 2, F = 1.
Part primitive_torus(double major_radius, double minor_radius);

/// Single spherical face with a seam meridian, degenerate pole edges and two
/// declared singularities.
Part primitive_sphere(double r);

/// Open sheet: a hub n-gon, n tilted blade quads on the hub edges and n tip
/// quads on the blade ends, blade k scaled by 2^-k. F = 2n + 1, V = 5n, E = 7n.
/// Trimming curves are degree-1 B-splines. 3 <= n_blades <= 64.
Part fan_fixture(int n_blades);

/// Two unit cubes stacked along z that share the face z = 1. The shared face is
/// used by both shells with opposite orientation_wrt_solid flags.
Part nonmanifold_stacked_cubes();

/// Coplanar rectangles [0,1]x[0,1] and [1,4]x[0,1] at z = 0 sharing one edge.
Part two_face_sheet();

/// Box whose last face has no mesh.
Part box_with_failed_mesh();

/// One untrimmed face per surface kind (including an Other) and one edge per 3D
/// curve kind; spline entities randomized from `seed`.
Part geometry_showcase(std::uint64_t seed);

struct NamedFixture {
    std::string name;
    Part part;
};

/// Every fixture above with default dimensions, in a stable order.
std::vector<NamedFixture> standard_fixtures(std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Corruption

enum class Mutation { IndexOverflow, BrokenMates, OpenLoop, WrongOuterLoop, NonUnitAxis };

std::string_view mutation_name(Mutation m);
/// Throws UnknownMutation.
Mutation mutation_from_name(std::string_view name);
std::vector<Mutation> all_mutations();

/// Violation the validator is expected to report for a mutation of `part`.
struct MutationTarget {
    ViolationKind kind;
    std::string path;
};

/// Applies exactly one targeted invariant violation, changing exactly one
/// entity. Throws UnknownMutation for values outside the enum and Error when
/// the part has no entity the mutation can apply to.
Part corrupt(const Part& part, Mutation mutation);
MutationTarget mutation_target(const Part& part, Mutation mutation);

}  // namespace brep::synth
