#pragma once

#include "brep/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace brep {

enum class ViolationKind {
    IndexOutOfRange,
    MatesNotSymmetric,
    MateEdgeMismatch,
    NonManifoldMates,  // warning only
    OpenLoop,
    OuterLoopNotInFace,
    NonUnitAxis,
    NonOrthogonalAxes,
    TransformNotOrthonormal,
    TransformOnPlanarCurve,
    DimensionMismatch,
    BadInterval,
    BadTrimDomain,
    BadRadius,
    BadAngle,
    BadKnots,
    BadWeights,
    BadDegree,
    BadPoleGrid,
    BadOffset,
    EllipseFoci,  // warning only
    VertexOutsideBBox,
    SingularityMismatch,
    OrientationListLength,
    MeshCountMismatch,
    MeshIndexOutOfRange,
};

enum class Severity { Error, Warning };

struct Violation {
    ViolationKind kind;
    Severity severity = Severity::Error;
    std::string path;  // e.g. "topology/faces/3/outer_loop"
    std::string message;
};

std::string_view violation_kind_name(ViolationKind kind);

/// Checks every structural and geometric invariant of the part. Returns an empty
/// list iff the part is well-formed; warnings are included but do not make a part
/// invalid (see has_errors).
std::vector<Violation> validate_part(const Part& part);

bool has_errors(const std::vector<Violation>& violations);

/// Invariant checks of one curve/surface, usable on their own. `path` prefixes
/// every reported violation.
void validate_curve(const CurveSpec& curve, int expected_dim, const std::string& path,
                    std::vector<Violation>& out);
void validate_surface(const SurfaceSpec& surface, const std::string& path,
                      std::vector<Violation>& out, int depth = 0);

}  // namespace brep
