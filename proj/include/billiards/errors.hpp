#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// projective kernel
struct ZeroHomogeneousTriple : GeometryError { using GeometryError::GeometryError; };
struct CoincidentPoints : GeometryError { using GeometryError::GeometryError; };
struct CoincidentLines : GeometryError { using GeometryError::GeometryError; };
struct LineAtInfinity : GeometryError { using GeometryError::GeometryError; };
struct IsotropicMirror : GeometryError { using GeometryError::GeometryError; };
struct InfinityMirror : GeometryError { using GeometryError::GeometryError; };
struct PointNotIncident : GeometryError { using GeometryError::GeometryError; };
struct IsotropicEps : GeometryError { using GeometryError::GeometryError; };
struct SingularMap : GeometryError { using GeometryError::GeometryError; };

// conics
struct PointNotOnConic : GeometryError { using GeometryError::GeometryError; };
struct IdenticalConics : GeometryError { using GeometryError::GeometryError; };
struct NotConfocal : GeometryError { using GeometryError::GeometryError; };
struct LambdaOutOfRange : GeometryError { using GeometryError::GeometryError; };

// orbits
struct DegenerateSeed : GeometryError { using GeometryError::GeometryError; };
struct SegmentCrossesSmallDisk : GeometryError { using GeometryError::GeometryError; };
struct InvalidSpec : GeometryError { using GeometryError::GeometryError; };

// classification
struct Inconsistent : GeometryError { using GeometryError::GeometryError; };
struct NotType3 : GeometryError { using GeometryError::GeometryError; };
struct LineNotSharedTangent : GeometryError { using GeometryError::GeometryError; };

// local asymptotics
struct DegenerateInput : GeometryError { using GeometryError::GeometryError; };
struct NonTangentGerms : GeometryError { using GeometryError::GeometryError; };
struct InvalidExponent : GeometryError { using GeometryError::GeometryError; };
struct InsufficientSamples : GeometryError { using GeometryError::GeometryError; };
struct NonAlgebraicInput : GeometryError { using GeometryError::GeometryError; };

// real pseudo-billiards
struct VertexOnMirrorLine : GeometryError { using GeometryError::GeometryError; };
struct SceneNotReflective : GeometryError { using GeometryError::GeometryError; };

// scene files / CLI
struct ParseError : GeometryError { using GeometryError::GeometryError; };
struct ValidationError : GeometryError { using GeometryError::GeometryError; };
struct CommandSceneMismatch : GeometryError { using GeometryError::GeometryError; };
struct EmptyViewport : GeometryError { using GeometryError::GeometryError; };

} // namespace billiards
