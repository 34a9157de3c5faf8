#pragma once

#include <stdexcept>
#include <string>

namespace cabem {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateEntity : Error { using Error::Error; };
struct DegenerateEdge : Error { using Error::Error; };
struct NonStarShapedFace : Error { using Error::Error; };
struct NonSPDDiffusion : Error { using Error::Error; };
struct NegativeReaction : Error { using Error::Error; };
struct BadCoefficients : Error { using Error::Error; };
struct SolverStagnation : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct CoincidentPoints : Error { using Error::Error; };
struct QuadratureBreakdown : Error { using Error::Error; };
struct SingularV : Error { using Error::Error; };
struct InconsistentDimensions : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace cabem
