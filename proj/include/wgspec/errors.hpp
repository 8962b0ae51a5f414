#pragma once

#include <stdexcept>
#include <string>

namespace wgspec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define WGSPEC_ERROR(Name)                       \
    struct Name : Error {                        \
        using Error::Error;                      \
    }

// curve_frame
WGSPEC_ERROR(NonUnitSpeed);
WGSPEC_ERROR(DegenerateNormal);

// magnetics
WGSPEC_ERROR(EvaluationDomain);
WGSPEC_ERROR(UnsupportedFiber);

// cross_section
WGSPEC_ERROR(MeshTooCoarse);
WGSPEC_ERROR(GapTooSmall);

// effective_ops
WGSPEC_ERROR(NotRigid);
WGSPEC_ERROR(MissingMoments);
WGSPEC_ERROR(ClosedCurveUnsupported);

// reference_full
WGSPEC_ERROR(AdmissibilityViolated);
WGSPEC_ERROR(SeamIncompatible);
WGSPEC_ERROR(MemoryBudget);
WGSPEC_ERROR(EmptyWindow);
WGSPEC_ERROR(NonPositiveDistance);

// eigensolve
WGSPEC_ERROR(NotConverged);
WGSPEC_ERROR(ShiftSingular);

// harness / parsing
WGSPEC_ERROR(ConfigError);
WGSPEC_ERROR(ExprError);

#undef WGSPEC_ERROR

} // namespace wgspec
