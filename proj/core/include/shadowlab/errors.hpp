#pragma once

#include <stdexcept>
#include <string>

namespace shadowlab {

struct shadow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SHADOWLAB_ERROR(NAME)                        \
  struct NAME : shadow_error {                       \
    explicit NAME(const std::string& what = #NAME)   \
        : shadow_error(std::string(#NAME) + ": " + what) {} \
  }

SHADOWLAB_ERROR(OutsideExtendedNeighborhood);
SHADOWLAB_ERROR(RadiusTooLarge);
SHADOWLAB_ERROR(NoBracket);
SHADOWLAB_ERROR(SamplingFailure);
SHADOWLAB_ERROR(OriginOnLoop);
SHADOWLAB_ERROR(DegenerateTriangle);
SHADOWLAB_ERROR(BoundaryEscape);
SHADOWLAB_ERROR(DomainMismatch);
SHADOWLAB_ERROR(DimensionTooHigh);
SHADOWLAB_ERROR(SlabHit);
SHADOWLAB_ERROR(UnsupportedCodimension);
SHADOWLAB_ERROR(SignViolation);
SHADOWLAB_ERROR(NoConnection);
SHADOWLAB_ERROR(CostGuard);
SHADOWLAB_ERROR(ModelMismatch);
SHADOWLAB_ERROR(SeedFailure);
SHADOWLAB_ERROR(RadiusOverflow);
SHADOWLAB_ERROR(CertificationFailure);
SHADOWLAB_ERROR(BaseTooFar);
SHADOWLAB_ERROR(SlackTooLarge);
SHADOWLAB_ERROR(DisplacementTooLarge);
SHADOWLAB_ERROR(NoTCondition);
SHADOWLAB_ERROR(TransitTooLong);
SHADOWLAB_ERROR(Infeasible);
SHADOWLAB_ERROR(NotClassified);
SHADOWLAB_ERROR(EmptyIntersection);
SHADOWLAB_ERROR(ConfigError);
SHADOWLAB_ERROR(InvalidInput);

#undef SHADOWLAB_ERROR

}  // namespace shadowlab
