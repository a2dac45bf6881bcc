// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace exwave {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct NonStarShaped : Error { using Error::Error; };
struct NonPositiveRadius : Error { using Error::Error; };
struct GridTooSmall : Error { using Error::Error; };

// solver
struct BadP : Error { using Error::Error; };
struct SupportTooLarge : Error { using Error::Error; };
struct CFLViolation : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };

// functionals
struct UnsupportedK : Error { using Error::Error; };
struct BadExponent : Error { using Error::Error; };
struct MissingSnapshot : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct NonPositiveValues : Error { using Error::Error; };

// multiplier
struct DomainViolation : Error { using Error::Error; };
struct QuadratureUnderresolved : Error { using Error::Error; };
struct RegimeViolation : Error { using Error::Error; };
struct SnapshotSpacingTooCoarse : Error { using Error::Error; };

// spectral
struct EmptyExterior : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };

// cli
struct ConfigInvalid : Error { using Error::Error; };
struct MissingArtifacts : Error { using Error::Error; };

} // namespace exwave
