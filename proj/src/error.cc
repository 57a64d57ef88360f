// Copyright 2026 The affdeform Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "affdeform/error.h"

namespace affdeform {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorCode::kNonUniformGrid: return "NonUniformGrid";
    case ErrorCode::kZeroVelocity: return "ZeroVelocity";
    case ErrorCode::kSingularMap: return "SingularMap";
    case ErrorCode::kFixedPointMismatch: return "FixedPointMismatch";
    case ErrorCode::kInflectionAtTau: return "InflectionAtTau";
    case ErrorCode::kTangentThroughEndpoint: return "TangentThroughEndpoint";
    case ErrorCode::kNoAccessibleTangent: return "NoAccessibleTangent";
    case ErrorCode::kInflectionOnlyMatches: return "InflectionOnlyMatches";
    case ErrorCode::kNoTangentThroughEndpoint:
      return "NoTangentThroughEndpoint";
    case ErrorCode::kTargetOrientationInaccessible:
      return "TargetOrientationInaccessible";
    case ErrorCode::kCollinearTangents: return "CollinearTangents";
    case ErrorCode::kRootNotBracketed: return "RootNotBracketed";
    case ErrorCode::kDegenerateU: return "DegenerateU";
    case ErrorCode::kAdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorCode::kSingularSteering: return "SingularSteering";
    case ErrorCode::kEulerSingularity: return "EulerSingularity";
    case ErrorCode::kNoCollisionFreeWaypoint:
      return "NoCollisionFreeWaypoint";
    case ErrorCode::kIterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::kStubTooShort: return "StubTooShort";
    case ErrorCode::kSpeedBlendInfeasible: return "SpeedBlendInfeasible";
    case ErrorCode::kUnknownGenerator: return "UnknownGenerator";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace affdeform
