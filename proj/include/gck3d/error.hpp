// Copyright 2026 The gck3d Authors
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

#ifndef GCK3D__ERROR_HPP_
#define GCK3D__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gck3d
{

enum class ErrorKind {
  PointBehindCamera,
  NoForwardSolution,
  GimbalLock,
  InvalidCamera,
  InvalidParams,
  DepthOutOfRange,
  NonPositiveHeight,
  SingularProjection,
  Unencodable,
  LengthMismatch,
  DegenerateProbability,
  NoGroundTruth,
  MalformedLine,
  MissingProjection,
  SchemaViolation,
};

constexpr std::string_view to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::PointBehindCamera: return "PointBehindCamera";
    case ErrorKind::NoForwardSolution: return "NoForwardSolution";
    case ErrorKind::GimbalLock: return "GimbalLock";
    case ErrorKind::InvalidCamera: return "InvalidCamera";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DepthOutOfRange: return "DepthOutOfRange";
    case ErrorKind::NonPositiveHeight: return "NonPositiveHeight";
    case ErrorKind::SingularProjection: return "SingularProjection";
    case ErrorKind::Unencodable: return "Unencodable";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateProbability: return "DegenerateProbability";
    case ErrorKind::NoGroundTruth: return "NoGroundTruth";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::MissingProjection: return "MissingProjection";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & what)
  : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Parse failure pinned to a 1-based line and 0-based field index (-1: whole line).
class ParseError : public Error
{
public:
  ParseError(ErrorKind kind, int line, int field, const std::string & what)
  : Error(
      kind, "line " + std::to_string(line) +
              (field >= 0 ? ", field " + std::to_string(field) : std::string()) + ": " + what),
    line_(line),
    field_(field)
  {
  }

  int line() const noexcept { return line_; }
  int field() const noexcept { return field_; }

private:
  int line_;
  int field_;
};

}  // namespace gck3d

#endif  // GCK3D__ERROR_HPP_
