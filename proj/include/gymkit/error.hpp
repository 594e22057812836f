#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gymkit {

/// Every failure the library reports is a gymkit::Error carrying one of these kinds.
/// The kind name is stable and is what bindings and the CLI surface to users.
enum class ErrorKind {
  InvalidSpace,
  UnflattenableSpace,
  ValueNotInSpace,
  DimensionMismatch,
  MalformedEncoding,
  EmptyBatch,
  NotABatch,
  EnvClosed,
  ResetNeeded,
  InvalidAction,
  InvalidArgument,
  RenderModeUnset,
  TransformedValueNotInSpace,
  MalformedId,
  DuplicateRegistration,
  MissingVersion,
  UnknownEnvironment,
  VersionNotFound,
  InvalidKwargs,
  UnserializableKwargs,
  MalformedDocument,
  WorkerSpawnFailure,
  WorkerFailure,
};

constexpr std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::UnflattenableSpace: return "UnflattenableSpace";
    case ErrorKind::ValueNotInSpace: return "ValueNotInSpace";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MalformedEncoding: return "MalformedEncoding";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::NotABatch: return "NotABatch";
    case ErrorKind::EnvClosed: return "EnvClosed";
    case ErrorKind::ResetNeeded: return "ResetNeeded";
    case ErrorKind::InvalidAction: return "InvalidAction";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RenderModeUnset: return "RenderModeUnset";
    case ErrorKind::TransformedValueNotInSpace: return "TransformedValueNotInSpace";
    case ErrorKind::MalformedId: return "MalformedId";
    case ErrorKind::DuplicateRegistration: return "DuplicateRegistration";
    case ErrorKind::MissingVersion: return "MissingVersion";
    case ErrorKind::UnknownEnvironment: return "UnknownEnvironment";
    case ErrorKind::VersionNotFound: return "VersionNotFound";
    case ErrorKind::InvalidKwargs: return "InvalidKwargs";
    case ErrorKind::UnserializableKwargs: return "UnserializableKwargs";
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::WorkerSpawnFailure: return "WorkerSpawnFailure";
    case ErrorKind::WorkerFailure: return "WorkerFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gymkit
