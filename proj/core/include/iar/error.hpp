#pragma once

#include <stdexcept>
#include <string>

namespace iar {

// Stable error taxonomy. `kind` is the machine-readable contract; the message
// carries a path-precise location (component id, JSON pointer, CSV row).
enum class ErrorKind {
  DuplicateId,
  InvalidTaxonomyPath,
  PersistentNotExtracted,
  UnknownComponent,
  ValueOutOfDomain,
  InvalidScenario,
  GazeVertical,
  ParseError,
  UnknownDimension,
  ImpactOutOfRange,
  DuplicatePrincipleId,
  InvalidInference,
  MissingComponent,
  UnknownEntity,
  SchemaError,
  IoError,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace iar
