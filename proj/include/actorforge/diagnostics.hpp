// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace actorforge {

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;

  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning, Info };

std::string_view to_string(Severity s);

struct Diagnostic {
  SourceSpan span;
  Severity severity = Severity::Error;
  std::string code;  // LexError, ParseError, NameError, ...
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// `file:line:col: severity: message`
std::string render(const Diagnostic& d);
nlohmann::ordered_json to_json(const Diagnostic& d);

/// Base for every frontend failure; always carries at least one diagnostic.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diagnostics);
  DiagnosticError(std::string code, SourceSpan span, const std::string& message);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  const Diagnostic& first() const { return diagnostics_.front(); }

 private:
  std::vector<Diagnostic> diagnostics_;
};

#define ACTORFORGE_DIAGNOSTIC_ERROR(Name)                              \
  class Name : public DiagnosticError {                                \
   public:                                                             \
    Name(SourceSpan span, const std::string& message)                  \
        : DiagnosticError(#Name, std::move(span), message) {}          \
    explicit Name(std::vector<Diagnostic> diagnostics)                 \
        : DiagnosticError(std::move(diagnostics)) {}                   \
  };

ACTORFORGE_DIAGNOSTIC_ERROR(LexError)
ACTORFORGE_DIAGNOSTIC_ERROR(ParseError)
ACTORFORGE_DIAGNOSTIC_ERROR(ResolveError)  // NameError / TypeError / DirectionError diagnostics
ACTORFORGE_DIAGNOSTIC_ERROR(ConnectError)

#undef ACTORFORGE_DIAGNOSTIC_ERROR

}  // namespace actorforge
