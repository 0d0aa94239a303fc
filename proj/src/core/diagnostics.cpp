// SPDX-License-Identifier: Apache-2.0
#include "actorforge/diagnostics.hpp"

namespace actorforge {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "?";
}

std::string render(const Diagnostic& d) {
  return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
         ": " + std::string(to_string(d.severity)) + ": " + d.message;
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["file"] = d.span.file;
  j["line"] = d.span.line;
  j["column"] = d.span.column;
  j["length"] = d.span.length;
  j["severity"] = to_string(d.severity);
  j["code"] = d.code;
  j["message"] = d.message;
  return j;
}

namespace {

std::string summary(const std::vector<Diagnostic>& diagnostics) {
  return diagnostics.empty() ? std::string("unknown error") : render(diagnostics.front());
}

}  // namespace

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summary(diagnostics)), diagnostics_(std::move(diagnostics)) {}

DiagnosticError::DiagnosticError(std::string code, SourceSpan span, const std::string& message)
    : DiagnosticError(std::vector<Diagnostic>{
          Diagnostic{std::move(span), Severity::Error, std::move(code), message}}) {}

}  // namespace actorforge
