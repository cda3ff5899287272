#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpq {

/// 1-based source position. Columns count code points, not bytes.
struct Span {
  int line = 0;
  int col = 0;
};

enum class Code {
  LexError,
  ParseError,
  DesugarError,
  ScopeError,
  TypeMismatch,
  LinearityError,
  ParameterError,
  SimplenessError,
  ClassResolutionError,
  SimpleDeclIllFormed,
  FuelExhausted,
  NotACircuit,
  IOError,
};

const char* code_name(Code c);

struct Diagnostic {
  Code code;
  Span span;
  std::string file;
  std::string message;
  std::vector<std::string> notes;

  /// Renders as "code: file:line:col: message".
  std::string to_string() const;
};

/// Thrown for any error that maps to a single diagnostic.
class CompileError : public std::exception {
public:
  CompileError(Code code, Span span, std::string message)
      : diag_{code, span, {}, std::move(message), {}} {}
  explicit CompileError(Diagnostic d) : diag_(std::move(d)) {}

  const Diagnostic& diag() const { return diag_; }
  Diagnostic& diag() { return diag_; }
  const char* what() const noexcept override { return diag_.message.c_str(); }

private:
  Diagnostic diag_;
};

/// Invariant breaches that well-typed programs cannot trigger.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Raised when a cancellation signal arrives mid-evaluation.
class Interrupted : public std::exception {
public:
  const char* what() const noexcept override { return "interrupted"; }
};

}  // namespace dpq
