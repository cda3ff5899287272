#include "dpq/common.hpp"

namespace dpq {

const char* code_name(Code c) {
  switch (c) {
    case Code::LexError: return "LexError";
    case Code::ParseError: return "ParseError";
    case Code::DesugarError: return "DesugarError";
    case Code::ScopeError: return "ScopeError";
    case Code::TypeMismatch: return "TypeMismatch";
    case Code::LinearityError: return "LinearityError";
    case Code::ParameterError: return "ParameterError";
    case Code::SimplenessError: return "SimplenessError";
    case Code::ClassResolutionError: return "ClassResolutionError";
    case Code::SimpleDeclIllFormed: return "SimpleDeclIllFormed";
    case Code::FuelExhausted: return "FuelExhausted";
    case Code::NotACircuit: return "NotACircuit";
    case Code::IOError: return "IOError";
  }
  return "UnknownError";
}

std::string Diagnostic::to_string() const {
  std::string out = code_name(code);
  out += ": ";
  out += file.empty() ? "<input>" : file;
  out += ":" + std::to_string(span.line) + ":" + std::to_string(span.col);
  out += ": " + message;
  return out;
}

}  // namespace dpq
