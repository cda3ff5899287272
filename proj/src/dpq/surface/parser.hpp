#pragma once

#include "dpq/surface/ast.hpp"
#include "dpq/surface/token.hpp"

namespace dpq::surface {

/// Parses a whole module. Declarations start at column 1; blocks use
/// column alignment. Throws CompileError(ParseError) with the offending span.
Module parse_module(const std::vector<Token>& tokens);

/// Parses a single expression (REPL lines, CLI arguments).
ExprPtr parse_expression(const std::vector<Token>& tokens);

/// Parses a single pattern-or-expression line for the REPL.
Module parse_module_source(const std::string& source);

}  // namespace dpq::surface
