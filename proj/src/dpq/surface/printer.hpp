#pragma once

#include <string>

#include "dpq/surface/ast.hpp"

namespace dpq::surface {

/// Precedence levels used by the printer; higher binds tighter.
/// 0 arrows/binders, 1 tensor, 2 '||', 3 '&&', 4 application, 5 atoms.
std::string print_expr(const ExprPtr& e, int prec = 0);

std::string print_pattern(const Pattern& p, bool atom = false);

/// Prints one declaration in re-parseable layout, ending with a newline.
std::string print_decl(const Decl& d);

std::string print_module(const Module& m);

}  // namespace dpq::surface
