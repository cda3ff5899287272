#pragma once

#include "dpq/kernel/eval.hpp"

namespace dpq::kernel {

/// Renders a core term in surface syntax. `names` holds binder names,
/// outermost first. Irrelevant and evidence applications are suppressed.
std::string print_term(const TermPtr& t, std::vector<std::string> names = {});

/// Quotes and prints a checker-level value.
std::string print_value(const ValuePtr& v, int depth, EvalCtx& ctx);

}  // namespace dpq::kernel
