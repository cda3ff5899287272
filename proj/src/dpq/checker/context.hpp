#pragma once

#include "dpq/kernel/unify.hpp"

namespace dpq::checker {

using kernel::TermPtr;
using kernel::ValuePtr;

/// How a binding may be consumed.
enum class Mode {
  Linear,    // must be used exactly once on every control path
  Param,     // freely duplicable and discardable
  Irrel,     // forall-bound: types and other irrelevant positions only
  Evidence,  // class-constraint assumption
};

struct CtxEntry {
  std::string name;  // "_" and "" are unnamed
  ValuePtr type;
  Mode mode = Mode::Linear;
  int uses = 0;
  ValuePtr value;  // semantic value: a neutral, a let binding, or a refinement
  Span span;
  std::string cls;  // Evidence entries: the assumed class
};

/// A class obligation raised at an application site, discharged either
/// immediately or at the end of the enclosing definition.
struct Obligation {
  std::string cls;
  ValuePtr type;
  Span span;
  int hole_id = 0;
  int depth = 0;  // binder depth of the evidence hole
  // evidence assumptions visible at the creation site
  std::vector<std::tuple<int, std::string, ValuePtr>> assumptions;
};

struct ElabConfig {
  long fuel = 100000;
  std::string file;
};

}  // namespace dpq::checker
