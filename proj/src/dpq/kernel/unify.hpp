#pragma once

#include <map>
#include <set>

#include "dpq/kernel/eval.hpp"

namespace dpq::kernel {

enum class UnifyStatus { Ok, Mismatch, NonPattern };

struct UnifyResult {
  UnifyStatus status = UnifyStatus::Ok;
  ValuePtr left, right;  // offending sub-values on failure
  explicit operator bool() const { return status == UnifyStatus::Ok; }
};

/// Settings for one unification problem. With `metas` present, bare or
/// pattern-applied metavariables are solved. With `refinable` present,
/// those context levels may be instantiated (dependent case splitting);
/// solutions land in `refinements`.
struct UnifySettings {
  MetaCtx* metas = nullptr;
  const std::set<int>* refinable = nullptr;
  std::map<int, ValuePtr>* refinements = nullptr;
};

UnifyResult unify(const ValuePtr& a, const ValuePtr& b, int depth, EvalCtx& ctx,
                  UnifySettings& st);

/// Definitional equality: beta-delta conversion, no solving.
bool def_equal(const ValuePtr& a, const ValuePtr& b, int depth, EvalCtx& ctx);

/// Spec-level entry point on terms.
bool def_equal_terms(const TermPtr& a, const TermPtr& b, const Env& env,
                     const GlobalTable& globals, long fuel);

}  // namespace dpq::kernel
