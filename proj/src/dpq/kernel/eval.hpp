#pragma once

#include "dpq/kernel/globals.hpp"

namespace dpq::kernel {

/// Bridges evaluation to the circuit builder; installed in runtime mode only.
struct RuntimeHooks {
  virtual ValuePtr apply_gate(const circuit::GateInfo& g,
                              const std::vector<ValuePtr>& args) = 0;
  virtual ValuePtr apply_builtin(Builtin b, const std::string& aux,
                                 const std::vector<ValuePtr>& args) = 0;
  virtual void tick() = 0;  // cancellation point
  virtual ~RuntimeHooks() = default;
};

/// Evaluation context. With `fuel` set the evaluator runs in type mode:
/// reductions are budgeted, cases and pair-lets may stick on neutrals, and
/// gates/builtins stay uninterpreted. With `hooks` set it runs in runtime
/// mode: call-by-value, unbounded, effecting gate applications.
struct EvalCtx {
  const GlobalTable& globals;
  MetaCtx* metas = nullptr;
  long* fuel = nullptr;
  RuntimeHooks* hooks = nullptr;

  bool type_mode() const { return hooks == nullptr; }
  void spend() {
    if (fuel && --*fuel < 0) throw FuelExhaustedError();
  }
};

int builtin_arity(Builtin b);

ValuePtr eval(const TermPtr& t, const Env& env, EvalCtx& ctx);
ValuePtr apply(const ValuePtr& fn, const ValuePtr& arg, AppFlavor flavor, EvalCtx& ctx);
ValuePtr apply_closure(const Closure& clo, const ValuePtr& arg, EvalCtx& ctx);
ValuePtr force(const ValuePtr& v, EvalCtx& ctx);

/// Weak-head normal form of a term under `env`, spending at most `fuel`
/// reduction steps (global unfoldings, betas, case selections).
ValuePtr whnf(const TermPtr& t, const Env& env, const GlobalTable& globals, long fuel,
              MetaCtx* metas = nullptr);

/// Reads a value back into a term at binder depth `depth`.
TermPtr quote(const ValuePtr& v, int depth, EvalCtx& ctx);

/// Resolves a solved metavariable head, if any. Idempotent.
ValuePtr zonk_head(const ValuePtr& v, EvalCtx& ctx);

/// The memoized value of a global in the requested mode.
ValuePtr global_value(const std::string& name, EvalCtx& ctx);

/// Counts S applications down to Z; null if the value is not a closed numeral.
std::optional<uint64_t> numeral_of(const ValuePtr& v);
ValuePtr numeral(uint64_t n);

}  // namespace dpq::kernel
