#pragma once

#include <functional>
#include <set>

#include "dpq/checker/context.hpp"
#include "dpq/kernel/globals.hpp"
#include "dpq/kernel/print.hpp"
#include "dpq/kernel/shape.hpp"
#include "dpq/surface/ast.hpp"

namespace dpq::checker {

namespace k = dpq::kernel;
namespace s = dpq::surface;

struct ElabResult {
  TermPtr term;
  ValuePtr type;
};

/// One elaboration session: a module or a single expression. Commits
/// declarations into the global table as it goes; diagnostics are collected
/// per declaration.
class Elaborator {
public:
  Elaborator(k::GlobalTable& globals, ElabConfig config)
      : globals_(globals), config_(std::move(config)) {}

  /// Elaborates declarations in order. Each declaration is committed before
  /// the next; a failing declaration is rolled back and skipped.
  std::vector<Diagnostic> check_module(const s::Module& mod);

  /// Elaborates one closed expression (REPL, CLI arguments).
  ElabResult infer_expression(const s::ExprPtr& e);

  /// Registers Circ-level builtins and the two built-in classes.
  static void install_builtins(k::GlobalTable& globals);

  k::GlobalTable& globals() { return globals_; }

private:
  friend struct TypeElab;

  k::GlobalTable& globals_;
  ElabConfig config_;
  k::MetaCtx metas_;
  std::vector<CtxEntry> ctx_;
  std::vector<Obligation> pending_;
  std::map<int, TermPtr> solved_holes_;
  int next_hole_ = 0;
  bool irrelevant_mode_ = false;
  mutable long fuel_left_ = 0;

  // ---- evaluation plumbing ----
  k::EvalCtx ectx() const {
    fuel_left_ = config_.fuel;
    return k::EvalCtx{globals_, const_cast<k::MetaCtx*>(&metas_), &fuel_left_, nullptr};
  }
  k::Env sem_env(int upto = -1) const;
  ValuePtr eval_here(const TermPtr& t);
  ValuePtr whnf_v(const ValuePtr& v);
  int depth() const { return (int)ctx_.size(); }
  std::string show(const ValuePtr& v);
  std::string show_term(const TermPtr& t);

  [[noreturn]] void fail(Code code, Span span, const std::string& msg);

  // ---- context ----
  int push(const std::string& name, ValuePtr type, Mode mode, Span span,
           ValuePtr value = nullptr, std::string cls = "");
  void pop_check(int n);
  void pop_silent(int n);
  std::vector<int> snapshot_uses() const;
  void restore_uses(const std::vector<int>& snap);
  std::vector<int> linear_delta(const std::vector<int>& snap) const;
  std::vector<std::tuple<int, std::string, ValuePtr>> assumptions() const;

  // ---- core elaboration ----
  ElabResult infer(const s::ExprPtr& e);
  TermPtr check(const s::ExprPtr& e, const ValuePtr& expected);
  TermPtr check_type(const s::ExprPtr& e);
  TermPtr coerce(TermPtr t, ValuePtr from, const ValuePtr& to, Span span,
                 const std::vector<int>& usage_snap);
  ElabResult infer_app(const s::ExprPtr& e);
  ElabResult infer_var(const s::ExprPtr& e);
  TermPtr check_lambda(const s::ExprPtr& e, const ValuePtr& expected);
  TermPtr check_let(const s::ExprPtr& e, const ValuePtr& expected);
  TermPtr check_let_general(const s::ExprPtr& e, const ValuePtr* expected, ValuePtr* out_type);
  TermPtr let_bindings(const std::vector<s::LetBinding>& bs, size_t i, const s::ExprPtr& body,
                       const ValuePtr* expected, ValuePtr* out_type);
  void bind_pattern(const s::Pattern& pat, TermPtr bound, ValuePtr ty, ValuePtr val,
                    std::vector<std::function<TermPtr(TermPtr)>>& wraps, int& pushed);

  struct CtorChain {
    std::vector<int> meta_ids;
    std::vector<ValuePtr> irrel_types;
    std::vector<std::string> irrel_hints;
    ValuePtr after_irrel;
    ValuePtr result;
  };
  CtorChain instantiate_ctor(const k::CtorInfo& ci, Span span);
  TermPtr check_case(const s::ExprPtr& scrut, const std::vector<s::CaseAlt>& alts,
                     const ValuePtr& expected, Span span, bool from_let = false);
  ElabResult elim_bang(ElabResult r);

  Mode mode_for(const ValuePtr& type);
  bool is_type_family(const ValuePtr& v);
  ValuePtr refresh_value(const ValuePtr& v, int at_depth);
  void refresh_ctx_from(int level);

  // unification wrappers
  void expect_unify(const ValuePtr& a, const ValuePtr& b, Span span);
  bool try_unify(const ValuePtr& a, const ValuePtr& b);

  // ---- constraints ----
  TermPtr constraint_obligation(const std::string& cls, const ValuePtr& type, Span span);
  void flush_obligations();
  std::optional<TermPtr> resolve_constraint(const std::string& cls, const ValuePtr& type,
                                            int at_depth,
                                            const std::vector<std::tuple<int, std::string, ValuePtr>>& assumptions,
                                            const std::set<std::string>* in_progress);
  bool is_parameter_type(const ValuePtr& type);
  bool is_simple_type(const ValuePtr& type);
  void note_param_occurrences(const ValuePtr& v, int lvl, int depth, std::set<int>& used);

  // ---- declarations ----
  void check_decl(const s::Decl& d);
  void check_def(const s::Decl& d);
  void check_data(const s::Decl& d);
  void check_simple_decl(const s::Decl& d);
  void check_object(const s::Decl& d);
  void check_gate(const s::Decl& d);
  void check_class(const s::Decl& d);
  void check_instance(const s::Decl& d);
  void derive_instances(const std::string& tycon);
  TermPtr zonk(const TermPtr& t, int depth);

  // shared by defs and instance methods: peels the expected type, binding
  // equation parameters, and checks the body
  TermPtr check_equation(const std::vector<std::string>& params, const s::ExprPtr& body,
                         ValuePtr expected, Span span);
};

}  // namespace dpq::checker
