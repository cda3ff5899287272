#include "dpq/checker/elaborate.hpp"

#include <algorithm>
#include <cassert>

#include "dpq/surface/desugar.hpp"

namespace dpq::checker {

using namespace dpq::kernel;

namespace {

struct FlagScope {
  bool& flag;
  bool saved;
  FlagScope(bool& f, bool v) : flag(f), saved(f) { f = v; }
  ~FlagScope() { flag = saved; }
};

}  // namespace

// ---------------------------------------------------------------------------
// plumbing

void Elaborator::fail(Code code, Span span, const std::string& msg) {
  Diagnostic d{code, span, config_.file, msg, {}};
  throw CompileError(std::move(d));
}

Env Elaborator::sem_env(int upto) const {
  if (upto < 0) upto = (int)ctx_.size();
  Env env;
  for (int i = 0; i < upto; i++) env = env.push(ctx_[i].value);
  return env;
}

ValuePtr Elaborator::eval_here(const TermPtr& t) {
  auto ctx = ectx();
  return eval(t, sem_env(), ctx);
}

ValuePtr Elaborator::whnf_v(const ValuePtr& v) {
  auto ctx = ectx();
  return zonk_head(v, ctx);
}

std::string Elaborator::show(const ValuePtr& v) {
  auto ctx = ectx();
  std::vector<std::string> names;
  for (auto& e : ctx_) names.push_back(e.name.empty() ? "_" : e.name);
  return print_term(quote(v, depth(), ctx), std::move(names));
}

std::string Elaborator::show_term(const TermPtr& t) {
  std::vector<std::string> names;
  for (auto& e : ctx_) names.push_back(e.name.empty() ? "_" : e.name);
  return print_term(t, std::move(names));
}

int Elaborator::push(const std::string& name, ValuePtr type, Mode mode, Span span,
                     ValuePtr value, std::string cls) {
  int level = depth();
  if (!value) value = fresh_var(level);
  ctx_.push_back({name, std::move(type), mode, 0, std::move(value), span, std::move(cls)});
  return level;
}

void Elaborator::pop_check(int n) {
  for (int i = 0; i < n; i++) {
    CtxEntry& e = ctx_.back();
    if (e.mode == Mode::Linear && e.uses != 1) {
      std::string msg = e.uses == 0
                            ? "linear variable '" + e.name + "' is never used"
                            : "linear variable '" + e.name + "' is used " +
                                  std::to_string(e.uses) + " times";
      fail(Code::LinearityError, e.span, msg);
    }
    ctx_.pop_back();
  }
}

void Elaborator::pop_silent(int n) {
  for (int i = 0; i < n; i++) ctx_.pop_back();
}

std::vector<int> Elaborator::snapshot_uses() const {
  std::vector<int> snap(ctx_.size());
  for (size_t i = 0; i < ctx_.size(); i++) snap[i] = ctx_[i].uses;
  return snap;
}

void Elaborator::restore_uses(const std::vector<int>& snap) {
  for (size_t i = 0; i < snap.size() && i < ctx_.size(); i++) ctx_[i].uses = snap[i];
}

std::vector<int> Elaborator::linear_delta(const std::vector<int>& snap) const {
  std::vector<int> out;
  for (size_t i = 0; i < snap.size() && i < ctx_.size(); i++)
    if (ctx_[i].mode == Mode::Linear && ctx_[i].uses > snap[i]) out.push_back((int)i);
  return out;
}

std::vector<std::tuple<int, std::string, ValuePtr>> Elaborator::assumptions() const {
  std::vector<std::tuple<int, std::string, ValuePtr>> out;
  for (size_t i = 0; i < ctx_.size(); i++)
    if (ctx_[i].mode == Mode::Evidence) {
      if (auto* c = vas<VClassT>(ctx_[i].type))
        out.push_back({(int)i, c->cls, c->arg});
    }
  return out;
}

void Elaborator::expect_unify(const ValuePtr& a, const ValuePtr& b, Span span) {
  auto ctx = ectx();
  UnifySettings st;
  st.metas = &metas_;
  UnifyResult r = unify(a, b, depth(), ctx, st);
  if (r.status == UnifyStatus::Ok) return;
  std::string msg = "type mismatch: expected " + show(b) + ", found " + show(a);
  if (r.status == UnifyStatus::NonPattern)
    msg += " (the implicit-argument problem is outside the solvable fragment)";
  fail(Code::TypeMismatch, span, msg);
}

bool Elaborator::try_unify(const ValuePtr& a, const ValuePtr& b) {
  auto saved = metas_.entries;
  auto ctx = ectx();
  UnifySettings st;
  st.metas = &metas_;
  UnifyResult r = unify(a, b, depth(), ctx, st);
  if (r.status == UnifyStatus::Ok) return true;
  metas_.entries = std::move(saved);
  return false;
}

Mode Elaborator::mode_for(const ValuePtr& type) {
  ValuePtr w = whnf_v(type);
  if (vas<VClassT>(w)) return Mode::Evidence;
  return is_parameter_type(w) ? Mode::Param : Mode::Linear;
}

bool Elaborator::is_type_family(const ValuePtr& v) {
  auto ctx = ectx();
  ValuePtr cur = zonk_head(v, ctx);
  int probe = depth() + 512;
  while (auto* pi = vas<VPi>(cur)) cur = zonk_head(apply_closure(pi->cod, fresh_var(probe++), ctx), ctx);
  return vas<VType>(cur) != nullptr;
}

ValuePtr Elaborator::refresh_value(const ValuePtr& v, int at_depth) {
  auto ctx = ectx();
  TermPtr t = quote(v, at_depth, ctx);
  return eval(t, sem_env(at_depth), ctx);
}

void Elaborator::refresh_ctx_from(int level) {
  for (int i = level; i < depth(); i++) ctx_[i].type = refresh_value(ctx_[i].type, i);
}

// ---------------------------------------------------------------------------
// variables and applications

ElabResult Elaborator::infer_var(const s::ExprPtr& e) {
  const std::string& name = e->name;
  for (int i = depth() - 1; i >= 0; i--) {
    CtxEntry& entry = ctx_[(size_t)i];
    if (entry.name != name || name == "_" || name.empty()) continue;
    if (!irrelevant_mode_) {
      if (entry.mode == Mode::Irrel)
        fail(Code::TypeMismatch, e->span,
             "irrelevant variable '" + name + "' used in a relevant position");
      if (entry.mode == Mode::Linear) {
        if (entry.uses >= 1)
          fail(Code::LinearityError, e->span,
               "linear variable '" + name + "' is used " + std::to_string(entry.uses + 1) +
                   " times");
        entry.uses++;
      }
    }
    return {mk<TVar>(depth() - 1 - i), entry.type};
  }
  const GlobalEntry* g = globals_.find(name);
  if (!g) fail(Code::ScopeError, e->span, "unknown identifier '" + name + "'");
  if (!g->type_value) {
    auto ctx = ectx();
    Env empty;
    g->type_value = eval(g->type, empty, ctx);
  }
  return {mk<TGlobal>(name), g->type_value};
}

ElabResult Elaborator::elim_bang(ElabResult r) {
  for (;;) {
    ValuePtr w = whnf_v(r.type);
    if (auto* b = vas<VBang>(w)) {
      r.term = mk<TForce>(r.term);
      r.type = b->inner;
      continue;
    }
    r.type = w;
    return r;
  }
}

ElabResult Elaborator::infer_app(const s::ExprPtr& e) {
  std::vector<const s::ExprPtr*> args;
  const s::ExprPtr* cur = &e;
  while ((*cur)->kind == s::ExprKind::App) {
    args.push_back(&(*cur)->kids[1]);
    cur = &(*cur)->kids[0];
  }
  std::reverse(args.begin(), args.end());
  ElabResult head = infer(*cur);
  TermPtr t = head.term;
  ValuePtr ty = head.type;
  auto ctx = ectx();
  for (auto* argp : args) {
    const s::ExprPtr& arg = *argp;
    // normalize the head type until an explicit binder appears
    for (;;) {
      ValuePtr w = whnf_v(ty);
      if (auto* b = vas<VBang>(w)) {
        t = mk<TForce>(t);
        ty = b->inner;
        continue;
      }
      if (auto* pi = vas<VPi>(w)) {
        if (pi->flavor == PiFlavor::Irrel || pi->flavor == PiFlavor::Impl) {
          int m = metas_.fresh(pi->dom, depth(), arg->span);
          t = mk<TApp>(t, mk<TMeta>(m), AppFlavor::Irrel);
          ty = apply_closure(pi->cod, vmk<VNeutral>(NeutralHead{HMeta{m}}, std::vector<SpineEntry>{}), ctx);
          continue;
        }
        if (pi->flavor == PiFlavor::Inst) {
          auto* c = vas<VClassT>(whnf_v(pi->dom));
          if (!c) throw InternalError("constraint binder without a class domain");
          TermPtr ev = constraint_obligation(c->cls, c->arg, arg->span);
          t = mk<TApp>(t, ev, AppFlavor::Inst);
          ty = apply_closure(pi->cod, vmk<VEvToken>(), ctx);
          continue;
        }
        break;  // explicit binder: consume the surface argument
      }
      fail(Code::TypeMismatch, arg->span,
           "cannot apply a value of type " + show(w) + "; it is not a function");
    }
    auto* pi = vas<VPi>(whnf_v(ty));
    TermPtr at = check(arg, pi->dom);
    ValuePtr av = eval_here(at);
    t = mk<TApp>(t, at, AppFlavor::Expl);
    ty = apply_closure(pi->cod, av, ctx);
  }
  return {t, ty};
}

// ---------------------------------------------------------------------------
// infer / check

ElabResult Elaborator::infer(const s::ExprPtr& e) {
  switch (e->kind) {
    case s::ExprKind::Var:
    case s::ExprKind::Con:
      return infer_var(e);
    case s::ExprKind::Unit:
      return {mk<TUnitV>(), vmk<VUnitT>()};
    case s::ExprKind::UnitType:
      return {mk<TUnitT>(), vmk<VType>()};
    case s::ExprKind::TypeKind:
      return {mk<TType>(), vmk<VType>()};
    case s::ExprKind::App:
      return infer_app(e);
    case s::ExprKind::Pair: {
      ElabResult l = infer(e->kids[0]);
      ElabResult r = infer(e->kids[1]);
      return {mk<TPair>(l.term, r.term), vmk<VTensor>(l.type, r.type)};
    }
    case s::ExprKind::Tensor:
    case s::ExprKind::Arrow:
    case s::ExprKind::Pi:
    case s::ExprKind::Exists:
    case s::ExprKind::Bang:
    case s::ExprKind::CircType:
    case s::ExprKind::Constraint:
      return {check_type(e), vmk<VType>()};
    case s::ExprKind::Let: {
      ElabResult out;
      out.term = check_let_general(e, nullptr, &out.type);
      return out;
    }
    case s::ExprKind::Lam:
      fail(Code::TypeMismatch, e->span,
           "cannot infer the type of a lambda; an annotation is required");
    case s::ExprKind::Case:
      fail(Code::TypeMismatch, e->span,
           "cannot infer the type of a case expression here");
    default:
      fail(Code::TypeMismatch, e->span, "cannot infer a type for this expression");
  }
}

TermPtr Elaborator::check(const s::ExprPtr& e, const ValuePtr& expected0) {
  ValuePtr expected = whnf_v(expected0);

  if (e->kind == s::ExprKind::Let) return check_let_general(e, &expected, nullptr);
  if (e->kind == s::ExprKind::Case)
    return check_case(e->kids[0], e->alts, expected, e->span);

  if (vas<VType>(expected)) return check_type(e);

  if (auto* b = vas<VBang>(expected)) {
    auto snap = snapshot_uses();
    TermPtr inner = check(e, b->inner);
    auto delta = linear_delta(snap);
    if (!delta.empty())
      fail(Code::LinearityError, e->span,
           "a duplicable (!) term cannot capture the linear variable '" +
               ctx_[delta[0]].name + "'");
    return mk<TLift>(inner);
  }

  if (auto* pi = vas<VPi>(expected)) {
    auto ctx = ectx();
    if (pi->flavor == PiFlavor::Irrel) {
      int l = push(pi->hint, pi->dom, Mode::Irrel, e->span);
      TermPtr body = check(e, apply_closure(pi->cod, ctx_[l].value, ctx));
      pop_silent(1);
      return mk<TLam>(pi->hint, body);
    }
    if (pi->flavor == PiFlavor::Inst) {
      auto* c = vas<VClassT>(whnf_v(pi->dom));
      int l = push("", pi->dom, Mode::Evidence, e->span, nullptr, c ? c->cls : "");
      TermPtr body = check(e, apply_closure(pi->cod, ctx_[l].value, ctx));
      pop_silent(1);
      return mk<TLam>("ev", body);
    }
    if (pi->flavor == PiFlavor::Impl && e->kind != s::ExprKind::Lam) {
      int l = push(pi->hint, pi->dom, Mode::Param, e->span);
      TermPtr body = check(e, apply_closure(pi->cod, ctx_[l].value, ctx));
      pop_silent(1);
      return mk<TLam>(pi->hint, body);
    }
    if (e->kind == s::ExprKind::Lam) return check_lambda(e, expected);
  }

  if (e->kind == s::ExprKind::Pair) {
    auto ctx = ectx();
    if (auto* t = vas<VTensor>(expected)) {
      TermPtr l = check(e->kids[0], t->lhs);
      TermPtr r = check(e->kids[1], t->rhs);
      return mk<TPair>(l, r);
    }
    if (auto* ex = vas<VExists>(expected)) {
      TermPtr l = check(e->kids[0], ex->dom);
      ValuePtr lv = eval_here(l);
      TermPtr r = check(e->kids[1], apply_closure(ex->cod, lv, ctx));
      return mk<TPair>(l, r);
    }
  }

  auto snap = snapshot_uses();
  ElabResult r = infer(e);
  return coerce(r.term, r.type, expected, e->span, snap);
}

TermPtr Elaborator::coerce(TermPtr t, ValuePtr from0, const ValuePtr& to0, Span span,
                           const std::vector<int>& usage_snap) {
  ValuePtr from = whnf_v(from0);
  ValuePtr to = whnf_v(to0);
  auto ctx = ectx();

  if (auto* fb = vas<VBang>(from)) {
    if (auto* tb = vas<VBang>(to)) {
      if (try_unify(from, to)) return t;
      TermPtr inner = coerce(mk<TForce>(t), fb->inner, tb->inner, span, usage_snap);
      if (!linear_delta(usage_snap).empty())
        fail(Code::LinearityError, span, "a duplicable (!) term cannot capture linear variables");
      return mk<TLift>(inner);
    }
    return coerce(mk<TForce>(t), fb->inner, to, span, usage_snap);
  }

  if (auto* pi = vas<VPi>(from)) {
    bool to_same_flavor = false;
    if (auto* tp = vas<VPi>(to)) to_same_flavor = tp->flavor == pi->flavor;
    if (!to_same_flavor) {
      if (pi->flavor == PiFlavor::Irrel || pi->flavor == PiFlavor::Impl) {
        int m = metas_.fresh(pi->dom, depth(), span);
        TermPtr t2 = mk<TApp>(t, mk<TMeta>(m), AppFlavor::Irrel);
        ValuePtr ty2 = apply_closure(
            pi->cod, vmk<VNeutral>(NeutralHead{HMeta{m}}, std::vector<SpineEntry>{}), ctx);
        return coerce(t2, ty2, to, span, usage_snap);
      }
      if (pi->flavor == PiFlavor::Inst) {
        auto* c = vas<VClassT>(whnf_v(pi->dom));
        if (!c) throw InternalError("constraint binder without a class domain");
        TermPtr ev = constraint_obligation(c->cls, c->arg, span);
        TermPtr t2 = mk<TApp>(t, ev, AppFlavor::Inst);
        return coerce(t2, apply_closure(pi->cod, vmk<VEvToken>(), ctx), to, span, usage_snap);
      }
    }
  }

  if (vas<VBang>(to) && !vas<VBang>(from)) {
    TermPtr inner = coerce(t, from, vas<VBang>(to)->inner, span, usage_snap);
    if (!linear_delta(usage_snap).empty())
      fail(Code::LinearityError, span, "a duplicable (!) term cannot capture linear variables");
    return mk<TLift>(inner);
  }

  expect_unify(from, to, span);
  return t;
}

// ---------------------------------------------------------------------------
// lambdas

TermPtr Elaborator::check_lambda(const s::ExprPtr& e, const ValuePtr& expected0) {
  auto ctx = ectx();
  ValuePtr expected = whnf_v(expected0);
  bool family = is_type_family(expected);
  FlagScope irr(irrelevant_mode_, irrelevant_mode_ || family);

  struct Wrap {
    std::string hint;
  };
  std::vector<Wrap> wraps;
  int pushed = 0;
  ValuePtr cur = expected;
  size_t bi = 0;
  while (bi < e->binders.size()) {
    auto* pi = vas<VPi>(whnf_v(cur));
    if (!pi)
      fail(Code::TypeMismatch, e->span,
           "lambda has more parameters than its expected type " + show(expected0));
    if (pi->flavor == PiFlavor::Irrel) {
      int l = push(pi->hint, pi->dom, Mode::Irrel, e->span);
      wraps.push_back({pi->hint});
      pushed++;
      cur = apply_closure(pi->cod, ctx_[l].value, ctx);
      continue;
    }
    if (pi->flavor == PiFlavor::Inst) {
      auto* c = vas<VClassT>(whnf_v(pi->dom));
      int l = push("", pi->dom, Mode::Evidence, e->span, nullptr, c ? c->cls : "");
      wraps.push_back({"ev"});
      pushed++;
      cur = apply_closure(pi->cod, ctx_[l].value, ctx);
      continue;
    }
    const std::string& name = e->binders[bi++];
    Mode mode = family ? Mode::Param : mode_for(pi->dom);
    int l = push(name, pi->dom, mode, e->span);
    wraps.push_back({name});
    pushed++;
    cur = apply_closure(pi->cod, ctx_[l].value, ctx);
  }
  TermPtr body = check(e->kids[0], cur);
  pop_check(pushed);
  for (auto it = wraps.rbegin(); it != wraps.rend(); ++it) body = mk<TLam>(it->hint, body);
  return body;
}

// ---------------------------------------------------------------------------
// let bindings and patterns

TermPtr Elaborator::check_let(const s::ExprPtr& e, const ValuePtr& expected) {
  return check_let_general(e, &expected, nullptr);
}

// Handles one binding group; `expected` may be null (inference), in which
// case `out_type` receives the type of the body.
TermPtr Elaborator::check_let_general(const s::ExprPtr& e, const ValuePtr* expected,
                                      ValuePtr* out_type) {
  return let_bindings(e->bindings, 0, e->kids[0], expected, out_type);
}

TermPtr Elaborator::let_bindings(const std::vector<s::LetBinding>& bs, size_t i,
                                 const s::ExprPtr& body, const ValuePtr* expected,
                                 ValuePtr* out_type) {
  if (i == bs.size()) {
    if (expected) return check(body, *expected);
    ElabResult r = infer(body);
    if (out_type) *out_type = r.type;
    return r.term;
  }
  const s::LetBinding& b = bs[i];

  if (b.pat.kind == s::Pattern::Kind::Con) {
    // single-constructor elimination via a one-branch case
    s::CaseAlt alt;
    alt.con = b.pat.name;
    alt.span = b.pat.span;
    for (auto& a : b.pat.args) alt.binders.push_back(a.name);
    auto rest = std::make_shared<s::Expr>();
    rest->kind = s::ExprKind::Let;
    rest->span = b.span;
    rest->bindings.assign(bs.begin() + i + 1, bs.end());
    rest->kids.push_back(body);
    s::ExprPtr rest_e = rest->bindings.empty() ? body : rest;
    alt.body = rest_e;
    if (!expected)
      fail(Code::TypeMismatch, b.span,
           "constructor patterns in let need an expected type; annotate the definition");
    return check_case(b.rhs, {alt}, *expected, b.span, /*from_let=*/true);
  }

  auto snapdepth = depth();
  ElabResult r = elim_bang(infer(b.rhs));
  ValuePtr bound_v = eval_here(r.term);

  int pushed = 0;
  std::vector<std::function<TermPtr(TermPtr)>> wraps;
  bind_pattern(b.pat, r.term, r.type, bound_v, wraps, pushed);
  TermPtr inner = let_bindings(bs, i + 1, body, expected, out_type);
  pop_check(pushed);
  (void)snapdepth;
  for (auto it = wraps.rbegin(); it != wraps.rend(); ++it) inner = (*it)(inner);
  return inner;
}

void Elaborator::bind_pattern(const s::Pattern& pat, TermPtr bound, ValuePtr ty,
                              ValuePtr val, std::vector<std::function<TermPtr(TermPtr)>>& wraps,
                              int& pushed) {
  switch (pat.kind) {
    case s::Pattern::Kind::Var:
    case s::Pattern::Kind::Wild: {
      std::string name = pat.kind == s::Pattern::Kind::Wild ? "_" : pat.name;
      push(name, ty, mode_for(ty), pat.span, val);
      pushed++;
      wraps.push_back([bound, name](TermPtr body) { return mk<TLet>(name, bound, body); });
      return;
    }
    case s::Pattern::Kind::Pair: {
      auto ctx = ectx();
      ValuePtr w = whnf_v(ty);
      ValuePtr lty, rty;
      ValuePtr lval, rval;
      ValuePtr vw = val ? whnf_v(val) : nullptr;
      const VPair* vp = vw ? vas<VPair>(vw) : nullptr;
      if (auto* t = vas<VTensor>(w)) {
        lty = t->lhs;
        lval = vp ? vp->fst : nullptr;
        rty = t->rhs;
        rval = vp ? vp->snd : nullptr;
      } else if (auto* ex = vas<VExists>(w)) {
        lty = ex->dom;
        lval = vp ? vp->fst : nullptr;
        ValuePtr witness = lval ? lval : fresh_var(depth());
        rty = apply_closure(ex->cod, witness, ctx);
        rval = vp ? vp->snd : nullptr;
      } else {
        fail(Code::TypeMismatch, pat.span,
             "pair pattern against a non-pair type " + show(w));
      }
      const s::Pattern& lp = pat.args[0];
      const s::Pattern& rp = pat.args[1];
      std::string n1 = lp.kind == s::Pattern::Kind::Var ? lp.name : "_l";
      std::string n2 = rp.kind == s::Pattern::Kind::Var ? rp.name : "_r";
      bool lsimple = lp.kind == s::Pattern::Kind::Var || lp.kind == s::Pattern::Kind::Wild;
      bool rsimple = rp.kind == s::Pattern::Kind::Var || rp.kind == s::Pattern::Kind::Wild;
      if (lp.kind == s::Pattern::Kind::Wild) n1 = "_";
      if (rp.kind == s::Pattern::Kind::Wild) n2 = "_";

      int l1 = push(lsimple ? n1 : "_l", lty, lsimple ? mode_for(lty) : Mode::Param, lp.span, lval);
      // re-read the witness value actually bound for the dependent component
      if (!lval && vas<VExists>(w)) rty = apply_closure(vas<VExists>(w)->cod, ctx_[l1].value, ctx);
      int l2 = push(rsimple ? n2 : "_r", rty, rsimple ? mode_for(rty) : Mode::Param, rp.span, rval);
      pushed += 2;
      std::string h1 = lsimple ? n1 : "_l";
      std::string h2 = rsimple ? n2 : "_r";
      wraps.push_back(
          [bound, h1, h2](TermPtr body) { return mk<TLetPair>(h1, h2, bound, body); });
      if (!lsimple) {
        int idx_depth = depth();
        TermPtr ref = mk<TVar>(idx_depth - 1 - l1);
        bind_pattern(lp, ref, lty, ctx_[l1].value, wraps, pushed);
        // mark the intermediate as consumed by the nested destructuring
        ctx_[l1].mode = Mode::Param;
      }
      if (!rsimple) {
        int idx_depth = depth();
        TermPtr ref = mk<TVar>(idx_depth - 1 - l2);
        bind_pattern(rp, ref, rty, ctx_[l2].value, wraps, pushed);
        ctx_[l2].mode = Mode::Param;
      }
      return;
    }
    case s::Pattern::Kind::Con:
      fail(Code::TypeMismatch, pat.span,
           "constructor patterns may not be nested inside tuple patterns");
  }
}

// ---------------------------------------------------------------------------
// case analysis with index refinement

Elaborator::CtorChain Elaborator::instantiate_ctor(const CtorInfo& ci, Span span) {
  auto ctx = ectx();
  const GlobalEntry* g = globals_.find(ci.name);
  if (!g->type_value) {
    Env empty;
    g->type_value = eval(g->type, empty, ctx);
  }
  CtorChain out;
  ValuePtr cur = g->type_value;
  for (int i = 0; i < ci.n_irrelevant; i++) {
    auto* pi = vas<VPi>(whnf_v(cur));
    if (!pi) throw InternalError("constructor type shorter than its arity");
    int m = metas_.fresh(pi->dom, depth(), span);
    out.meta_ids.push_back(m);
    out.irrel_types.push_back(pi->dom);
    out.irrel_hints.push_back(pi->hint);
    cur = apply_closure(pi->cod, vmk<VNeutral>(NeutralHead{HMeta{m}}, std::vector<SpineEntry>{}),
                        ctx);
  }
  out.after_irrel = cur;
  int probe = depth() + 1024;
  for (int i = 0; i < ci.n_fields; i++) {
    auto* pi = vas<VPi>(whnf_v(cur));
    if (!pi) throw InternalError("constructor type shorter than its field count");
    cur = apply_closure(pi->cod, fresh_var(probe++), ctx);
  }
  out.result = cur;
  return out;
}

TermPtr Elaborator::check_case(const s::ExprPtr& scrut, const std::vector<s::CaseAlt>& alts,
                               const ValuePtr& expected, Span span, bool from_let) {
  auto ctx = ectx();
  ElabResult sr = elim_bang(infer(scrut));
  ValuePtr sty = whnf_v(sr.type);
  auto* data = vas<VData>(sty);
  const TyConInfo* tc = data ? globals_.tycon(data->name) : nullptr;
  if (!tc || tc->sort == TyConInfo::Sort::Object)
    fail(Code::TypeMismatch, scrut->span,
         "case scrutinee has type " + show(sty) + ", which is not a data type");
  int want_args = tc->n_params + (tc->sort == TyConInfo::Sort::Simple ? 1 : 0);
  if ((int)data->args.size() != want_args)
    fail(Code::TypeMismatch, scrut->span, "case scrutinee type is not fully applied");

  // refinable levels: a parameter/irrelevant scrutinee variable, plus bare
  // parameter/irrelevant variables in the scrutinee type's arguments
  std::set<int> refinable;
  int scrut_level = -1;
  if (scrut->kind == s::ExprKind::Var) {
    for (int i = depth() - 1; i >= 0; i--) {
      if (ctx_[(size_t)i].name == scrut->name) {
        auto* n = vas<VNeutral>(ctx_[(size_t)i].value);
        bool own_neutral = n && n->spine.empty() &&
                           std::holds_alternative<HVar>(n->head) &&
                           std::get<HVar>(n->head).level == i;
        if (own_neutral &&
            (ctx_[(size_t)i].mode == Mode::Param || ctx_[(size_t)i].mode == Mode::Irrel))
          scrut_level = i;
        break;
      }
    }
  }
  if (scrut_level >= 0) refinable.insert(scrut_level);
  for (auto& a : data->args) {
    auto* n = vas<VNeutral>(whnf_v(a));
    if (!n || !n->spine.empty()) continue;
    auto* h = std::get_if<HVar>(&n->head);
    if (!h || h->level >= depth()) continue;
    const CtxEntry& entry = ctx_[(size_t)h->level];
    auto* own = vas<VNeutral>(entry.value);
    bool own_neutral = own && own->spine.empty() &&
                       std::holds_alternative<HVar>(own->head) &&
                       std::get<HVar>(own->head).level == h->level;
    if (own_neutral && (entry.mode == Mode::Param || entry.mode == Mode::Irrel))
      refinable.insert(h->level);
  }

  // reachability probe per constructor
  std::vector<std::string> reachable;
  for (auto& cname : tc->ctors) {
    const GlobalEntry* ce = globals_.find(cname);
    auto saved = metas_.entries;
    CtorChain chain = instantiate_ctor(ce->ctor, span);
    std::map<int, ValuePtr> refinements;
    UnifySettings st;
    st.metas = &metas_;
    st.refinable = &refinable;
    st.refinements = &refinements;
    UnifyResult r = unify(chain.result, sty, depth(), ctx, st);
    metas_.entries = std::move(saved);
    if (r.status == UnifyStatus::Ok) reachable.push_back(cname);
    else if (r.status == UnifyStatus::NonPattern)
      fail(Code::TypeMismatch, span,
           "cannot decide whether constructor " + cname + " is reachable here");
  }

  for (auto& alt : alts) {
    bool known = std::count(tc->ctors.begin(), tc->ctors.end(), alt.con) > 0;
    if (!known)
      fail(Code::TypeMismatch, alt.span,
           "'" + alt.con + "' is not a constructor of " + tc->name);
    if (!std::count(reachable.begin(), reachable.end(), alt.con))
      fail(Code::TypeMismatch, alt.span,
           "branch '" + alt.con + "' is unreachable at scrutinee type " + show(sty));
  }
  for (auto& cname : reachable) {
    bool written = false;
    for (auto& alt : alts) written = written || alt.con == cname;
    if (!written)
      fail(Code::TypeMismatch, span, "missing case branch for constructor '" + cname + "'");
  }
  if (from_let && reachable.size() != 1)
    fail(Code::TypeMismatch, span,
         "a let pattern needs a unique reachable constructor; use a case expression");

  int base_depth = depth();
  auto base_uses = snapshot_uses();
  std::optional<std::vector<int>> common_delta;
  std::string first_branch;
  std::vector<TBranch> branches;

  for (auto& alt : alts) {
    const GlobalEntry* ce = globals_.find(alt.con);
    const CtorInfo& ci = ce->ctor;
    if ((int)alt.binders.size() != ci.n_fields)
      fail(Code::TypeMismatch, alt.span,
           "constructor " + alt.con + " takes " + std::to_string(ci.n_fields) +
               " pattern variables");

    auto saved_ctx = ctx_;
    CtorChain chain = instantiate_ctor(ci, alt.span);
    std::map<int, ValuePtr> refinements;
    UnifySettings st;
    st.metas = &metas_;
    st.refinable = &refinable;
    st.refinements = &refinements;
    UnifyResult r = unify(chain.result, sty, depth(), ctx, st);
    if (r.status != UnifyStatus::Ok)
      throw InternalError("reachable branch failed to unify a second time");

    std::vector<std::string> binder_hints;
    std::vector<ValuePtr> con_args;
    // bind the constructor's irrelevant arguments
    for (size_t i = 0; i < chain.meta_ids.size(); i++) {
      int m = chain.meta_ids[i];
      std::string hint = chain.irrel_hints[i].empty() ? "i" : chain.irrel_hints[i];
      int l;
      if (metas_.is_solved(m)) {
        l = push(hint, chain.irrel_types[i], Mode::Irrel, alt.span, metas_.solution(m));
      } else {
        l = push(hint, chain.irrel_types[i], Mode::Irrel, alt.span);
        metas_.solve(m, ctx_[l].value);
      }
      con_args.push_back(ctx_[l].value);
      binder_hints.push_back(hint);
    }
    // bind the explicit fields
    ValuePtr cur = chain.after_irrel;
    for (int i = 0; i < ci.n_fields; i++) {
      auto* pi = vas<VPi>(whnf_v(cur));
      const std::string& name = alt.binders[i];
      int l = push(name, pi->dom, mode_for(pi->dom), alt.span);
      con_args.push_back(ctx_[l].value);
      binder_hints.push_back(name);
      cur = apply_closure(pi->cod, ctx_[l].value, ctx);
    }
    // refine the scrutinee variable and any index variables
    int min_refined = base_depth;
    if (scrut_level >= 0) {
      ctx_[(size_t)scrut_level].value = vmk<VCon>(alt.con, con_args);
      min_refined = std::min(min_refined, scrut_level);
    }
    for (auto& [lvl, val] : refinements) {
      ctx_[(size_t)lvl].value = val;
      min_refined = std::min(min_refined, lvl);
    }
    if (min_refined < base_depth) {
      for (int i = min_refined; i < base_depth; i++)
        ctx_[(size_t)i].type = refresh_value(ctx_[(size_t)i].type, i);
    }
    ValuePtr branch_expected =
        min_refined < base_depth ? refresh_value(expected, base_depth) : expected;

    TermPtr body = check(alt.body, branch_expected);
    pop_check((int)binder_hints.size());

    auto delta = linear_delta(base_uses);
    if (!common_delta) {
      common_delta = delta;
      first_branch = alt.con;
    } else if (*common_delta != delta) {
      // report the variable where consumption differs
      std::set<int> a(common_delta->begin(), common_delta->end());
      std::set<int> b(delta.begin(), delta.end());
      int diff = -1;
      for (int l : b)
        if (!a.count(l)) diff = l;
      for (int l : a)
        if (!b.count(l)) diff = l;
      std::string who = diff >= 0 ? ctx_[(size_t)diff].name : "?";
      fail(Code::LinearityError, alt.span,
           "branch '" + alt.con + "' and branch '" + first_branch +
               "' consume different linear variables (" + who + ")");
    }
    ctx_ = std::move(saved_ctx);
    branches.push_back({alt.con, binder_hints, body});
  }

  if (common_delta) {
    for (int l : *common_delta) ctx_[(size_t)l].uses++;
  }
  return std::make_shared<Term>(Term{TCase{sr.term, std::move(branches)}});
}

// ---------------------------------------------------------------------------
// types

TermPtr Elaborator::check_type(const s::ExprPtr& e) {
  FlagScope irr(irrelevant_mode_, true);
  auto ctx = ectx();
  switch (e->kind) {
    case s::ExprKind::Arrow: {
      TermPtr dom = check_type(e->kids[0]);
      ValuePtr domv = eval_here(dom);
      push("_", domv, Mode::Param, e->span);
      TermPtr cod = check_type(e->kids[1]);
      pop_silent(1);
      return mk<TPi>("_", dom, cod, PiFlavor::Expl);
    }
    case s::ExprKind::Pi: {
      TermPtr dom = check_type(e->kids[0]);
      ValuePtr domv = eval_here(dom);
      Mode m = e->flavor == s::BinderFlavor::Irrel ? Mode::Irrel : Mode::Param;
      push(e->binders[0], domv, m, e->span);
      TermPtr cod = check_type(e->kids[1]);
      pop_silent(1);
      PiFlavor f = e->flavor == s::BinderFlavor::Irrel   ? PiFlavor::Irrel
                   : e->flavor == s::BinderFlavor::Impl ? PiFlavor::Impl
                                                        : PiFlavor::Expl;
      return mk<TPi>(e->binders[0], dom, cod, f);
    }
    case s::ExprKind::Constraint: {
      int pushed = 0;
      std::vector<std::pair<std::string, TermPtr>> cs;
      for (auto& c : e->constraints) {
        const ClassInfo* ci = globals_.cls(c.cls);
        if (!ci) fail(Code::ScopeError, c.span, "unknown class '" + c.cls + "'");
        Env empty;
        ValuePtr kindv = eval(ci->paramKind, empty, ctx);
        TermPtr arg = check(c.arg, kindv);
        ValuePtr argv = eval_here(arg);
        cs.push_back({c.cls, arg});
        push("", vmk<VClassT>(c.cls, argv), Mode::Evidence, c.span, nullptr, c.cls);
        pushed++;
      }
      TermPtr cod = check_type(e->kids[0]);
      pop_silent(pushed);
      for (auto it = cs.rbegin(); it != cs.rend(); ++it)
        cod = mk<TPi>("ev", mk<TClassT>(it->first, it->second), cod, PiFlavor::Inst);
      return cod;
    }
    case s::ExprKind::Bang:
      return mk<TBang>(check_type(e->kids[0]));
    case s::ExprKind::Tensor:
      return mk<TTensor>(check_type(e->kids[0]), check_type(e->kids[1]));
    case s::ExprKind::Exists: {
      TermPtr dom = check_type(e->kids[0]);
      ValuePtr domv = eval_here(dom);
      push(e->binders[0], domv, Mode::Param, e->span);
      TermPtr cod = check_type(e->kids[1]);
      pop_silent(1);
      return mk<TExists>(e->binders[0], dom, cod);
    }
    case s::ExprKind::CircType:
      return mk<TCirc>(check_type(e->kids[0]), check_type(e->kids[1]));
    case s::ExprKind::UnitType:
      return mk<TUnitT>();
    case s::ExprKind::TypeKind:
      return mk<TType>();
    default: {
      auto snap = snapshot_uses();
      ElabResult r = infer(e);
      return coerce(r.term, r.type, vmk<VType>(), e->span, snap);
    }
  }
}

ElabResult Elaborator::infer_expression(const s::ExprPtr& e) {
  s::ExprPtr d = s::desugar_expr(e);
  ElabResult r = infer(d);
  flush_obligations();
  r.term = zonk(r.term, 0);
  return r;
}

}  // namespace dpq::checker
