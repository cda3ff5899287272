#include "dpq/checker/elaborate.hpp"
#include "dpq/surface/desugar.hpp"
#include "dpq/surface/parser.hpp"

namespace dpq::checker {

using namespace dpq::kernel;

namespace {

// shifts free variables >= cutoff by d (fields never bind, so cases are few)
TermPtr shift(const TermPtr& t, int cutoff, int d) {
  if (auto* v = as<TVar>(t))
    return v->index >= cutoff ? mk<TVar>(v->index + d) : t;
  if (auto* a = as<TApp>(t)) return mk<TApp>(shift(a->fn, cutoff, d), shift(a->arg, cutoff, d), a->flavor);
  if (auto* l = as<TLam>(t)) return mk<TLam>(l->hint, shift(l->body, cutoff + 1, d));
  if (auto* p = as<TPi>(t))
    return mk<TPi>(p->hint, shift(p->dom, cutoff, d), shift(p->cod, cutoff + 1, d), p->flavor);
  if (auto* b = as<TBang>(t)) return mk<TBang>(shift(b->inner, cutoff, d));
  if (auto* l = as<TLift>(t)) return mk<TLift>(shift(l->inner, cutoff, d));
  if (auto* f = as<TForce>(t)) return mk<TForce>(shift(f->inner, cutoff, d));
  if (auto* x = as<TTensor>(t)) return mk<TTensor>(shift(x->lhs, cutoff, d), shift(x->rhs, cutoff, d));
  if (auto* p = as<TPair>(t)) return mk<TPair>(shift(p->fst, cutoff, d), shift(p->snd, cutoff, d));
  if (auto* e = as<TExists>(t))
    return mk<TExists>(e->hint, shift(e->dom, cutoff, d), shift(e->cod, cutoff + 1, d));
  if (auto* c = as<TCirc>(t)) return mk<TCirc>(shift(c->in, cutoff, d), shift(c->out, cutoff, d));
  if (auto* c = as<TClassT>(t)) return mk<TClassT>(c->cls, shift(c->arg, cutoff, d));
  if (auto* e = as<TEvidence>(t)) return mk<TEvidence>(e->cls, shift(e->arg, cutoff, d));
  return t;  // leaves: globals, units, Type, metas
}

}  // namespace

std::vector<Diagnostic> Elaborator::check_module(const s::Module& mod) {
  std::vector<Diagnostic> diags;
  for (auto& d : mod) {
    // snapshot for per-declaration atomicity
    auto entries = globals_.entries;
    auto tycons = globals_.tycons;
    auto gates = globals_.gates;
    auto classes = globals_.classes;
    auto instances = globals_.instances;
    metas_ = MetaCtx{};
    pending_.clear();
    solved_holes_.clear();
    ctx_.clear();
    irrelevant_mode_ = false;
    try {
      check_decl(d);
    } catch (const CompileError& e) {
      Diagnostic diag = e.diag();
      if (diag.file.empty()) diag.file = config_.file;
      diags.push_back(diag);
      globals_.entries = std::move(entries);
      globals_.tycons = std::move(tycons);
      globals_.gates = std::move(gates);
      globals_.classes = std::move(classes);
      globals_.instances = std::move(instances);
    } catch (const FuelExhaustedError&) {
      diags.push_back({Code::FuelExhausted, d.span, config_.file,
                       "type-level evaluation in '" + d.name +
                           "' did not converge; a type-level computation may diverge "
                           "(raise the budget with --fuel if it is merely large)",
                       {}});
      globals_.entries = std::move(entries);
      globals_.tycons = std::move(tycons);
      globals_.gates = std::move(gates);
      globals_.classes = std::move(classes);
      globals_.instances = std::move(instances);
    }
  }
  return diags;
}

void Elaborator::check_decl(const s::Decl& d) {
  switch (d.kind) {
    case s::Decl::Kind::Def: return check_def(d);
    case s::Decl::Kind::Data: return check_data(d);
    case s::Decl::Kind::Simple: return check_simple_decl(d);
    case s::Decl::Kind::Object: return check_object(d);
    case s::Decl::Kind::Gate: return check_gate(d);
    case s::Decl::Kind::Class: return check_class(d);
    case s::Decl::Kind::Instance: return check_instance(d);
  }
}

// ---------------------------------------------------------------------------
// definitions

TermPtr Elaborator::check_equation(const std::vector<std::string>& params,
                                   const s::ExprPtr& body, ValuePtr expected, Span span) {
  auto ctx = ectx();
  struct Wrap {
    bool lift;
    std::string hint;
  };
  std::vector<Wrap> wraps;
  int pushed = 0;
  ValuePtr cur = whnf_v(expected);
  size_t pi_idx = 0;
  for (;;) {
    if (auto* b = vas<VBang>(cur)) {
      wraps.push_back({true, ""});
      cur = whnf_v(b->inner);
      continue;
    }
    auto* pi = vas<VPi>(cur);
    if (!pi) break;
    if (pi->flavor == PiFlavor::Irrel) {
      int l = push(pi->hint, pi->dom, Mode::Irrel, span);
      wraps.push_back({false, pi->hint});
      pushed++;
      cur = whnf_v(apply_closure(pi->cod, ctx_[l].value, ctx));
      continue;
    }
    if (pi->flavor == PiFlavor::Inst) {
      auto* c = vas<VClassT>(whnf_v(pi->dom));
      int l = push("", pi->dom, Mode::Evidence, span, nullptr, c ? c->cls : "");
      wraps.push_back({false, "ev"});
      pushed++;
      cur = whnf_v(apply_closure(pi->cod, ctx_[l].value, ctx));
      continue;
    }
    if (pi_idx >= params.size()) break;
    const std::string& name = params[pi_idx++];
    int l = push(name, pi->dom, mode_for(pi->dom), span);
    wraps.push_back({false, name});
    pushed++;
    cur = whnf_v(apply_closure(pi->cod, ctx_[l].value, ctx));
  }
  if (pi_idx < params.size())
    fail(Code::TypeMismatch, span,
         "the defining equation has more parameters than the declared type provides");
  TermPtr t = check(body, cur);
  pop_check(pushed);
  for (auto it = wraps.rbegin(); it != wraps.rend(); ++it)
    t = it->lift ? mk<TLift>(t) : (TermPtr)mk<TLam>(it->hint, t);
  return t;
}

void Elaborator::check_def(const s::Decl& d) {
  if (globals_.defined(d.name))
    fail(Code::ScopeError, d.span, "redefinition of '" + d.name + "'");
  TermPtr type_t = check_type(d.declaredType);
  type_t = zonk(type_t, 0);
  ValuePtr type_v = eval_here(type_t);
  if (!is_parameter_type(type_v))
    fail(Code::ParameterError, d.span,
         "top-level definition '" + d.name +
             "' must have a parameter type (a ! function type or parameter data), found " +
             show(type_v));

  // commit the signature first so the body may recurse
  GlobalEntry entry;
  entry.kind = GlobalKind::Def;
  entry.name = d.name;
  entry.type = type_t;
  globals_.entries[d.name] = entry;

  TermPtr body = check_equation(d.eqParams, d.body, type_v, d.span);
  flush_obligations();
  body = zonk(body, 0);
  globals_.entries[d.name].body = body;
}

// ---------------------------------------------------------------------------
// data declarations

void Elaborator::check_data(const s::Decl& d) {
  if (globals_.defined(d.name))
    fail(Code::ScopeError, d.span, "redefinition of '" + d.name + "'");

  TyConInfo tc;
  tc.sort = TyConInfo::Sort::Data;
  tc.name = d.name;
  tc.n_params = (int)d.params.size();
  TermPtr kind = mk<TType>();
  for (int i = 0; i < tc.n_params; i++) kind = mk<TPi>("a", mk<TType>(), kind, PiFlavor::Expl);
  tc.kind = kind;

  GlobalEntry tentry;
  tentry.kind = GlobalKind::TyCon;
  tentry.name = d.name;
  tentry.type = kind;
  globals_.entries[d.name] = tentry;
  globals_.tycons[d.name] = tc;

  for (auto& c : d.ctors) {
    if (globals_.defined(c.name))
      fail(Code::ScopeError, c.span, "redefinition of '" + c.name + "'");
    // elaborate field types under [params..., dummy fields...]
    int np = (int)d.params.size();
    for (int i = 0; i < np; i++) push(d.params[(size_t)i], vmk<VType>(), Mode::Param, c.span);
    std::vector<TermPtr> fields;
    for (size_t i = 0; i < c.fields.size(); i++) {
      TermPtr ft = check_type(c.fields[i]);
      fields.push_back(ft);
      ValuePtr fv = eval_here(ft);
      push("_", fv, Mode::Param, c.span);
    }
    pop_silent(np + (int)c.fields.size());

    // result: T a1 .. ak under [params..., fields...]
    int total = np + (int)c.fields.size();
    TermPtr result = mk<TGlobal>(d.name);
    for (int i = 0; i < np; i++)
      result = mk<TApp>(result, mk<TVar>(total - 1 - i), AppFlavor::Expl);
    TermPtr cty = result;
    for (size_t i = c.fields.size(); i-- > 0;)
      cty = mk<TPi>("_", fields[i], cty, PiFlavor::Expl);
    for (int i = np; i-- > 0;)
      cty = mk<TPi>(d.params[(size_t)i], mk<TType>(), cty, PiFlavor::Irrel);

    GlobalEntry ce;
    ce.kind = GlobalKind::Ctor;
    ce.name = c.name;
    ce.type = cty;
    ce.ctor = CtorInfo{c.name, d.name, cty, np, (int)c.fields.size()};
    globals_.entries[c.name] = ce;
    globals_.tycons[d.name].ctors.push_back(c.name);
  }
  derive_instances(d.name);
}

void Elaborator::check_object(const s::Decl& d) {
  if (globals_.defined(d.name))
    fail(Code::ScopeError, d.span, "redefinition of '" + d.name + "'");
  TyConInfo tc;
  tc.sort = TyConInfo::Sort::Object;
  tc.name = d.name;
  tc.n_params = 0;
  tc.kind = mk<TType>();
  globals_.tycons[d.name] = tc;
  GlobalEntry e;
  e.kind = GlobalKind::TyCon;
  e.name = d.name;
  e.type = tc.kind;
  globals_.entries[d.name] = e;
  derive_instances(d.name);
}

// ---------------------------------------------------------------------------
// simple type families

void Elaborator::check_simple_decl(const s::Decl& d) {
  if (globals_.defined(d.name))
    fail(Code::ScopeError, d.span, "redefinition of '" + d.name + "'");
  auto reject = [&](Span sp, const std::string& reason, const std::string& msg) {
    fail(Code::SimpleDeclIllFormed, sp, reason + ": " + msg);
  };

  if (d.indexKinds.size() != 1)
    reject(d.span, "UnsupportedIndex", "a simple family takes exactly one index");
  TermPtr idx_kind = check_type(d.indexKinds[0]);
  ValuePtr idx_kind_v = eval_here(idx_kind);
  auto* idx_data = vas<VData>(idx_kind_v);
  const TyConInfo* idx_tc = idx_data ? globals_.tycon(idx_data->name) : nullptr;
  if (!idx_tc || idx_tc->sort != TyConInfo::Sort::Data)
    reject(d.span, "UnsupportedIndex", "the index kind must be an algebraic data type");

  int np = (int)d.params.size();
  TyConInfo tc;
  tc.sort = TyConInfo::Sort::Simple;
  tc.name = d.name;
  tc.n_params = np;
  {
    TermPtr kind = mk<TType>();
    kind = mk<TPi>("i", idx_kind, kind, PiFlavor::Expl);
    for (int i = 0; i < np; i++) kind = mk<TPi>("a", mk<TType>(), kind, PiFlavor::Expl);
    tc.kind = kind;
  }
  GlobalEntry tentry;
  tentry.kind = GlobalKind::TyCon;
  tentry.name = d.name;
  tentry.type = tc.kind;
  globals_.entries[d.name] = tentry;
  globals_.tycons[d.name] = tc;

  // clause heads: constructor patterns covering each index constructor once
  std::set<std::string> seen;
  for (auto& cl : d.clauses) {
    if (cl.rhs.size() != 1)
      reject(cl.span, "MultipleConstructorsPerClause",
             "each clause must introduce exactly one constructor");
    if (cl.index.kind != s::Pattern::Kind::Con)
      reject(cl.span, "UnsupportedIndex", "clause indices must be constructor patterns");
    const std::string& ic = cl.index.name;
    if (!std::count(idx_tc->ctors.begin(), idx_tc->ctors.end(), ic))
      reject(cl.span, "UnsupportedIndex",
             "'" + ic + "' is not a constructor of " + idx_tc->name);
    if (seen.count(ic))
      reject(cl.span, "DuplicateHead",
             "the index pattern '" + ic + "' appears in more than one clause; the "
             "constructor for this index would be ambiguous");
    seen.insert(ic);
    for (auto& a : cl.index.args)
      if (a.kind != s::Pattern::Kind::Var)
        reject(cl.span, "UnsupportedIndex", "index pattern fields must be variables");
  }
  for (auto& ic : idx_tc->ctors)
    if (!seen.count(ic))
      reject(d.span, "MissingCase", "no clause covers the index constructor '" + ic + "'");

  // recursion check: every recursive use applies the family to a strict
  // sub-pattern of the clause's index pattern, i.e. one of its variables
  std::function<void(const s::ExprPtr&, const s::SimpleClause&)> scan =
      [&](const s::ExprPtr& e, const s::SimpleClause& cl) {
        if (e->kind == s::ExprKind::App) {
          // collect the spine
          std::vector<const s::ExprPtr*> spine;
          const s::ExprPtr* cur = &e;
          while ((*cur)->kind == s::ExprKind::App) {
            spine.push_back(&(*cur)->kids[1]);
            cur = &(*cur)->kids[0];
          }
          std::reverse(spine.begin(), spine.end());
          if ((*cur)->kind == s::ExprKind::Con && (*cur)->name == d.name) {
            if ((int)spine.size() != np + 1)
              reject(e->span, "NonDecreasingRecursion",
                     "recursive occurrences must be fully applied");
            const s::ExprPtr& idx = *spine.back();
            bool ok = idx->kind == s::ExprKind::Var;
            if (ok) {
              bool is_pattern_var = false;
              for (auto& a : cl.index.args) is_pattern_var |= a.name == idx->name;
              ok = is_pattern_var;
            }
            if (!ok)
              reject(e->span, "NonDecreasingRecursion",
                     "the recursive index must be a variable bound strictly inside "
                     "the clause's index pattern, so the data cannot have a finite size");
            for (size_t i = 0; i + 1 < spine.size(); i++) scan(*spine[i], cl);
            return;
          }
          for (auto* k : spine) scan(*k, cl);
          scan(*cur, cl);
          return;
        }
        for (auto& k : e->kids) scan(k, cl);
      };
  for (auto& cl : d.clauses)
    for (auto& f : cl.rhs[0].fields) scan(f, cl);

  // commit clauses and generate constructor types
  const CtorInfo* idx_ctor_info = nullptr;
  for (auto& cl : d.clauses) {
    const GlobalEntry* ic = globals_.find(cl.index.name);
    idx_ctor_info = &ic->ctor;
    if ((int)cl.index.args.size() != idx_ctor_info->n_fields)
      reject(cl.span, "UnsupportedIndex",
             "index pattern arity does not match constructor " + cl.index.name);
    if ((int)cl.params.size() != np)
      reject(cl.span, "UnsupportedIndex", "clause must repeat the declared parameters");

    const s::CtorDecl& rc = cl.rhs[0];
    if (globals_.defined(rc.name))
      fail(Code::ScopeError, rc.span, "redefinition of '" + rc.name + "'");

    // field types under [params..., indexVars...]
    std::vector<std::string> index_vars;
    for (auto& a : cl.index.args) index_vars.push_back(a.name);

    // types of the index pattern variables come from the index constructor
    std::vector<ValuePtr> ivar_types;
    {
      auto ctx = ectx();
      Env empty;
      ValuePtr cur = eval(ic->ctor.type, empty, ctx);
      for (int i = 0; i < idx_ctor_info->n_fields; i++) {
        auto* pi = vas<VPi>(zonk_head(cur, ctx));
        ivar_types.push_back(pi->dom);
        cur = apply_closure(pi->cod, fresh_var(np + i), ctx);
      }
    }

    for (int i = 0; i < np; i++) push(cl.params[(size_t)i], vmk<VType>(), Mode::Param, cl.span);
    for (size_t i = 0; i < index_vars.size(); i++)
      push(index_vars[i], ivar_types[i], Mode::Param, cl.span);

    std::vector<TermPtr> clause_fields;  // at depth np + |ivars|
    for (auto& f : rc.fields) clause_fields.push_back(check_type(f));
    pop_silent(np + (int)index_vars.size());

    // constructor type: forall params -> forall ivars -> fields -> F params ip
    int n_irrel = np + (int)index_vars.size();
    int total = n_irrel + (int)rc.fields.size();
    TermPtr result = mk<TGlobal>(d.name);
    for (int i = 0; i < np; i++)
      result = mk<TApp>(result, mk<TVar>(total - 1 - i), AppFlavor::Expl);
    TermPtr ip = mk<TGlobal>(cl.index.name);
    for (size_t i = 0; i < index_vars.size(); i++)
      ip = mk<TApp>(ip, mk<TVar>(total - 1 - np - (int)i), AppFlavor::Expl);
    result = mk<TApp>(result, ip, AppFlavor::Expl);

    TermPtr cty = result;
    for (size_t i = rc.fields.size(); i-- > 0;)
      cty = mk<TPi>("_", shift(clause_fields[i], 0, (int)i), cty, PiFlavor::Expl);
    for (size_t i = index_vars.size(); i-- > 0;) {
      auto ctx = ectx();
      TermPtr ivk = quote(ivar_types[i], np + (int)i, ctx);
      cty = mk<TPi>(index_vars[i], ivk, cty, PiFlavor::Irrel);
    }
    for (int i = np; i-- > 0;)
      cty = mk<TPi>(cl.params[(size_t)i], mk<TType>(), cty, PiFlavor::Irrel);

    GlobalEntry ce;
    ce.kind = GlobalKind::Ctor;
    ce.name = rc.name;
    ce.type = cty;
    ce.ctor = CtorInfo{rc.name, d.name, cty, n_irrel, (int)rc.fields.size()};
    globals_.entries[rc.name] = ce;
    globals_.tycons[d.name].ctors.push_back(rc.name);

    FamilyClause fc;
    fc.indexCtor = cl.index.name;
    fc.indexVars = index_vars;
    fc.ctorName = rc.name;
    fc.fieldTypes = clause_fields;
    globals_.tycons[d.name].clauses.push_back(fc);
  }
  derive_instances(d.name);
}

// ---------------------------------------------------------------------------
// gates

void Elaborator::check_gate(const s::Decl& d) {
  if (globals_.defined(d.name))
    fail(Code::ScopeError, d.span, "redefinition of '" + d.name + "'");
  auto ctx = ectx();

  circuit::GateInfo info;
  info.name = d.name;
  info.param_count = (int)d.paramKinds.size();
  info.adjoint = d.attrs.adjoint;
  info.style = d.attrs.style;
  info.controls = d.attrs.controls;

  for (auto& pk : d.paramKinds) {
    const TyConInfo* tc = globals_.tycon(pk);
    if (!tc || tc->sort != TyConInfo::Sort::Data || tc->n_params != 0 ||
        !globals_.instance("Parameter", pk))
      fail(Code::ParameterError, d.span,
           "gate parameter kind '" + pk + "' must be a parameter data type");
  }

  TermPtr wire_t = check_type(d.gateType);
  ValuePtr cur = eval_here(wire_t);
  for (;;) {
    ValuePtr w = whnf_v(cur);
    if (auto* pi = vas<VPi>(w)) {
      if (pi->flavor != PiFlavor::Expl)
        fail(Code::SimplenessError, d.span, "gate types use plain arrows only");
      try {
        WireShape sh = shape_of_simple_type(pi->dom, ctx);
        sh.flatten(info.in_carriers);
      } catch (const ShapeError&) {
        fail(Code::SimplenessError, d.span,
             "gate argument type " + show(pi->dom) + " is not a concrete simple type");
      }
      info.arg_types.push_back(pi->dom);
      cur = apply_closure(pi->cod, fresh_var(depth()), ctx);
      continue;
    }
    try {
      WireShape sh = shape_of_simple_type(w, ctx);
      sh.flatten(info.out_carriers);
    } catch (const ShapeError&) {
      fail(Code::SimplenessError, d.span,
           "gate result type " + show(w) + " is not a concrete simple type");
    }
    info.result_type = w;
    break;
  }
  if (info.arg_types.empty())
    fail(Code::SimplenessError, d.span, "a gate needs at least one input arrow");

  // adjoint sanity: the wire multiset must be preserved
  if (info.adjoint) {
    auto sorted = [](std::vector<Carrier> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    if (*info.adjoint == d.name) {
      if (sorted(info.in_carriers) != sorted(info.out_carriers))
        fail(Code::SimplenessError, d.span,
             "a self-adjoint gate must preserve its wire carriers");
    } else if (const circuit::GateInfo* other = globals_.gate(*info.adjoint)) {
      bool mirror = sorted(info.in_carriers) == sorted(other->out_carriers) &&
                    sorted(info.out_carriers) == sorted(other->in_carriers);
      if (!mirror || other->adjoint.value_or("") != d.name)
        fail(Code::SimplenessError, d.span,
             "gate '" + d.name + "' and its declared adjoint '" + *info.adjoint +
                 "' do not mirror each other");
    }
  }

  // committed type: !(P1 -> .. -> wire type)
  TermPtr full = wire_t;
  for (size_t i = d.paramKinds.size(); i-- > 0;)
    full = mk<TPi>("k", mk<TGlobal>(d.paramKinds[i]), full, PiFlavor::Expl);
  full = mk<TBang>(full);

  globals_.gates[d.name] = info;
  GlobalEntry e;
  e.kind = GlobalKind::Gate;
  e.name = d.name;
  e.type = full;
  globals_.entries[d.name] = e;
}

// ---------------------------------------------------------------------------
// classes and instances

void Elaborator::check_class(const s::Decl& d) {
  if (globals_.cls(d.name))
    fail(Code::ScopeError, d.span, "redefinition of class '" + d.name + "'");
  ClassInfo ci;
  ci.name = d.name;
  ci.param = d.classParam;
  ci.paramKind = d.classParamKind ? check_type(d.classParamKind) : mk<TType>();
  ci.builtin = false;

  ValuePtr kind_v = eval_here(ci.paramKind);
  for (auto& m : d.methods) {
    if (globals_.defined(m.name))
      fail(Code::ScopeError, m.span, "redefinition of '" + m.name + "'");
    // elaborate the signature under [param, evidence] so indices are final
    push(d.classParam, kind_v, Mode::Param, m.span);
    push("", vmk<VClassT>(d.name, ctx_[0].value), Mode::Evidence, m.span, nullptr, d.name);
    TermPtr sig = check_type(m.type);
    pop_silent(2);
    TermPtr global_ty =
        mk<TPi>(d.classParam, ci.paramKind,
                mk<TPi>("ev", mk<TClassT>(d.name, mk<TVar>(0)), sig, PiFlavor::Inst),
                PiFlavor::Irrel);
    ci.methods.push_back({m.name, sig});
    GlobalEntry ge;
    ge.kind = GlobalKind::Method;
    ge.name = m.name;
    ge.type = global_ty;
    ge.methodClass = d.name;
    globals_.entries[m.name] = ge;
  }
  globals_.classes[d.name] = ci;
}

void Elaborator::check_instance(const s::Decl& d) {
  const ClassInfo* ci = globals_.cls(d.name);
  if (!ci) fail(Code::ScopeError, d.span, "unknown class '" + d.name + "'");
  if (ci->builtin)
    fail(Code::ClassResolutionError, d.span,
         "instances of the built-in class " + d.name + " are derived automatically "
         "and cannot be declared");
  if (!d.headVars.empty() || !d.constraints.empty())
    fail(Code::TypeMismatch, d.span,
         "parameterized instance heads are not supported; instances name a bare "
         "type constructor");
  if (globals_.instance(d.name, d.headCon))
    fail(Code::ClassResolutionError, d.span,
         "overlapping instance for " + d.name + " " + d.headCon);
  const TyConInfo* head = globals_.tycon(d.headCon);
  if (!head) fail(Code::ScopeError, d.span, "unknown type '" + d.headCon + "'");

  auto ctx = ectx();
  // kind check: the head must inhabit the class parameter kind
  {
    Env empty;
    ValuePtr want = eval(ci->paramKind, empty, ctx);
    ValuePtr have = eval(head->kind, empty, ctx);
    UnifySettings st;
    if (unify(have, want, 0, ctx, st).status != UnifyStatus::Ok)
      fail(Code::TypeMismatch, d.span,
           "type '" + d.headCon + "' does not have the kind the class " + d.name +
               " expects");
  }

  ValuePtr head_v = vmk<VData>(d.headCon, std::vector<ValuePtr>{});
  auto methods = std::make_shared<std::map<std::string, ValuePtr>>();
  for (auto& [mname, msig] : ci->methods) {
    const s::MethodDef* def = nullptr;
    for (auto& md : d.methodDefs)
      if (md.name == mname) def = &md;
    if (!def)
      fail(Code::TypeMismatch, d.span,
           "instance is missing a definition for method '" + mname + "'");
    Env env;
    env = env.push(head_v);
    env = env.push(vmk<VEvToken>());
    ValuePtr expected = eval(msig, env, ctx);
    TermPtr body = check_equation(def->params, def->body, expected, def->span);
    flush_obligations();
    body = zonk(body, 0);
    Env empty;
    (*methods)[mname] = eval(body, empty, ctx);
  }
  for (auto& md : d.methodDefs) {
    bool known = false;
    for (auto& [mname, _] : ci->methods) known = known || mname == md.name;
    if (!known)
      fail(Code::TypeMismatch, md.span,
           "method '" + md.name + "' is not part of class " + d.name);
  }

  InstanceRule rule{d.name, d.headCon, {}, methods, d.span};
  globals_.instances[{d.name, d.headCon}] = rule;

  // a dictionary global so resolved evidence can evaluate at runtime
  std::string dict_name = "$dict$" + d.name + "$" + d.headCon;
  GlobalEntry ge;
  ge.kind = GlobalKind::Def;
  ge.name = dict_name;
  ge.type = mk<TClassT>(d.name, mk<TGlobal>(d.headCon));
  ge.whnf_value = vmk<VDict>(d.name, methods);
  ge.runtime_value = ge.whnf_value;
  globals_.entries[dict_name] = ge;
}

// ---------------------------------------------------------------------------
// zonking

TermPtr Elaborator::zonk(const TermPtr& t, int depth_at) {
  if (auto* m = as<TMeta>(t)) {
    if (!metas_.is_solved(m->id)) {
      Span sp = metas_.entries[(size_t)m->id].span;
      fail(Code::TypeMismatch, sp,
           "an implicit argument could not be inferred here");
    }
    auto ctx = ectx();
    return zonk(quote(metas_.solution(m->id), depth_at, ctx), depth_at);
  }
  if (auto* h = as<TEvHole>(t)) {
    auto it = solved_holes_.find(h->id);
    if (it == solved_holes_.end())
      throw InternalError("evidence hole escaped resolution");
    return zonk(it->second, depth_at);
  }
  if (auto* a = as<TApp>(t))
    return mk<TApp>(zonk(a->fn, depth_at), zonk(a->arg, depth_at), a->flavor);
  if (auto* l = as<TLam>(t)) return mk<TLam>(l->hint, zonk(l->body, depth_at + 1));
  if (auto* p = as<TPi>(t))
    return mk<TPi>(p->hint, zonk(p->dom, depth_at), zonk(p->cod, depth_at + 1), p->flavor);
  if (auto* b = as<TBang>(t)) return mk<TBang>(zonk(b->inner, depth_at));
  if (auto* l = as<TLift>(t)) return mk<TLift>(zonk(l->inner, depth_at));
  if (auto* f = as<TForce>(t)) return mk<TForce>(zonk(f->inner, depth_at));
  if (auto* x = as<TTensor>(t))
    return mk<TTensor>(zonk(x->lhs, depth_at), zonk(x->rhs, depth_at));
  if (auto* p = as<TPair>(t)) return mk<TPair>(zonk(p->fst, depth_at), zonk(p->snd, depth_at));
  if (auto* e = as<TExists>(t))
    return mk<TExists>(e->hint, zonk(e->dom, depth_at), zonk(e->cod, depth_at + 1));
  if (auto* c = as<TCirc>(t)) return mk<TCirc>(zonk(c->in, depth_at), zonk(c->out, depth_at));
  if (auto* c = as<TCase>(t)) {
    TCase out;
    out.scrut = zonk(c->scrut, depth_at);
    for (auto& br : c->branches)
      out.branches.push_back(
          {br.ctor, br.binders, zonk(br.body, depth_at + (int)br.binders.size())});
    return std::make_shared<Term>(Term{std::move(out)});
  }
  if (auto* l = as<TLet>(t))
    return mk<TLet>(l->hint, zonk(l->bound, depth_at), zonk(l->body, depth_at + 1));
  if (auto* l = as<TLetPair>(t))
    return mk<TLetPair>(l->hint1, l->hint2, zonk(l->bound, depth_at),
                        zonk(l->body, depth_at + 2));
  if (auto* c = as<TClassT>(t)) return mk<TClassT>(c->cls, zonk(c->arg, depth_at));
  if (auto* e = as<TEvidence>(t)) return mk<TEvidence>(e->cls, zonk(e->arg, depth_at));
  return t;
}

// ---------------------------------------------------------------------------
// builtins

void Elaborator::install_builtins(GlobalTable& g) {
  for (const char* name : {"Simple", "Parameter"}) {
    ClassInfo ci;
    ci.name = name;
    ci.param = "a";
    ci.paramKind = mk<TType>();
    ci.builtin = true;
    g.classes[name] = ci;
  }
  ElabConfig cfg;
  cfg.file = "<builtin>";
  auto add = [&](const char* name, Builtin b, const char* type_src) {
    Elaborator el(g, cfg);
    auto toks = surface::tokenize(type_src);
    auto e = surface::desugar_expr(surface::parse_expression(toks));
    TermPtr ty = el.check_type(e);
    GlobalEntry ge;
    ge.kind = GlobalKind::Builtin;
    ge.name = name;
    ge.type = ty;
    ge.builtin = b;
    g.entries[name] = ge;
  };
  add("box", Builtin::Box,
      "(a : Type) -> forall (b : Type) -> (Simple a, Simple b) => !(a -> b) -> Circ(a, b)");
  add("unbox", Builtin::Unbox,
      "forall (a b : Type) -> (Simple a, Simple b) => Circ(a, b) -> !(a -> b)");
  add("reverse", Builtin::Reverse,
      "forall (a b : Type) -> (Simple a, Simple b) => Circ(a, b) -> Circ(b, a)");
  add("existsBox", Builtin::ExistsBox,
      "(a : Type) -> forall (b : Type) -> (Simple a, Parameter b) => (p : b -> Type) -> "
      "!(a -> (n : b) * p n) -> (n : b) * ((Simple (p n)) => Circ(a, p n))");
}

}  // namespace dpq::checker
