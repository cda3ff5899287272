#include "dpq/checker/elaborate.hpp"

namespace dpq::checker {

using namespace dpq::kernel;

namespace {

bool head_is_flex(const ValuePtr& v) {
  auto* n = vas<VNeutral>(v);
  return n && std::holds_alternative<HMeta>(n->head);
}

}  // namespace

// Backward-chaining resolution. Returns an evidence term valid at `at_depth`,
// or nullopt when no instance applies. `in_progress` carries type heads whose
// derivation is underway (recursive occurrences are accepted coinductively).
std::optional<TermPtr> Elaborator::resolve_constraint(
    const std::string& cls, const ValuePtr& type0, int at_depth,
    const std::vector<std::tuple<int, std::string, ValuePtr>>& assume,
    const std::set<std::string>* in_progress) {
  auto ctx = ectx();
  ValuePtr t = zonk_head(type0, ctx);

  auto token = [&]() -> TermPtr { return mk<TEvidence>(cls, quote(t, at_depth, ctx)); };

  // local assumptions first
  for (auto& [lvl, acls, aty] : assume) {
    if (acls != cls) continue;
    UnifySettings st;  // conversion only, no solving
    if (unify(aty, t, at_depth, ctx, st).status == UnifyStatus::Ok)
      return mk<TVar>(at_depth - lvl - 1);
  }

  bool is_simple_cls = cls == "Simple";
  bool is_param_cls = cls == "Parameter";

  if (is_simple_cls || is_param_cls) {
    if (vas<VUnitT>(t)) return token();
    if (auto* x = vas<VTensor>(t)) {
      auto l = resolve_constraint(cls, x->lhs, at_depth, assume, in_progress);
      if (!l) return std::nullopt;
      auto r = resolve_constraint(cls, x->rhs, at_depth, assume, in_progress);
      if (!r) return std::nullopt;
      return token();
    }
  }
  if (is_param_cls) {
    if (vas<VType>(t) || vas<VBang>(t) || vas<VCirc>(t) || vas<VClassT>(t)) return token();
    if (auto* pi = vas<VPi>(t)) {
      ValuePtr cod = apply_closure(pi->cod, fresh_var(at_depth), ctx);
      if (pi->flavor == PiFlavor::Expl) {
        // unbanged value functions are linear; only type families are parameters
        ValuePtr cur = zonk_head(cod, ctx);
        int probe = at_depth + 1;
        while (auto* p2 = vas<VPi>(cur))
          cur = zonk_head(apply_closure(p2->cod, fresh_var(probe++), ctx), ctx);
        if (vas<VType>(cur)) return token();
        return std::nullopt;
      }
      auto r = resolve_constraint(cls, cod, at_depth + 1, assume, in_progress);
      if (!r) return std::nullopt;
      return token();
    }
    if (auto* ex = vas<VExists>(t)) {
      auto d = resolve_constraint(cls, ex->dom, at_depth, assume, in_progress);
      if (!d) return std::nullopt;
      ValuePtr cod = apply_closure(ex->cod, fresh_var(at_depth), ctx);
      auto c = resolve_constraint(cls, cod, at_depth + 1, assume, in_progress);
      if (!c) return std::nullopt;
      return token();
    }
  }

  if (auto* d = vas<VData>(t)) {
    if (in_progress && in_progress->count(d->name)) return token();
    const InstanceRule* rule = globals_.instance(cls, d->name);
    if (!rule) return std::nullopt;
    std::vector<TermPtr> premise_ev;
    for (auto& [pcls, pos] : rule->premises) {
      if (pos < 0 || pos >= (int)d->args.size()) return std::nullopt;
      auto ev = resolve_constraint(pcls, d->args[(size_t)pos], at_depth, assume, in_progress);
      if (!ev) return std::nullopt;
      premise_ev.push_back(*ev);
    }
    if (!rule->methods) return token();  // derived builtin rule
    TermPtr ev = mk<TGlobal>("$dict$" + cls + "$" + d->name);
    for (auto& p : premise_ev) ev = mk<TApp>(ev, p, AppFlavor::Inst);
    return ev;
  }
  return std::nullopt;
}

bool Elaborator::is_parameter_type(const ValuePtr& type) {
  ValuePtr w = whnf_v(type);
  if (head_is_flex(w)) return false;  // conservatively linear
  return resolve_constraint("Parameter", w, depth(), assumptions(), nullptr).has_value();
}

bool Elaborator::is_simple_type(const ValuePtr& type) {
  ValuePtr w = whnf_v(type);
  if (head_is_flex(w)) return false;
  return resolve_constraint("Simple", w, depth(), assumptions(), nullptr).has_value();
}

TermPtr Elaborator::constraint_obligation(const std::string& cls, const ValuePtr& type,
                                          Span span) {
  int id = next_hole_++;
  Obligation ob{cls, type, span, id, depth(), assumptions()};
  ValuePtr w = whnf_v(type);
  if (head_is_flex(w)) {
    pending_.push_back(std::move(ob));
    return mk<TEvHole>(id);
  }
  auto ev = resolve_constraint(cls, w, ob.depth, ob.assumptions, nullptr);
  if (!ev) {
    // the type may still gain structure once later arguments solve metas
    bool has_meta = false;
    {
      auto ctx = ectx();
      struct Probe {
        EvalCtx& ctx;
        bool found = false;
        void walk(const ValuePtr& v0, int d) {
          if (found) return;
          ValuePtr v = zonk_head(v0, ctx);
          if (auto* n = vas<VNeutral>(v)) {
            if (std::holds_alternative<HMeta>(n->head)) {
              found = true;
              return;
            }
            for (auto& e : n->spine)
              if (e.v) walk(e.v, d);
            return;
          }
          if (auto* c = vas<VCon>(v)) {
            for (auto& a : c->args) walk(a, d);
            return;
          }
          if (auto* da = vas<VData>(v)) {
            for (auto& a : da->args) walk(a, d);
            return;
          }
          if (auto* x = vas<VTensor>(v)) {
            walk(x->lhs, d);
            walk(x->rhs, d);
            return;
          }
          if (auto* bb = vas<VBang>(v)) walk(bb->inner, d);
        }
      } probe{ctx};
      probe.walk(w, depth());
      has_meta = probe.found;
    }
    if (has_meta) {
      pending_.push_back(std::move(ob));
      return mk<TEvHole>(id);
    }
    fail(Code::ClassResolutionError, span,
         "no instance for " + cls + " " + show(w));
  }
  solved_holes_[id] = *ev;
  return mk<TEvHole>(id);
}

void Elaborator::flush_obligations() {
  auto pending = std::move(pending_);
  pending_.clear();
  for (auto& ob : pending) {
    ValuePtr w = whnf_v(ob.type);
    auto ev = resolve_constraint(ob.cls, w, ob.depth, ob.assumptions, nullptr);
    if (!ev) {
      // report with the final, zonked type
      auto ctx = ectx();
      std::string shown = print_term(quote(w, ob.depth, ctx));
      Diagnostic d{Code::ClassResolutionError, ob.span, config_.file,
                   "no instance for " + ob.cls + " " + shown, {}};
      throw CompileError(std::move(d));
    }
    solved_holes_[ob.hole_id] = *ev;
  }
}

// ---------------------------------------------------------------------------
// automatic Simple/Parameter derivation

void Elaborator::derive_instances(const std::string& name) {
  const TyConInfo* tc = globals_.tycon(name);
  if (!tc) throw InternalError("derive_instances on unknown type " + name);
  auto ctx = ectx();

  if (tc->sort == TyConInfo::Sort::Object) {
    globals_.instances[{"Simple", name}] = {"Simple", name, {}, nullptr, {}};
    return;
  }

  // Treat every parameter position as satisfying `cls` and test all fields;
  // report which assumptions were actually consulted.
  auto fields_derivable = [&](const std::string& cls, std::set<int>& used) -> bool {
    std::set<std::string> in_progress{name};
    std::vector<std::tuple<int, std::string, ValuePtr>> assume;
    for (int i = 0; i < tc->n_params; i++) assume.push_back({i, cls, fresh_var(i)});

    auto check_fields = [&](const std::vector<TermPtr>& fieldTypes, int extra_binders) {
      Env env;
      for (int i = 0; i < tc->n_params; i++) env = env.push(fresh_var(i));
      for (int i = 0; i < extra_binders; i++) env = env.push(fresh_var(tc->n_params + i));
      int d = tc->n_params + extra_binders;
      for (auto& ft : fieldTypes) {
        ValuePtr fv = eval(ft, env, ctx);
        auto ev = resolve_constraint(cls, fv, d, assume, &in_progress);
        if (!ev) return false;
        // record consulted parameters syntactically
        for (int i = 0; i < tc->n_params; i++) {
          note_param_occurrences(fv, i, d, used);
        }
      }
      return true;
    };

    if (tc->sort == TyConInfo::Sort::Simple) {
      for (auto& cl : tc->clauses) {
        if (!check_fields(cl.fieldTypes, (int)cl.indexVars.size())) return false;
      }
      return true;
    }
    // data type: constructor fields are stored per constructor
    for (auto& cname : tc->ctors) {
      const GlobalEntry* ce = globals_.find(cname);
      // walk the constructor type: skip irrelevant binders, test field domains
      Env empty;
      ValuePtr cur = eval(ce->ctor.type, empty, ctx);
      std::vector<ValuePtr> fields;
      int lvl = 0;
      for (int i = 0; i < ce->ctor.n_irrelevant; i++) {
        auto* pi = vas<VPi>(zonk_head(cur, ctx));
        cur = apply_closure(pi->cod, fresh_var(lvl++), ctx);
      }
      for (int i = 0; i < ce->ctor.n_fields; i++) {
        auto* pi = vas<VPi>(zonk_head(cur, ctx));
        fields.push_back(pi->dom);
        cur = apply_closure(pi->cod, fresh_var(lvl++), ctx);
      }
      int d = ce->ctor.arity();
      for (auto& fv : fields) {
        auto ev = resolve_constraint(cls, fv, d, assume, &in_progress);
        if (!ev) return false;
        for (int i = 0; i < tc->n_params; i++) note_param_occurrences(fv, i, d, used);
      }
    }
    return true;
  };

  if (tc->sort == TyConInfo::Sort::Simple) {
    // Simple instance: premises on every type parameter
    InstanceRule simple_rule{"Simple", name, {}, nullptr, {}};
    for (int i = 0; i < tc->n_params; i++) simple_rule.premises.push_back({"Simple", i});
    globals_.instances[{"Simple", name}] = simple_rule;

    std::set<int> used;
    if (fields_derivable("Parameter", used)) {
      InstanceRule prule{"Parameter", name, {}, nullptr, {}};
      for (int i : used) prule.premises.push_back({"Parameter", i});
      globals_.instances[{"Parameter", name}] = prule;
    }
    return;
  }

  std::set<int> used;
  if (fields_derivable("Parameter", used)) {
    InstanceRule prule{"Parameter", name, {}, nullptr, {}};
    for (int i : used) prule.premises.push_back({"Parameter", i});
    globals_.instances[{"Parameter", name}] = prule;
  }
}

// Syntactic occurrence of parameter level `lvl` inside a value.
void Elaborator::note_param_occurrences(const ValuePtr& v0, int lvl, int depth, std::set<int>& used) {
  auto ctx = ectx();
  ValuePtr v = zonk_head(v0, ctx);
  if (auto* n = vas<VNeutral>(v)) {
    if (auto* h = std::get_if<HVar>(&n->head))
      if (h->level == lvl) used.insert(lvl);
    for (auto& e : n->spine)
      if (e.v) note_param_occurrences(e.v, lvl, depth, used);
    return;
  }
  if (auto* c = vas<VCon>(v)) {
    for (auto& a : c->args) note_param_occurrences(a, lvl, depth, used);
    return;
  }
  if (auto* d = vas<VData>(v)) {
    for (auto& a : d->args) note_param_occurrences(a, lvl, depth, used);
    return;
  }
  if (auto* x = vas<VTensor>(v)) {
    note_param_occurrences(x->lhs, lvl, depth, used);
    note_param_occurrences(x->rhs, lvl, depth, used);
    return;
  }
  if (auto* b = vas<VBang>(v)) {
    note_param_occurrences(b->inner, lvl, depth, used);
    return;
  }
  if (auto* p = vas<VPi>(v)) {
    note_param_occurrences(p->dom, lvl, depth, used);
    note_param_occurrences(apply_closure(p->cod, fresh_var(depth), ctx), lvl, depth + 1, used);
    return;
  }
  if (auto* e = vas<VExists>(v)) {
    note_param_occurrences(e->dom, lvl, depth, used);
    note_param_occurrences(apply_closure(e->cod, fresh_var(depth), ctx), lvl, depth + 1, used);
    return;
  }
  if (auto* c = vas<VCirc>(v)) {
    note_param_occurrences(c->in, lvl, depth, used);
    note_param_occurrences(c->out, lvl, depth, used);
    return;
  }
}

}  // namespace dpq::checker
