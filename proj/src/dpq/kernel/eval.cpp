#include "dpq/kernel/eval.hpp"

#include <cassert>

namespace dpq::kernel {

int builtin_arity(Builtin b) {
  switch (b) {
    case Builtin::Box: return 5;        // a b evS evS f
    case Builtin::Unbox: return 5;      // a b evS evS circ
    case Builtin::Reverse: return 5;    // a b evS evS circ
    case Builtin::ExistsBox: return 6;  // a b evS evP p f
    case Builtin::UnboxApply: return 2; // circ input
    case Builtin::KConst: return 2;     // captured evidence
    case Builtin::Method: return 2;     // class-param dict
  }
  return 0;
}

namespace {

ValuePtr neutral_app(const VNeutral& n, const ValuePtr& arg, AppFlavor flavor) {
  VNeutral out = n;
  out.spine.push_back({arg, flavor});
  return std::make_shared<Value>(Value{std::move(out)});
}

bool is_stuck_head(const ValuePtr& v) {
  if (auto* n = vas<VNeutral>(v))
    return std::holds_alternative<HCase>(n->head) || std::holds_alternative<HLetPair>(n->head);
  return false;
}

ValuePtr eval_case(const TermPtr& t, const TCase& c, const Env& env, EvalCtx& ctx);

}  // namespace

ValuePtr zonk_head(const ValuePtr& v, EvalCtx& ctx) {
  const VNeutral* n = vas<VNeutral>(v);
  if (!n || !ctx.metas) return v;
  const HMeta* m = std::get_if<HMeta>(&n->head);
  if (!m || !ctx.metas->is_solved(m->id)) return v;
  ValuePtr cur = ctx.metas->solution(m->id);
  for (auto& e : n->spine) {
    if (e.flavor == AppFlavor::ForceFrame)
      cur = force(cur, ctx);
    else
      cur = apply(cur, e.v, e.flavor, ctx);
  }
  return zonk_head(cur, ctx);
}

ValuePtr apply_closure(const Closure& clo, const ValuePtr& arg, EvalCtx& ctx) {
  ctx.spend();
  return eval(clo.body, clo.env.push(arg), ctx);
}

ValuePtr force(const ValuePtr& v0, EvalCtx& ctx) {
  ValuePtr v = zonk_head(v0, ctx);
  if (auto* l = vas<VLift>(v)) {
    if (l->direct) return l->direct;
    ctx.spend();
    return eval(l->thunk.term, l->thunk.env, ctx);
  }
  if (auto* n = vas<VNeutral>(v)) {
    VNeutral out = *n;
    out.spine.push_back({nullptr, AppFlavor::ForceFrame});
    return std::make_shared<Value>(Value{std::move(out)});
  }
  throw InternalError("force applied to a non-lifted value");
}

ValuePtr apply(const ValuePtr& fn0, const ValuePtr& arg, AppFlavor flavor, EvalCtx& ctx) {
  ValuePtr fn = zonk_head(fn0, ctx);
  if (auto* lam = vas<VLam>(fn)) return apply_closure(lam->clo, arg, ctx);
  if (auto* n = vas<VNeutral>(fn)) return neutral_app(*n, arg, flavor);
  if (auto* con = vas<VCon>(fn)) {
    VCon out = *con;
    out.args.push_back(arg);
    return std::make_shared<Value>(Value{std::move(out)});
  }
  if (auto* data = vas<VData>(fn)) {
    VData out = *data;
    out.args.push_back(arg);
    return std::make_shared<Value>(Value{std::move(out)});
  }
  if (auto* gate = vas<VGate>(fn)) {
    VGate out = *gate;
    out.args.push_back(arg);
    int arity = out.info->param_count + (int)out.info->arg_types.size();
    if ((int)out.args.size() < arity)
      return std::make_shared<Value>(Value{std::move(out)});
    if (!ctx.hooks) throw InternalError("gate applied during type-level evaluation");
    return ctx.hooks->apply_gate(*out.info, out.args);
  }
  if (auto* nat = vas<VNative>(fn)) {
    VNative out = *nat;
    out.args.push_back(arg);
    if ((int)out.args.size() < builtin_arity(out.id))
      return std::make_shared<Value>(Value{std::move(out)});
    if (out.id == Builtin::KConst) return out.args[0];
    if (out.id == Builtin::Method) {
      // args: class parameter, dictionary
      ValuePtr dict = zonk_head(out.args[1], ctx);
      auto* d = vas<VDict>(dict);
      if (!d) throw InternalError("method applied to a non-dictionary");
      auto it = d->methods->find(out.aux);
      if (it == d->methods->end())
        throw InternalError("dictionary is missing method " + out.aux);
      return it->second;
    }
    if (!ctx.hooks) throw InternalError("builtin applied during type-level evaluation");
    return ctx.hooks->apply_builtin(out.id, out.aux, out.args);
  }
  throw InternalError("application head is not a function value");
}

ValuePtr global_value(const std::string& name, EvalCtx& ctx) {
  const GlobalEntry* g = ctx.globals.find(name);
  if (!g) throw InternalError("unknown global " + name);
  switch (g->kind) {
    case GlobalKind::Ctor:
      return vmk<VCon>(name, std::vector<ValuePtr>{});
    case GlobalKind::TyCon:
      return vmk<VData>(name, std::vector<ValuePtr>{});
    case GlobalKind::Gate:
      if (ctx.type_mode())
        return vmk<VNeutral>(NeutralHead{HGlobal{name}}, std::vector<SpineEntry>{});
      return vmk<VGate>(ctx.globals.gate(name), std::vector<ValuePtr>{});
    case GlobalKind::Builtin:
      if (ctx.type_mode())
        return vmk<VNeutral>(NeutralHead{HGlobal{name}}, std::vector<SpineEntry>{});
      return vmk<VNative>(g->builtin, name, std::vector<ValuePtr>{});
    case GlobalKind::Method:
      if (ctx.type_mode())
        return vmk<VNeutral>(NeutralHead{HGlobal{name}}, std::vector<SpineEntry>{});
      return vmk<VNative>(Builtin::Method, name, std::vector<ValuePtr>{});
    case GlobalKind::Def: {
      ValuePtr& memo = ctx.type_mode() ? g->whnf_value : g->runtime_value;
      if (memo) return memo;
      if (!g->body) throw InternalError("global " + name + " has no committed body");
      ctx.spend();
      Env empty;
      ValuePtr v = eval(g->body, empty, ctx);
      memo = v;
      return v;
    }
  }
  throw InternalError("unhandled global kind");
}

namespace {

// Applies a global definition to a spine; if its body sticks on a case or a
// pair-let, the application is rolled back into a global-headed neutral so
// conversion can compare spines without unfolding.
ValuePtr eval_global_spine(const std::string& name, bool forced,
                           const std::vector<std::pair<ValuePtr, AppFlavor>>& args,
                           EvalCtx& ctx) {
  ValuePtr fn = global_value(name, ctx);
  if (forced) fn = force(fn, ctx);
  ValuePtr cur = fn;
  for (auto& [a, fl] : args) cur = apply(cur, a, fl, ctx);
  if (ctx.type_mode() && is_stuck_head(cur)) {
    VNeutral out{NeutralHead{HGlobal{name}}, {}};
    if (forced) out.spine.push_back({nullptr, AppFlavor::ForceFrame});
    for (auto& [a, fl] : args) out.spine.push_back({a, fl});
    return std::make_shared<Value>(Value{std::move(out)});
  }
  return cur;
}

ValuePtr eval_case(const TermPtr& t, const TCase& c, const Env& env, EvalCtx& ctx) {
  ValuePtr scrut = zonk_head(eval(c.scrut, env, ctx), ctx);
  if (auto* con = vas<VCon>(scrut)) {
    for (auto& br : c.branches) {
      if (br.ctor != con->name) continue;
      if (br.binders.size() != con->args.size())
        throw InternalError("case branch arity mismatch for " + br.ctor);
      Env e = env;
      for (auto& a : con->args) e = e.push(a);
      ctx.spend();
      return eval(br.body, e, ctx);
    }
    throw InternalError("no case branch for constructor " + con->name);
  }
  if (!ctx.type_mode())
    throw InternalError("runtime case scrutinee is not a constructor value");
  return vmk<VNeutral>(NeutralHead{HCase{scrut, t, env}}, std::vector<SpineEntry>{});
}

}  // namespace

ValuePtr eval(const TermPtr& t, const Env& env, EvalCtx& ctx) {
  if (ctx.hooks) ctx.hooks->tick();
  if (auto* v = as<TVar>(t)) return env.get(v->index);
  if (auto* g = as<TGlobal>(t)) return global_value(g->name, ctx);
  if (auto* l = as<TLam>(t)) return vmk<VLam>(l->hint, Closure{env, l->body});
  if (as<TApp>(t)) {
    // collect the spine to recognise global-headed applications
    std::vector<std::pair<TermPtr, AppFlavor>> rev;
    TermPtr cur = t;
    while (auto* app = as<TApp>(cur)) {
      rev.push_back({app->arg, app->flavor});
      cur = app->fn;
    }
    bool forced = false;
    TermPtr head = cur;
    if (auto* f = as<TForce>(head)) {
      if (as<TGlobal>(f->inner)) {
        forced = true;
        head = f->inner;
      }
    }
    if (auto* g = as<TGlobal>(head)) {
      const GlobalEntry* ge = ctx.globals.find(g->name);
      if (ge && ge->kind == GlobalKind::Def) {
        std::vector<std::pair<ValuePtr, AppFlavor>> args;
        args.reserve(rev.size());
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
          args.push_back({eval(it->first, env, ctx), it->second});
        return eval_global_spine(g->name, forced, args, ctx);
      }
    }
    ValuePtr fn = eval(cur, env, ctx);
    for (auto it = rev.rbegin(); it != rev.rend(); ++it)
      fn = apply(fn, eval(it->first, env, ctx), it->second, ctx);
    return fn;
  }
  if (auto* p = as<TPi>(t)) return vmk<VPi>(p->hint, eval(p->dom, env, ctx), Closure{env, p->cod}, p->flavor);
  if (auto* b = as<TBang>(t)) return vmk<VBang>(eval(b->inner, env, ctx));
  if (auto* l = as<TLift>(t)) return vmk<VLift>(Closure0{env, l->inner});
  if (auto* f = as<TForce>(t)) return force(eval(f->inner, env, ctx), ctx);
  if (auto* x = as<TTensor>(t)) return vmk<VTensor>(eval(x->lhs, env, ctx), eval(x->rhs, env, ctx));
  if (as<TUnitT>(t)) return vmk<VUnitT>();
  if (as<TUnitV>(t)) return vmk<VUnitV>();
  if (auto* p = as<TPair>(t)) return vmk<VPair>(eval(p->fst, env, ctx), eval(p->snd, env, ctx));
  if (auto* e = as<TExists>(t)) return vmk<VExists>(e->hint, eval(e->dom, env, ctx), Closure{env, e->cod});
  if (auto* c = as<TCirc>(t)) return vmk<VCirc>(eval(c->in, env, ctx), eval(c->out, env, ctx));
  if (as<TType>(t)) return vmk<VType>();
  if (auto* c = as<TCase>(t)) return eval_case(t, *c, env, ctx);
  if (auto* l = as<TLet>(t)) {
    ValuePtr bound = eval(l->bound, env, ctx);
    return eval(l->body, env.push(bound), ctx);
  }
  if (auto* l = as<TLetPair>(t)) {
    ValuePtr bound = zonk_head(eval(l->bound, env, ctx), ctx);
    if (auto* p = vas<VPair>(bound))
      return eval(l->body, env.push(p->fst).push(p->snd), ctx);
    if (!ctx.type_mode())
      throw InternalError("runtime pair-let bound value is not a pair");
    return vmk<VNeutral>(NeutralHead{HLetPair{bound, t, env}}, std::vector<SpineEntry>{});
  }
  if (auto* c = as<TClassT>(t)) return vmk<VClassT>(c->cls, eval(c->arg, env, ctx));
  if (as<TEvidence>(t)) return vmk<VEvToken>();
  if (auto* m = as<TMeta>(t)) {
    if (ctx.metas && ctx.metas->is_solved(m->id)) return ctx.metas->solution(m->id);
    return vmk<VNeutral>(NeutralHead{HMeta{m->id}}, std::vector<SpineEntry>{});
  }
  if (as<TEvHole>(t))
    throw InternalError("unresolved evidence hole survived elaboration");
  throw InternalError("eval: unhandled term");
}

ValuePtr whnf(const TermPtr& t, const Env& env, const GlobalTable& globals, long fuel,
              MetaCtx* metas) {
  EvalCtx ctx{globals, metas, &fuel, nullptr};
  return eval(t, env, ctx);
}

TermPtr quote(const ValuePtr& v0, int depth, EvalCtx& ctx) {
  ValuePtr v = zonk_head(v0, ctx);
  if (auto* n = vas<VNeutral>(v)) {
    TermPtr head;
    if (auto* h = std::get_if<HVar>(&n->head)) {
      head = mk<TVar>(depth - 1 - h->level);
    } else if (auto* h = std::get_if<HMeta>(&n->head)) {
      head = mk<TMeta>(h->id);
    } else if (auto* h = std::get_if<HGlobal>(&n->head)) {
      head = mk<TGlobal>(h->name);
    } else if (auto* h = std::get_if<HCase>(&n->head)) {
      auto* c = as<TCase>(h->caseTerm);
      TCase out;
      out.scrut = quote(h->scrut, depth, ctx);
      for (auto& br : c->branches) {
        Env e = h->env;
        int d = depth;
        for (size_t i = 0; i < br.binders.size(); i++) e = e.push(fresh_var(d++));
        out.branches.push_back({br.ctor, br.binders, quote(eval(br.body, e, ctx), d, ctx)});
      }
      head = std::make_shared<Term>(Term{std::move(out)});
    } else if (auto* h = std::get_if<HLetPair>(&n->head)) {
      auto* l = as<TLetPair>(h->letTerm);
      Env e = h->env.push(fresh_var(depth)).push(fresh_var(depth + 1));
      head = mk<TLetPair>(l->hint1, l->hint2, quote(h->bound, depth, ctx),
                          quote(eval(l->body, e, ctx), depth + 2, ctx));
    } else {
      throw InternalError("quote: unhandled neutral head");
    }
    for (auto& e : n->spine) {
      if (e.flavor == AppFlavor::ForceFrame)
        head = mk<TForce>(head);
      else
        head = mk<TApp>(head, quote(e.v, depth, ctx), e.flavor);
    }
    return head;
  }
  if (auto* c = vas<VCon>(v)) {
    TermPtr head = mk<TGlobal>(c->name);
    const GlobalEntry* g = ctx.globals.find(c->name);
    int n_irrel = g ? g->ctor.n_irrelevant : 0;
    for (size_t i = 0; i < c->args.size(); i++)
      head = mk<TApp>(head, quote(c->args[i], depth, ctx),
                      (int)i < n_irrel ? AppFlavor::Irrel : AppFlavor::Expl);
    return head;
  }
  if (auto* d = vas<VData>(v)) {
    TermPtr head = mk<TGlobal>(d->name);
    for (auto& a : d->args) head = mk<TApp>(head, quote(a, depth, ctx), AppFlavor::Expl);
    return head;
  }
  if (auto* l = vas<VLam>(v))
    return mk<TLam>(l->hint, quote(apply_closure(l->clo, fresh_var(depth), ctx), depth + 1, ctx));
  if (auto* p = vas<VPi>(v))
    return mk<TPi>(p->hint, quote(p->dom, depth, ctx),
                   quote(apply_closure(p->cod, fresh_var(depth), ctx), depth + 1, ctx),
                   p->flavor);
  if (auto* b = vas<VBang>(v)) return mk<TBang>(quote(b->inner, depth, ctx));
  if (auto* l = vas<VLift>(v)) {
    ValuePtr inner = l->direct ? l->direct : eval(l->thunk.term, l->thunk.env, ctx);
    return mk<TLift>(quote(inner, depth, ctx));
  }
  if (auto* x = vas<VTensor>(v))
    return mk<TTensor>(quote(x->lhs, depth, ctx), quote(x->rhs, depth, ctx));
  if (vas<VUnitT>(v)) return mk<TUnitT>();
  if (vas<VUnitV>(v)) return mk<TUnitV>();
  if (auto* p = vas<VPair>(v)) return mk<TPair>(quote(p->fst, depth, ctx), quote(p->snd, depth, ctx));
  if (auto* e = vas<VExists>(v))
    return mk<TExists>(e->hint, quote(e->dom, depth, ctx),
                       quote(apply_closure(e->cod, fresh_var(depth), ctx), depth + 1, ctx));
  if (auto* c = vas<VCirc>(v)) return mk<TCirc>(quote(c->in, depth, ctx), quote(c->out, depth, ctx));
  if (vas<VType>(v)) return mk<TType>();
  if (auto* c = vas<VClassT>(v)) return mk<TClassT>(c->cls, quote(c->arg, depth, ctx));
  if (vas<VEvToken>(v)) return mk<TEvidence>("", mk<TUnitT>());
  throw InternalError("quote applied to a runtime-only value");
}

std::optional<uint64_t> numeral_of(const ValuePtr& v) {
  uint64_t n = 0;
  const Value* cur = v.get();
  for (;;) {
    auto* con = std::get_if<VCon>(&cur->v);
    if (!con) return std::nullopt;
    if (con->name == "Z" && con->args.empty()) return n;
    if (con->name == "S" && con->args.size() == 1) {
      n++;
      cur = con->args[0].get();
      continue;
    }
    return std::nullopt;
  }
}

ValuePtr numeral(uint64_t n) {
  ValuePtr v = vmk<VCon>("Z", std::vector<ValuePtr>{});
  for (uint64_t i = 0; i < n; i++) v = vmk<VCon>("S", std::vector<ValuePtr>{v});
  return v;
}

}  // namespace dpq::kernel
