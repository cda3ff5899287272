#include "dpq/kernel/unify.hpp"

namespace dpq::kernel {

namespace {

UnifyResult ok() { return {UnifyStatus::Ok, nullptr, nullptr}; }
UnifyResult mismatch(ValuePtr a, ValuePtr b) {
  return {UnifyStatus::Mismatch, std::move(a), std::move(b)};
}
UnifyResult nonpattern(ValuePtr a, ValuePtr b) {
  return {UnifyStatus::NonPattern, std::move(a), std::move(b)};
}

// Resolves solved metas and already-refined variables at the head.
ValuePtr resolve(const ValuePtr& v0, EvalCtx& ctx, UnifySettings& st) {
  ValuePtr v = zonk_head(v0, ctx);
  if (!st.refinements) return v;
  auto* n = vas<VNeutral>(v);
  if (!n) return v;
  auto* h = std::get_if<HVar>(&n->head);
  if (!h) return v;
  auto it = st.refinements->find(h->level);
  if (it == st.refinements->end()) return v;
  ValuePtr cur = it->second;
  for (auto& e : n->spine) {
    if (e.flavor == AppFlavor::ForceFrame)
      cur = force(cur, ctx);
    else
      cur = apply(cur, e.v, e.flavor, ctx);
  }
  return resolve(cur, ctx, st);
}

struct Scanner {
  EvalCtx& ctx;
  UnifySettings& st;
  int meta_id;     // -1 to skip the occurs check
  int min_level;   // levels in [min_level, max_level) are escapes
  int max_level;
  int bad_var;     // -1, or a level that must not occur

  bool check(const ValuePtr& v0, int depth) {
    ValuePtr v = resolve(v0, ctx, st);
    if (auto* n = vas<VNeutral>(v)) {
      if (auto* h = std::get_if<HVar>(&n->head)) {
        if (h->level == bad_var) return false;
        if (h->level >= min_level && h->level < max_level) return false;
      } else if (auto* h = std::get_if<HMeta>(&n->head)) {
        if (h->id == meta_id) return false;
      } else if (auto* h = std::get_if<HCase>(&n->head)) {
        if (!check(h->scrut, depth)) return false;
        auto* c = as<TCase>(h->caseTerm);
        for (auto& br : c->branches) {
          Env e = h->env;
          int d = depth;
          for (size_t i = 0; i < br.binders.size(); i++) e = e.push(fresh_var(d++));
          if (!check(eval(br.body, e, ctx), d)) return false;
        }
      } else if (auto* h = std::get_if<HLetPair>(&n->head)) {
        if (!check(h->bound, depth)) return false;
        auto* l = as<TLetPair>(h->letTerm);
        Env e = h->env.push(fresh_var(depth)).push(fresh_var(depth + 1));
        if (!check(eval(l->body, e, ctx), depth + 2)) return false;
      }
      for (auto& e : n->spine)
        if (e.v && !check(e.v, depth)) return false;
      return true;
    }
    if (auto* c = vas<VCon>(v)) {
      for (auto& a : c->args)
        if (!check(a, depth)) return false;
      return true;
    }
    if (auto* d = vas<VData>(v)) {
      for (auto& a : d->args)
        if (!check(a, depth)) return false;
      return true;
    }
    if (auto* l = vas<VLam>(v))
      return check(apply_closure(l->clo, fresh_var(depth), ctx), depth + 1);
    if (auto* p = vas<VPi>(v))
      return check(p->dom, depth) &&
             check(apply_closure(p->cod, fresh_var(depth), ctx), depth + 1);
    if (auto* b = vas<VBang>(v)) return check(b->inner, depth);
    if (auto* l = vas<VLift>(v))
      return check(l->direct ? l->direct : eval(l->thunk.term, l->thunk.env, ctx), depth);
    if (auto* t = vas<VTensor>(v)) return check(t->lhs, depth) && check(t->rhs, depth);
    if (auto* p = vas<VPair>(v)) return check(p->fst, depth) && check(p->snd, depth);
    if (auto* e = vas<VExists>(v))
      return check(e->dom, depth) &&
             check(apply_closure(e->cod, fresh_var(depth), ctx), depth + 1);
    if (auto* c = vas<VCirc>(v)) return check(c->in, depth) && check(c->out, depth);
    if (auto* c = vas<VClassT>(v)) return check(c->arg, depth);
    return true;
  }
};

struct Unifier {
  EvalCtx& ctx;
  UnifySettings& st;

  UnifyResult spine_pair(const std::vector<SpineEntry>& sa, const std::vector<SpineEntry>& sb,
                         int depth, const ValuePtr& va, const ValuePtr& vb) {
    if (sa.size() != sb.size()) return mismatch(va, vb);
    for (size_t i = 0; i < sa.size(); i++) {
      bool fa = sa[i].flavor == AppFlavor::ForceFrame;
      bool fb = sb[i].flavor == AppFlavor::ForceFrame;
      if (fa != fb) return mismatch(va, vb);
      if (fa) continue;
      if (auto r = go(sa[i].v, sb[i].v, depth); !r) return r;
    }
    return ok();
  }

  UnifyResult solve_meta(int id, const std::vector<SpineEntry>& spine, const ValuePtr& flex,
                         const ValuePtr& rigid, int depth) {
    // reject force frames in the flexible spine
    for (auto& e : spine)
      if (e.flavor == AppFlavor::ForceFrame) return nonpattern(flex, rigid);

    if (spine.empty()) {
      Scanner sc{ctx, st, id, st.metas->entries[id].depth, depth, -1};
      if (!sc.check(rigid, depth)) return nonpattern(flex, rigid);
      st.metas->solve(id, rigid);
      return ok();
    }
    // first-order approximation: match the flexible spine against the
    // suffix of a rigid application and solve the head to the prefix
    auto match_args = [&](ValuePtr head, const std::vector<ValuePtr>& args) -> UnifyResult {
      if (args.size() < spine.size()) return nonpattern(flex, rigid);
      size_t off = args.size() - spine.size();
      Scanner sc{ctx, st, id, st.metas->entries[id].depth, depth, -1};
      if (!sc.check(head, depth)) return nonpattern(flex, rigid);
      st.metas->solve(id, head);
      for (size_t i = 0; i < spine.size(); i++)
        if (auto r = go(spine[i].v, args[off + i], depth); !r) return r;
      return ok();
    };
    if (auto* d = vas<VData>(rigid)) {
      if (d->args.size() < spine.size()) return nonpattern(flex, rigid);
      std::vector<ValuePtr> prefix(d->args.begin(), d->args.end() - spine.size());
      return match_args(vmk<VData>(d->name, prefix), d->args);
    }
    if (auto* c = vas<VCon>(rigid)) {
      if (c->args.size() < spine.size()) return nonpattern(flex, rigid);
      std::vector<ValuePtr> prefix(c->args.begin(), c->args.end() - spine.size());
      return match_args(vmk<VCon>(c->name, prefix), c->args);
    }
    return nonpattern(flex, rigid);
  }

  bool refinable_var(const ValuePtr& v, int* level) {
    if (!st.refinable) return false;
    auto* n = vas<VNeutral>(v);
    if (!n || !n->spine.empty()) return false;
    auto* h = std::get_if<HVar>(&n->head);
    if (!h || !st.refinable->count(h->level)) return false;
    *level = h->level;
    return true;
  }

  UnifyResult go(const ValuePtr& a0, const ValuePtr& b0, int depth) {
    ValuePtr a = resolve(a0, ctx, st);
    ValuePtr b = resolve(b0, ctx, st);
    if (a.get() == b.get()) return ok();

    auto* na = vas<VNeutral>(a);
    auto* nb = vas<VNeutral>(b);
    const HMeta* ma = na ? std::get_if<HMeta>(&na->head) : nullptr;
    const HMeta* mb = nb ? std::get_if<HMeta>(&nb->head) : nullptr;

    if (st.metas) {
      if (ma && mb) {
        if (ma->id == mb->id) return spine_pair(na->spine, nb->spine, depth, a, b);
        if (na->spine.empty()) return solve_meta(ma->id, na->spine, a, b, depth);
        if (nb->spine.empty()) return solve_meta(mb->id, nb->spine, b, a, depth);
        if (na->spine.size() == nb->spine.size()) {
          // first-order approximation: equate the heads, then the arguments
          ValuePtr hb = vmk<VNeutral>(NeutralHead{HMeta{mb->id}}, std::vector<SpineEntry>{});
          if (auto r = solve_meta(ma->id, {}, a, hb, depth); !r) return r;
          return spine_pair(na->spine, nb->spine, depth, a, b);
        }
        return nonpattern(a, b);
      }
      if (ma) return solve_meta(ma->id, na->spine, a, b, depth);
      if (mb) return solve_meta(mb->id, nb->spine, b, a, depth);
    } else if (ma || mb) {
      return mismatch(a, b);  // conversion never sees unsolved metas
    }

    int la, lb;
    bool ra = refinable_var(a, &la);
    bool rb = refinable_var(b, &lb);
    if (ra && rb && la == lb) return ok();
    if (ra || rb) {
      int lvl = ra ? la : lb;
      const ValuePtr& other = ra ? b : a;
      Scanner sc{ctx, st, -1, 0, 0, lvl};
      if (!sc.check(other, depth)) return mismatch(a, b);
      (*st.refinements)[lvl] = other;
      return ok();
    }

    // rigid-rigid
    if (na && nb) {
      if (auto* ha = std::get_if<HVar>(&na->head)) {
        auto* hb = std::get_if<HVar>(&nb->head);
        if (!hb || ha->level != hb->level) return mismatch(a, b);
        return spine_pair(na->spine, nb->spine, depth, a, b);
      }
      if (auto* ha = std::get_if<HGlobal>(&na->head)) {
        auto* hb = std::get_if<HGlobal>(&nb->head);
        if (!hb || ha->name != hb->name) return mismatch(a, b);
        return spine_pair(na->spine, nb->spine, depth, a, b);
      }
      if (auto* ha = std::get_if<HCase>(&na->head)) {
        auto* hb = std::get_if<HCase>(&nb->head);
        if (!hb) return mismatch(a, b);
        if (auto r = go(ha->scrut, hb->scrut, depth); !r) return r;
        auto* ca = as<TCase>(ha->caseTerm);
        auto* cb = as<TCase>(hb->caseTerm);
        if (ca->branches.size() != cb->branches.size()) return mismatch(a, b);
        for (auto& bra : ca->branches) {
          const TBranch* brb = nullptr;
          for (auto& cand : cb->branches)
            if (cand.ctor == bra.ctor) brb = &cand;
          if (!brb || brb->binders.size() != bra.binders.size()) return mismatch(a, b);
          Env ea = ha->env, eb = hb->env;
          int d = depth;
          for (size_t i = 0; i < bra.binders.size(); i++) {
            ValuePtr fv = fresh_var(d++);
            ea = ea.push(fv);
            eb = eb.push(fv);
          }
          if (auto r = go(eval(bra.body, ea, ctx), eval(brb->body, eb, ctx), d); !r) return r;
        }
        return spine_pair(na->spine, nb->spine, depth, a, b);
      }
      if (auto* ha = std::get_if<HLetPair>(&na->head)) {
        auto* hb = std::get_if<HLetPair>(&nb->head);
        if (!hb) return mismatch(a, b);
        if (auto r = go(ha->bound, hb->bound, depth); !r) return r;
        auto* la_ = as<TLetPair>(ha->letTerm);
        auto* lb_ = as<TLetPair>(hb->letTerm);
        ValuePtr f1 = fresh_var(depth), f2 = fresh_var(depth + 1);
        Env ea = ha->env.push(f1).push(f2);
        Env eb = hb->env.push(f1).push(f2);
        if (auto r = go(eval(la_->body, ea, ctx), eval(lb_->body, eb, ctx), depth + 2); !r)
          return r;
        return spine_pair(na->spine, nb->spine, depth, a, b);
      }
      return mismatch(a, b);
    }
    if (na || nb) return mismatch(a, b);

    if (auto* ca = vas<VCon>(a)) {
      auto* cb = vas<VCon>(b);
      if (!cb || ca->name != cb->name || ca->args.size() != cb->args.size())
        return mismatch(a, b);
      for (size_t i = 0; i < ca->args.size(); i++)
        if (auto r = go(ca->args[i], cb->args[i], depth); !r) return r;
      return ok();
    }
    if (auto* da = vas<VData>(a)) {
      auto* db = vas<VData>(b);
      if (!db || da->name != db->name || da->args.size() != db->args.size())
        return mismatch(a, b);
      for (size_t i = 0; i < da->args.size(); i++)
        if (auto r = go(da->args[i], db->args[i], depth); !r) return r;
      return ok();
    }
    if (auto* la = vas<VLam>(a)) {
      auto* lb = vas<VLam>(b);
      if (!lb) return mismatch(a, b);
      ValuePtr fv = fresh_var(depth);
      return go(apply_closure(la->clo, fv, ctx), apply_closure(lb->clo, fv, ctx), depth + 1);
    }
    if (auto* pa = vas<VPi>(a)) {
      auto* pb = vas<VPi>(b);
      if (!pb || pa->flavor != pb->flavor) return mismatch(a, b);
      if (auto r = go(pa->dom, pb->dom, depth); !r) return r;
      ValuePtr fv = fresh_var(depth);
      return go(apply_closure(pa->cod, fv, ctx), apply_closure(pb->cod, fv, ctx), depth + 1);
    }
    if (auto* ba = vas<VBang>(a)) {
      auto* bb = vas<VBang>(b);
      if (!bb) return mismatch(a, b);
      return go(ba->inner, bb->inner, depth);
    }
    if (auto* la = vas<VLift>(a)) {
      auto* lb = vas<VLift>(b);
      if (!lb) return mismatch(a, b);
      ValuePtr ia = la->direct ? la->direct : eval(la->thunk.term, la->thunk.env, ctx);
      ValuePtr ib = lb->direct ? lb->direct : eval(lb->thunk.term, lb->thunk.env, ctx);
      return go(ia, ib, depth);
    }
    if (auto* ta = vas<VTensor>(a)) {
      auto* tb = vas<VTensor>(b);
      if (!tb) return mismatch(a, b);
      if (auto r = go(ta->lhs, tb->lhs, depth); !r) return r;
      return go(ta->rhs, tb->rhs, depth);
    }
    if (vas<VUnitT>(a)) return vas<VUnitT>(b) ? ok() : mismatch(a, b);
    if (vas<VUnitV>(a)) return vas<VUnitV>(b) ? ok() : mismatch(a, b);
    if (auto* pa = vas<VPair>(a)) {
      auto* pb = vas<VPair>(b);
      if (!pb) return mismatch(a, b);
      if (auto r = go(pa->fst, pb->fst, depth); !r) return r;
      return go(pa->snd, pb->snd, depth);
    }
    if (auto* ea = vas<VExists>(a)) {
      auto* eb = vas<VExists>(b);
      if (!eb) return mismatch(a, b);
      if (auto r = go(ea->dom, eb->dom, depth); !r) return r;
      ValuePtr fv = fresh_var(depth);
      return go(apply_closure(ea->cod, fv, ctx), apply_closure(eb->cod, fv, ctx), depth + 1);
    }
    if (auto* ca = vas<VCirc>(a)) {
      auto* cb = vas<VCirc>(b);
      if (!cb) return mismatch(a, b);
      if (auto r = go(ca->in, cb->in, depth); !r) return r;
      return go(ca->out, cb->out, depth);
    }
    if (vas<VType>(a)) return vas<VType>(b) ? ok() : mismatch(a, b);
    if (auto* ca = vas<VClassT>(a)) {
      auto* cb = vas<VClassT>(b);
      if (!cb || ca->cls != cb->cls) return mismatch(a, b);
      return go(ca->arg, cb->arg, depth);
    }
    if (vas<VEvToken>(a)) return vas<VEvToken>(b) ? ok() : mismatch(a, b);
    return mismatch(a, b);
  }
};

}  // namespace

UnifyResult unify(const ValuePtr& a, const ValuePtr& b, int depth, EvalCtx& ctx,
                  UnifySettings& st) {
  Unifier u{ctx, st};
  return u.go(a, b, depth);
}

bool def_equal(const ValuePtr& a, const ValuePtr& b, int depth, EvalCtx& ctx) {
  UnifySettings st;
  st.metas = ctx.metas;
  Unifier u{ctx, st};
  return bool(u.go(a, b, depth));
}

bool def_equal_terms(const TermPtr& a, const TermPtr& b, const Env& env,
                     const GlobalTable& globals, long fuel) {
  EvalCtx ctx{globals, nullptr, &fuel, nullptr};
  ValuePtr va = eval(a, env, ctx);
  ValuePtr vb = eval(b, env, ctx);
  UnifySettings st;
  Unifier u{ctx, st};
  return bool(u.go(va, vb, env.size()));
}

}  // namespace dpq::kernel
