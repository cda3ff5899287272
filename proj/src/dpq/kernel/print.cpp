#include "dpq/kernel/print.hpp"

#include <algorithm>

namespace dpq::kernel {

namespace {

bool uses_var(const TermPtr& t, int index) {
  if (auto* v = as<TVar>(t)) return v->index == index;
  if (auto* a = as<TApp>(t)) return uses_var(a->fn, index) || uses_var(a->arg, index);
  if (auto* l = as<TLam>(t)) return uses_var(l->body, index + 1);
  if (auto* p = as<TPi>(t))
    return uses_var(p->dom, index) || uses_var(p->cod, index + 1);
  if (auto* b = as<TBang>(t)) return uses_var(b->inner, index);
  if (auto* l = as<TLift>(t)) return uses_var(l->inner, index);
  if (auto* f = as<TForce>(t)) return uses_var(f->inner, index);
  if (auto* x = as<TTensor>(t)) return uses_var(x->lhs, index) || uses_var(x->rhs, index);
  if (auto* p = as<TPair>(t)) return uses_var(p->fst, index) || uses_var(p->snd, index);
  if (auto* e = as<TExists>(t))
    return uses_var(e->dom, index) || uses_var(e->cod, index + 1);
  if (auto* c = as<TCirc>(t)) return uses_var(c->in, index) || uses_var(c->out, index);
  if (auto* c = as<TCase>(t)) {
    if (uses_var(c->scrut, index)) return true;
    for (auto& br : c->branches)
      if (uses_var(br.body, index + (int)br.binders.size())) return true;
    return false;
  }
  if (auto* l = as<TLet>(t)) return uses_var(l->bound, index) || uses_var(l->body, index + 1);
  if (auto* l = as<TLetPair>(t))
    return uses_var(l->bound, index) || uses_var(l->body, index + 2);
  if (auto* c = as<TClassT>(t)) return uses_var(c->arg, index);
  if (auto* e = as<TEvidence>(t)) return uses_var(e->arg, index);
  return false;
}

struct TermPrinter {
  std::vector<std::string> names;

  std::string fresh(const std::string& hint) {
    std::string base = hint.empty() || hint == "_" ? "x" : hint;
    std::string name = base;
    while (std::count(names.begin(), names.end(), name)) name += "'";
    return name;
  }

  std::optional<uint64_t> numeral_term(const TermPtr& t) {
    uint64_t n = 0;
    const Term* cur = t.get();
    for (;;) {
      if (auto* g = std::get_if<TGlobal>(&cur->v)) {
        if (g->name == "Z") return n;
        return std::nullopt;
      }
      auto* a = std::get_if<TApp>(&cur->v);
      if (!a) return std::nullopt;
      auto* g = std::get_if<TGlobal>(&a->fn->v);
      if (!g || g->name != "S") return std::nullopt;
      n++;
      cur = a->arg.get();
    }
  }

  void wrap(std::string& s, bool need) {
    if (need) s = "(" + s + ")";
  }

  // precedence: 0 arrows/binders, 1 tensor, 4 application, 5 atoms
  std::string go(const TermPtr& t, int prec) {
    if (auto* v = as<TVar>(t)) {
      int i = (int)names.size() - 1 - v->index;
      return i >= 0 ? names[i] : "#" + std::to_string(v->index);
    }
    if (auto* g = as<TGlobal>(t)) return g->name;
    if (auto* l = as<TLam>(t)) {
      std::string n = fresh(l->hint);
      names.push_back(n);
      std::string body = go(l->body, 0);
      names.pop_back();
      std::string s = "\\ " + n + " -> " + body;
      wrap(s, prec > 0);
      return s;
    }
    if (as<TApp>(t)) {
      // collect relevant arguments
      std::vector<TermPtr> args;
      TermPtr cur = t;
      while (true) {
        if (auto* a = as<TApp>(cur)) {
          if (a->flavor == AppFlavor::Expl) args.push_back(a->arg);
          cur = a->fn;
          continue;
        }
        if (auto* f = as<TForce>(cur)) {
          cur = f->inner;
          continue;
        }
        break;
      }
      std::string s = go(cur, args.empty() ? prec : 4);
      for (auto it = args.rbegin(); it != args.rend(); ++it) s += " " + go(*it, 5);
      if (!args.empty()) wrap(s, prec > 4);
      return s;
    }
    if (auto* p = as<TPi>(t)) {
      std::string s;
      std::string dom = go(p->dom, p->flavor == PiFlavor::Expl && !uses_var(p->cod, 0) ? 1 : 0);
      if (p->flavor == PiFlavor::Inst) {
        auto* c = as<TClassT>(p->dom);
        std::string inner = c ? dom : "(" + dom + ")";
        names.push_back(fresh("ev"));
        s = "(" + inner + ") => " + go(p->cod, 0);
        names.pop_back();
      } else if (p->flavor == PiFlavor::Expl && !uses_var(p->cod, 0)) {
        names.push_back(fresh("_"));
        s = dom + " -> " + go(p->cod, 0);
        names.pop_back();
      } else {
        std::string n = fresh(p->hint);
        names.push_back(n);
        std::string binder = "(" + n + " : " + dom + ")";
        if (p->flavor == PiFlavor::Irrel) binder = "forall " + binder;
        if (p->flavor == PiFlavor::Impl) binder = "{" + n + " : " + dom + "}";
        s = binder + " -> " + go(p->cod, 0);
        names.pop_back();
      }
      wrap(s, prec > 0);
      return s;
    }
    if (auto* b = as<TBang>(t)) return "!" + go(b->inner, 5);
    if (auto* l = as<TLift>(t)) return go(l->inner, prec);
    if (auto* f = as<TForce>(t)) return go(f->inner, prec);
    if (auto* x = as<TTensor>(t)) {
      std::string s = go(x->lhs, 1) + " * " + go(x->rhs, 4);
      wrap(s, prec > 1);
      return s;
    }
    if (as<TUnitT>(t)) return "Unit";
    if (as<TUnitV>(t)) return "()";
    if (auto* p = as<TPair>(t)) {
      std::vector<TermPtr> elems;
      TermPtr cur = t;
      while (auto* pp = as<TPair>(cur)) {
        elems.push_back(pp->snd);
        cur = pp->fst;
      }
      elems.push_back(cur);
      std::string s = "(";
      for (size_t i = elems.size(); i-- > 0;) {
        s += go(elems[i], 0);
        if (i) s += ", ";
      }
      (void)p;
      return s + ")";
    }
    if (auto* e = as<TExists>(t)) {
      std::string n = fresh(e->hint);
      std::string dom = go(e->dom, 0);
      names.push_back(n);
      std::string s = "(" + n + " : " + dom + ") * " + go(e->cod, 4);
      names.pop_back();
      wrap(s, prec > 1);
      return s;
    }
    if (auto* c = as<TCirc>(t)) return "Circ(" + go(c->in, 0) + ", " + go(c->out, 0) + ")";
    if (as<TType>(t)) return "Type";
    if (auto* c = as<TCase>(t)) {
      std::string s = "case " + go(c->scrut, 1) + " of {";
      for (size_t i = 0; i < c->branches.size(); i++) {
        if (i) s += "; ";
        auto& br = c->branches[i];
        s += br.ctor;
        std::vector<std::string> bound;
        for (auto& b : br.binders) {
          std::string n = fresh(b);
          names.push_back(n);
          bound.push_back(n);
          s += " " + n;
        }
        s += " -> " + go(br.body, 0);
        for (size_t j = 0; j < bound.size(); j++) names.pop_back();
      }
      s += "}";
      wrap(s, prec > 0);
      return s;
    }
    if (auto* l = as<TLet>(t)) {
      std::string n = fresh(l->hint);
      std::string bound = go(l->bound, 0);
      names.push_back(n);
      std::string s = "let " + n + " = " + bound + " in " + go(l->body, 0);
      names.pop_back();
      wrap(s, prec > 0);
      return s;
    }
    if (auto* l = as<TLetPair>(t)) {
      std::string bound = go(l->bound, 0);
      std::string n1 = fresh(l->hint1);
      names.push_back(n1);
      std::string n2 = fresh(l->hint2);
      names.push_back(n2);
      std::string s = "let (" + n1 + ", " + n2 + ") = " + bound + " in " + go(l->body, 0);
      names.pop_back();
      names.pop_back();
      wrap(s, prec > 0);
      return s;
    }
    if (auto* c = as<TClassT>(t)) {
      std::string s = c->cls + " " + go(c->arg, 5);
      wrap(s, prec > 4);
      return s;
    }
    if (as<TEvidence>(t)) return "<evidence>";
    if (auto* m = as<TMeta>(t)) return "?" + std::to_string(m->id);
    if (as<TEvHole>(t)) return "<evidence>";
    return "?";
  }

  std::string top(const TermPtr& t) {
    if (auto n = numeral_term(t); n && *n > 0) return std::to_string(*n);
    return go(t, 0);
  }
};

}  // namespace

std::string print_term(const TermPtr& t, std::vector<std::string> names) {
  TermPrinter p{std::move(names)};
  return p.go(t, 0);
}

std::string print_value(const ValuePtr& v, int depth, EvalCtx& ctx) {
  std::vector<std::string> names;
  for (int i = 0; i < depth; i++) names.push_back("x" + std::to_string(i));
  return print_term(quote(v, depth, ctx), std::move(names));
}

}  // namespace dpq::kernel
