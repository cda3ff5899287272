#include "dpq/kernel/shape.hpp"

namespace dpq::kernel {

int WireShape::leaf_count() const {
  switch (kind) {
    case Kind::Leaf: return 1;
    case Kind::Empty: return 0;
    case Kind::Node: {
      int n = 0;
      for (auto& k : kids) n += k.leaf_count();
      return n;
    }
  }
  return 0;
}

void WireShape::flatten(std::vector<Carrier>& out) const {
  switch (kind) {
    case Kind::Leaf: out.push_back(carrier); break;
    case Kind::Empty: break;
    case Kind::Node:
      for (auto& k : kids) k.flatten(out);
      break;
  }
}

std::optional<ClauseMatch> match_family_clause(const TyConInfo& fam,
                                               const std::vector<ValuePtr>& args,
                                               EvalCtx& ctx) {
  if ((int)args.size() != fam.n_params + 1)
    throw InternalError("family " + fam.name + " applied to wrong argument count");
  ValuePtr index = zonk_head(args.back(), ctx);
  auto* con = vas<VCon>(index);
  if (!con) return std::nullopt;
  for (auto& cl : fam.clauses) {
    if (cl.indexCtor != con->name) continue;
    // bind [params..., indexVars...]; index pattern variables map to the
    // constructor's explicit fields (after any irrelevant arguments)
    Env env;
    for (int i = 0; i < fam.n_params; i++) env = env.push(args[i]);
    const GlobalEntry* ic = ctx.globals.find(con->name);
    int skip = ic ? ic->ctor.n_irrelevant : 0;
    if ((int)con->args.size() != skip + (int)cl.indexVars.size())
      throw InternalError("index constructor arity mismatch in " + fam.name);
    ClauseMatch m{&cl, {}, {}};
    for (int i = 0; i < fam.n_params; i++) m.binder_values.push_back(args[i]);
    for (size_t i = 0; i < cl.indexVars.size(); i++) {
      env = env.push(con->args[skip + i]);
      m.binder_values.push_back(con->args[skip + i]);
    }
    for (auto& ft : cl.fieldTypes) m.fieldTypes.push_back(eval(ft, env, ctx));
    return m;
  }
  return std::nullopt;
}

WireShape shape_of_simple_type(const ValuePtr& type, EvalCtx& ctx) {
  ValuePtr t = zonk_head(type, ctx);
  if (vas<VUnitT>(t)) return {WireShape::Kind::Empty, "", {}};
  if (auto* x = vas<VTensor>(t)) {
    WireShape out{WireShape::Kind::Node, "", {}};
    out.kids.push_back(shape_of_simple_type(x->lhs, ctx));
    out.kids.push_back(shape_of_simple_type(x->rhs, ctx));
    return out;
  }
  if (auto* d = vas<VData>(t)) {
    const TyConInfo* tc = ctx.globals.tycon(d->name);
    if (!tc) throw ShapeError(ShapeError::Kind::NotSimple, t);
    if (tc->sort == TyConInfo::Sort::Object)
      return {WireShape::Kind::Leaf, d->name, {}};
    if (tc->sort == TyConInfo::Sort::Simple) {
      auto m = match_family_clause(*tc, d->args, ctx);
      if (!m) throw ShapeError(ShapeError::Kind::NotConcrete, t);
      WireShape out{WireShape::Kind::Node, "", {}};
      for (auto& ft : m->fieldTypes) out.kids.push_back(shape_of_simple_type(ft, ctx));
      if (out.kids.empty()) out.kind = WireShape::Kind::Empty;
      return out;
    }
    throw ShapeError(ShapeError::Kind::NotSimple, t);
  }
  if (vas<VNeutral>(t)) throw ShapeError(ShapeError::Kind::NotConcrete, t);
  throw ShapeError(ShapeError::Kind::NotSimple, t);
}

}  // namespace dpq::kernel
