#pragma once

#include "dpq/kernel/eval.hpp"

namespace dpq::kernel {

/// The statically determined wire layout of a simple type.
struct WireShape {
  enum class Kind { Leaf, Empty, Node } kind = Kind::Empty;
  Carrier carrier;               // Leaf
  std::vector<WireShape> kids;   // Node

  int leaf_count() const;
  void flatten(std::vector<Carrier>& out) const;
};

class ShapeError : public std::exception {
public:
  enum class Kind { NotConcrete, NotSimple };
  ShapeError(Kind k, ValuePtr type) : kind(k), type(std::move(type)) {}
  Kind kind;
  ValuePtr type;
  const char* what() const noexcept override {
    return kind == Kind::NotConcrete ? "type is not concrete" : "type is not simple";
  }
};

/// Walks a fully concrete simple type down to its wire leaves. Objects are
/// leaves, Unit is empty, tensors pair up, and simple-family applications
/// unfold through the clause selected by the concrete index.
WireShape shape_of_simple_type(const ValuePtr& type, EvalCtx& ctx);

/// The unique clause of a simple family matching a concrete index value,
/// with the clause's field types instantiated. Null if the index is neutral.
struct ClauseMatch {
  const FamilyClause* clause;
  std::vector<ValuePtr> fieldTypes;
  std::vector<ValuePtr> binder_values;  // [params..., index pattern variables...]
};
std::optional<ClauseMatch> match_family_clause(const TyConInfo& fam,
                                               const std::vector<ValuePtr>& args,
                                               EvalCtx& ctx);

}  // namespace dpq::kernel
