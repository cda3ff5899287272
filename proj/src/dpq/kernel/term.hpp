#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dpq/common.hpp"

namespace dpq::kernel {

// Elaborated core syntax. Terms and types share the tree; binders are
// de Bruijn indices, so alpha-equivalent terms are representationally equal.

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class PiFlavor { Expl, Irrel, Impl, Inst };
enum class AppFlavor { Expl, Irrel, Impl, Inst, ForceFrame };

struct TVar { int index = 0; };
struct TGlobal { std::string name; };
struct TLam {
  std::string hint;
  TermPtr body;
};
struct TApp {
  TermPtr fn, arg;
  AppFlavor flavor = AppFlavor::Expl;
};
struct TPi {
  std::string hint;
  TermPtr dom, cod;
  PiFlavor flavor = PiFlavor::Expl;
};
struct TBang { TermPtr inner; };
struct TLift { TermPtr inner; };
struct TForce { TermPtr inner; };
struct TTensor { TermPtr lhs, rhs; };
struct TUnitT {};
struct TUnitV {};
struct TPair { TermPtr fst, snd; };
struct TExists {
  std::string hint;
  TermPtr dom, cod;
};
struct TCirc { TermPtr in, out; };
struct TType {};
struct TBranch {
  std::string ctor;
  std::vector<std::string> binders;  // one per constructor argument, irrelevant ones included
  TermPtr body;
};
struct TCase {
  TermPtr scrut;
  std::vector<TBranch> branches;
};
struct TLet {
  std::string hint;
  TermPtr bound, body;
};
struct TLetPair {
  std::string hint1, hint2;
  TermPtr bound, body;
};
struct TClassT {
  std::string cls;
  TermPtr arg;
};
struct TEvidence {  // token evidence for the built-in Simple/Parameter classes
  std::string cls;
  TermPtr arg;
};
struct TMeta { int id = 0; };
struct TEvHole { int id = 0; };  // patched with resolved evidence before commit

struct Term {
  std::variant<TVar, TGlobal, TLam, TApp, TPi, TBang, TLift, TForce, TTensor, TUnitT,
               TUnitV, TPair, TExists, TCirc, TType, TCase, TLet, TLetPair, TClassT,
               TEvidence, TMeta, TEvHole>
      v;
};

template <class T, class... Args>
TermPtr mk(Args&&... args) {
  return std::make_shared<Term>(Term{T{std::forward<Args>(args)...}});
}

template <class T>
const T* as(const TermPtr& t) {
  return std::get_if<T>(&t->v);
}

}  // namespace dpq::kernel
