#pragma once

#include <map>
#include <optional>

#include "dpq/kernel/term.hpp"

namespace dpq::circuit {
struct Circuit;
struct GateInfo;
}  // namespace dpq::circuit

namespace dpq::kernel {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

/// Persistent evaluation environment, indexed by de Bruijn index.
class Env {
  struct Node {
    ValuePtr v;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
  int size_ = 0;

public:
  Env() = default;
  Env push(ValuePtr v) const {
    Env e;
    e.head_ = std::make_shared<Node>(Node{std::move(v), head_});
    e.size_ = size_ + 1;
    return e;
  }
  const ValuePtr& get(int index) const {
    const Node* n = head_.get();
    while (index-- > 0 && n) n = n->next.get();
    if (!n) throw InternalError("environment index out of range");
    return n->v;
  }
  int size() const { return size_; }
};

struct Closure {
  Env env;
  TermPtr body;  // one binder
};
struct Closure0 {
  Env env;
  TermPtr term;
};

struct SpineEntry {
  ValuePtr v;  // null for ForceFrame
  AppFlavor flavor = AppFlavor::Expl;
};

struct HVar { int level = 0; };
struct HMeta { int id = 0; };
struct HGlobal { std::string name; };
struct HCase {  // a case stuck on a neutral scrutinee
  ValuePtr scrut;
  TermPtr caseTerm;  // the TCase node, for its branches
  Env env;
};
struct HLetPair {
  ValuePtr bound;
  TermPtr letTerm;
  Env env;
};
using NeutralHead = std::variant<HVar, HMeta, HGlobal, HCase, HLetPair>;

struct VNeutral {
  NeutralHead head;
  std::vector<SpineEntry> spine;
};
struct VCon {
  std::string name;
  std::vector<ValuePtr> args;
};
struct VData {  // object / data / simple-family head applied to arguments
  std::string name;
  std::vector<ValuePtr> args;
};
struct VLam {
  std::string hint;
  Closure clo;
};
struct VPi {
  std::string hint;
  ValuePtr dom;
  Closure cod;
  PiFlavor flavor;
};
struct VBang { ValuePtr inner; };
struct VLift {
  Closure0 thunk;
  ValuePtr direct;  // set instead of thunk for builtin-produced lifts
};
struct VTensor { ValuePtr lhs, rhs; };
struct VUnitT {};
struct VUnitV {};
struct VPair { ValuePtr fst, snd; };
struct VExists {
  std::string hint;
  ValuePtr dom;
  Closure cod;
};
struct VCirc { ValuePtr in, out; };
struct VType {};
struct VClassT {
  std::string cls;
  ValuePtr arg;
};
struct VEvToken {};

// runtime values
using Carrier = std::string;  // object name; "Bit" renders classically
struct VWire {
  uint32_t id;
  Carrier carrier;
};
struct VCircV { std::shared_ptr<const circuit::Circuit> circ; };
struct VGate {
  const circuit::GateInfo* info;
  std::vector<ValuePtr> args;
};
enum class Builtin { Box, Unbox, UnboxApply, Reverse, ExistsBox, KConst, Method };
struct VNative {
  Builtin id;
  std::string aux;  // method name for Builtin::Method
  std::vector<ValuePtr> args;
};
struct VDict {
  std::string cls;
  std::shared_ptr<const std::map<std::string, ValuePtr>> methods;
};

struct Value {
  std::variant<VNeutral, VCon, VData, VLam, VPi, VBang, VLift, VTensor, VUnitT, VUnitV,
               VPair, VExists, VCirc, VType, VClassT, VEvToken, VWire, VCircV, VGate,
               VNative, VDict>
      v;
};

template <class T, class... Args>
ValuePtr vmk(Args&&... args) {
  return std::make_shared<Value>(Value{T{std::forward<Args>(args)...}});
}

template <class T>
const T* vas(const ValuePtr& t) {
  return std::get_if<T>(&t->v);
}

inline ValuePtr fresh_var(int level) {
  return vmk<VNeutral>(NeutralHead{HVar{level}}, std::vector<SpineEntry>{});
}

}  // namespace dpq::kernel
