#pragma once

#include <map>
#include <optional>
#include <unordered_map>

#include "dpq/kernel/value.hpp"

namespace dpq::circuit {

struct GateInfo {
  std::string name;
  int param_count = 0;  // leading parameter arguments (e.g. the k of R k)
  std::vector<kernel::ValuePtr> arg_types;
  kernel::ValuePtr result_type;
  std::vector<kernel::Carrier> in_carriers, out_carriers;
  std::optional<std::string> adjoint;
  std::string style = "box";
  int controls = 0;
  bool reversible() const { return adjoint.has_value(); }
};

}  // namespace dpq::circuit

namespace dpq::kernel {

enum class GlobalKind { Def, Ctor, TyCon, Gate, Builtin, Method };

struct CtorInfo {
  std::string name;
  std::string owner;   // owning data type or simple family
  TermPtr type;        // closed constructor type
  int n_irrelevant = 0;
  int n_fields = 0;
  int arity() const { return n_irrelevant + n_fields; }
};

struct FamilyClause {
  std::string indexCtor;               // head of the index pattern
  std::vector<std::string> indexVars;  // its variable fields
  std::string ctorName;                // the clause's unique constructor
  // field types elaborated under binders [params..., indexVars...]
  std::vector<TermPtr> fieldTypes;
};

struct TyConInfo {
  enum class Sort { Object, Data, Simple };
  Sort sort = Sort::Data;
  std::string name;
  int n_params = 0;
  TermPtr kind;  // e.g. Type -> Nat -> Type
  std::vector<std::string> ctors;
  std::vector<FamilyClause> clauses;  // Simple only
};

struct ClassInfo {
  std::string name;
  std::string param;
  TermPtr paramKind;  // kind of the class parameter
  // method name -> signature with the class parameter as de Bruijn index 0
  std::vector<std::pair<std::string, TermPtr>> methods;
  bool builtin = false;
};

struct InstanceRule {
  std::string cls;
  std::string head;  // type constructor name
  // premises: (class, argument position of the head application)
  std::vector<std::pair<std::string, int>> premises;
  // user instances carry their method table; derived rules leave it null
  std::shared_ptr<const std::map<std::string, ValuePtr>> methods;
  Span span;
};

struct GlobalEntry {
  GlobalKind kind;
  std::string name;
  TermPtr type;  // closed
  TermPtr body;  // Def only
  CtorInfo ctor;
  Builtin builtin = Builtin::Box;
  std::string methodClass;  // Method only

  mutable ValuePtr type_value;     // memoized evaluation of `type`
  mutable ValuePtr whnf_value;     // memoized type-mode value of the definition
  mutable ValuePtr runtime_value;  // memoized runtime value of the definition
};

class GlobalTable {
public:
  std::unordered_map<std::string, GlobalEntry> entries;
  std::unordered_map<std::string, TyConInfo> tycons;
  std::unordered_map<std::string, circuit::GateInfo> gates;
  std::unordered_map<std::string, ClassInfo> classes;
  std::map<std::pair<std::string, std::string>, InstanceRule> instances;

  const GlobalEntry* find(const std::string& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }
  const TyConInfo* tycon(const std::string& name) const {
    auto it = tycons.find(name);
    return it == tycons.end() ? nullptr : &it->second;
  }
  const circuit::GateInfo* gate(const std::string& name) const {
    auto it = gates.find(name);
    return it == gates.end() ? nullptr : &it->second;
  }
  const ClassInfo* cls(const std::string& name) const {
    auto it = classes.find(name);
    return it == classes.end() ? nullptr : &it->second;
  }
  const InstanceRule* instance(const std::string& c, const std::string& head) const {
    auto it = instances.find({c, head});
    return it == instances.end() ? nullptr : &it->second;
  }
  bool defined(const std::string& name) const { return entries.count(name) != 0; }
};

struct MetaEntry {
  ValuePtr type;      // may be null when unknown
  ValuePtr solution;  // null while unsolved
  int depth = 0;      // context depth at creation; solutions may not escape it
  Span span;
};

struct MetaCtx {
  std::vector<MetaEntry> entries;

  int fresh(ValuePtr type, int depth, Span span) {
    entries.push_back({std::move(type), nullptr, depth, span});
    return (int)entries.size() - 1;
  }
  bool is_solved(int id) const { return entries[id].solution != nullptr; }
  const ValuePtr& solution(int id) const { return entries[id].solution; }
  void solve(int id, ValuePtr v) { entries[id].solution = std::move(v); }
};

/// Raised by type-level normalization when the unfolding budget runs out.
class FuelExhaustedError : public std::exception {
public:
  const char* what() const noexcept override {
    return "type-level normalization exceeded its fuel budget";
  }
};

}  // namespace dpq::kernel
