#include "dpq/circuit/circuit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace dpq::circuit {

using namespace dpq::kernel;

void flatten_wires(const ValuePtr& v, std::vector<Wire>& out) {
  if (auto* w = vas<VWire>(v)) {
    out.push_back({w->id, w->carrier});
    return;
  }
  if (auto* p = vas<VPair>(v)) {
    flatten_wires(p->fst, out);
    flatten_wires(p->snd, out);
    return;
  }
  if (auto* c = vas<VCon>(v)) {
    for (auto& a : c->args) flatten_wires(a, out);
    return;
  }
  // units, type arguments, numerals: no wires
}

ValuePtr rename_wires(const ValuePtr& v,
                      const std::vector<std::pair<uint32_t, Wire>>& mapping) {
  if (auto* w = vas<VWire>(v)) {
    for (auto& [from, to] : mapping)
      if (from == w->id) return vmk<VWire>(to.id, to.carrier);
    throw InternalError("wire renaming is missing an entry");
  }
  if (auto* p = vas<VPair>(v))
    return vmk<VPair>(rename_wires(p->fst, mapping), rename_wires(p->snd, mapping));
  if (auto* c = vas<VCon>(v)) {
    std::vector<ValuePtr> args;
    args.reserve(c->args.size());
    for (auto& a : c->args) args.push_back(rename_wires(a, mapping));
    return vmk<VCon>(c->name, std::move(args));
  }
  return v;
}

std::string serialize(const Circuit& c) {
  std::map<uint32_t, int> canon;
  auto name_of = [&](const Wire& w) {
    auto it = canon.find(w.id);
    int n;
    if (it == canon.end()) {
      n = (int)canon.size();
      canon[w.id] = n;
    } else {
      n = it->second;
    }
    return "w" + std::to_string(n);
  };
  std::ostringstream out;
  out << "inputs:";
  for (auto& w : c.inputs) out << " " << name_of(w) << ":" << w.carrier;
  out << "\n";
  for (auto& g : c.gates) {
    out << g.gate->name << "(";
    for (size_t i = 0; i < g.params.size(); i++) {
      if (i) out << ",";
      out << g.params[i];
    }
    out << ")";
    for (auto& w : g.ins) out << " " << name_of(w);
    out << " ->";
    for (auto& w : g.outs) out << " " << name_of(w);
    out << "\n";
  }
  out << "outputs:";
  for (auto& w : c.outputs) out << " " << name_of(w) << ":" << w.carrier;
  out << "\n";
  return out.str();
}

Circuit reverse_circuit(const Circuit& c, const GlobalTable& globals) {
  Circuit out;
  out.input_template = c.output_template;
  out.inputs = c.outputs;
  out.output_template = c.input_template;
  out.outputs = c.inputs;
  out.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    if (!it->gate->adjoint) throw IrreversibleGateError(it->gate->name);
    const GateInfo* adj = globals.gate(*it->gate->adjoint);
    if (!adj) throw IrreversibleGateError(it->gate->name);
    GateInstance g;
    g.gate = adj;
    g.params = it->params;
    g.ins = it->outs;
    g.outs = it->ins;
    out.gates.push_back(std::move(g));
  }
  return out;
}

void validate(const Circuit& c) {
  std::set<uint32_t> live, seen;
  for (auto& w : c.inputs) {
    if (!seen.insert(w.id).second)
      throw InternalError("duplicate input wire id " + std::to_string(w.id));
    live.insert(w.id);
  }
  for (auto& g : c.gates) {
    for (auto& w : g.ins) {
      if (!live.erase(w.id))
        throw InternalError("gate " + g.gate->name + " consumes a dead wire " +
                            std::to_string(w.id));
    }
    for (auto& w : g.outs) {
      if (!seen.insert(w.id).second)
        throw InternalError("wire id " + std::to_string(w.id) + " produced twice");
      live.insert(w.id);
    }
  }
  for (auto& w : c.outputs) {
    if (!live.erase(w.id))
      throw InternalError("circuit output " + std::to_string(w.id) +
                          " is not a live wire");
  }
  if (!live.empty()) throw InternalError("circuit leaves dangling wires");
}

}  // namespace dpq::circuit
