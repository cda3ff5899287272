#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpq/kernel/globals.hpp"

namespace dpq::circuit {

using kernel::Carrier;

struct Wire {
  uint32_t id = 0;
  Carrier carrier;
  bool operator==(const Wire& o) const { return id == o.id && carrier == o.carrier; }
};

struct GateInstance {
  const GateInfo* gate = nullptr;
  std::vector<uint64_t> params;
  std::vector<Wire> ins, outs;
};

/// An immutable completed circuit. Interface templates are the values built
/// at boxing time, with VWire leaves; the flat lists mirror their leaf order.
struct Circuit {
  kernel::ValuePtr input_template, output_template;
  std::vector<Wire> inputs, outputs;
  std::vector<GateInstance> gates;
};

class IrreversibleGateError : public std::exception {
public:
  explicit IrreversibleGateError(std::string gate) : gate(std::move(gate)) {
    msg_ = "IrreversibleGate: gate '" + this->gate + "' has no adjoint";
  }
  std::string gate;
  const char* what() const noexcept override { return msg_.c_str(); }

private:
  std::string msg_;
};

/// Deterministic text form, one gate per line "NAME(params) ins -> outs",
/// with wires renumbered canonically. Equal outputs mean equal circuits
/// modulo wire renaming.
std::string serialize(const Circuit& c);

/// Reverses a circuit gate-for-gate through the adjoint table.
/// Throws IrreversibleGateError when a gate has no adjoint.
Circuit reverse_circuit(const Circuit& c, const kernel::GlobalTable& globals);

/// Checks dataflow closure: every gate input is a live wire, wire ids are
/// produced and consumed exactly once, and nothing dangles.
/// Throws InternalError on violation.
void validate(const Circuit& c);

/// Collects the VWire leaves of a runtime value, left to right.
void flatten_wires(const kernel::ValuePtr& v, std::vector<Wire>& out);

/// Rebuilds a runtime value with wire ids substituted.
kernel::ValuePtr rename_wires(const kernel::ValuePtr& v,
                              const std::vector<std::pair<uint32_t, Wire>>& mapping);

}  // namespace dpq::circuit
