#pragma once

#include <atomic>

#include "dpq/circuit/circuit.hpp"
#include "dpq/kernel/eval.hpp"
#include "dpq/kernel/shape.hpp"

namespace dpq::circuit {

/// Set by the driver's signal handler; evaluation checks it between steps.
std::atomic<bool>& interrupt_flag();

/// Call-by-value evaluator session with a builder stack. box and existsBox
/// push a fresh builder; gate applications target the top. Gates applied
/// with no boxing in progress land in the implicit toplevel builder, which
/// the driver discards with a warning.
class Runtime : public kernel::RuntimeHooks {
public:
  explicit Runtime(const kernel::GlobalTable& globals);

  kernel::ValuePtr evaluate(const kernel::TermPtr& t);
  kernel::ValuePtr apply_value(const kernel::ValuePtr& f, const kernel::ValuePtr& a);
  kernel::ValuePtr force_value(const kernel::ValuePtr& v);

  /// Gates appended outside any box since the last reset.
  size_t toplevel_gates() const { return stack_.front().gates.size(); }
  void reset_toplevel() { stack_.front() = {}; }

  kernel::ValuePtr apply_gate(const GateInfo& g,
                              const std::vector<kernel::ValuePtr>& args) override;
  kernel::ValuePtr apply_builtin(kernel::Builtin b, const std::string& aux,
                                 const std::vector<kernel::ValuePtr>& args) override;
  void tick() override;

private:
  struct Builder {
    uint32_t next_wire = 0;
    std::vector<GateInstance> gates;
  };

  kernel::EvalCtx ectx() { return kernel::EvalCtx{globals_, nullptr, nullptr, this}; }
  Wire fresh_wire(const Carrier& c);
  kernel::ValuePtr fresh_value_of_type(const kernel::ValuePtr& type);

  const kernel::GlobalTable& globals_;
  std::vector<Builder> stack_;
};

}  // namespace dpq::circuit
