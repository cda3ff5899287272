#include "dpq/circuit/runtime.hpp"

namespace dpq::circuit {

using namespace dpq::kernel;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

Runtime::Runtime(const GlobalTable& globals) : globals_(globals) {
  stack_.push_back({});
}

void Runtime::tick() {
  if (interrupt_flag().exchange(false)) throw Interrupted();
}

Wire Runtime::fresh_wire(const Carrier& c) {
  Builder& b = stack_.back();
  return {b.next_wire++, c};
}

ValuePtr Runtime::evaluate(const TermPtr& t) {
  auto ctx = ectx();
  Env empty;
  return eval(t, empty, ctx);
}

ValuePtr Runtime::apply_value(const ValuePtr& f, const ValuePtr& a) {
  auto ctx = ectx();
  return apply(f, a, AppFlavor::Expl, ctx);
}

ValuePtr Runtime::force_value(const ValuePtr& v) {
  auto ctx = ectx();
  return force(v, ctx);
}

ValuePtr Runtime::fresh_value_of_type(const ValuePtr& type) {
  auto ctx = ectx();
  if (vas<VUnitT>(type)) return vmk<VUnitV>();
  if (auto* t = vas<VTensor>(type))
    return vmk<VPair>(fresh_value_of_type(t->lhs), fresh_value_of_type(t->rhs));
  if (auto* d = vas<VData>(type)) {
    const TyConInfo* tc = globals_.tycon(d->name);
    if (tc && tc->sort == TyConInfo::Sort::Object) {
      Wire w = fresh_wire(d->name);
      return vmk<VWire>(w.id, w.carrier);
    }
    if (tc && tc->sort == TyConInfo::Sort::Simple) {
      auto m = match_family_clause(*tc, d->args, ctx);
      if (!m)
        throw InternalError("boxing at a non-concrete simple type " + d->name);
      std::vector<ValuePtr> args = m->binder_values;
      for (auto& ft : m->fieldTypes) args.push_back(fresh_value_of_type(ft));
      return vmk<VCon>(m->clause->ctorName, std::move(args));
    }
  }
  throw InternalError("boxing at a type that is not simple");
}

ValuePtr Runtime::apply_gate(const GateInfo& g, const std::vector<ValuePtr>& args) {
  tick();
  GateInstance inst;
  inst.gate = globals_.gate(g.name);
  for (int i = 0; i < g.param_count; i++) {
    auto n = numeral_of(args[(size_t)i]);
    if (!n) throw InternalError("gate parameter of " + g.name + " is not a closed numeral");
    inst.params.push_back(*n);
  }
  for (size_t i = (size_t)g.param_count; i < args.size(); i++)
    flatten_wires(args[i], inst.ins);
  if (inst.ins.size() != g.in_carriers.size())
    throw InternalError("gate " + g.name + " applied to the wrong number of wires");
  ValuePtr out = fresh_value_of_type(g.result_type);
  flatten_wires(out, inst.outs);
  stack_.back().gates.push_back(std::move(inst));
  return out;
}

ValuePtr Runtime::apply_builtin(Builtin b, const std::string& aux,
                                const std::vector<ValuePtr>& args) {
  tick();
  (void)aux;
  switch (b) {
    case Builtin::Box: {
      // args: a b evS evS f
      const ValuePtr& shape_type = args[0];
      const ValuePtr& f = args[4];
      stack_.push_back({});
      auto circ = std::make_shared<Circuit>();
      try {
        circ->input_template = fresh_value_of_type(shape_type);
        flatten_wires(circ->input_template, circ->inputs);
        ValuePtr fn = force_value(f);
        circ->output_template = apply_value(fn, circ->input_template);
        flatten_wires(circ->output_template, circ->outputs);
      } catch (...) {
        stack_.pop_back();
        throw;
      }
      circ->gates = std::move(stack_.back().gates);
      stack_.pop_back();
      return vmk<VCircV>(circ);
    }
    case Builtin::Unbox: {
      const ValuePtr& circ = args[4];
      VLift out;
      out.direct = vmk<VNative>(Builtin::UnboxApply, std::string{},
                                std::vector<ValuePtr>{circ});
      return std::make_shared<Value>(Value{std::move(out)});
    }
    case Builtin::UnboxApply: {
      auto* cv = vas<VCircV>(args[0]);
      if (!cv) throw InternalError("unbox applied to a non-circuit value");
      const Circuit& c = *cv->circ;
      std::vector<Wire> given;
      flatten_wires(args[1], given);
      if (given.size() != c.inputs.size())
        throw InternalError("unboxed circuit applied to a mismatched wire bundle");
      std::vector<std::pair<uint32_t, Wire>> mapping;
      for (size_t i = 0; i < given.size(); i++) mapping.push_back({c.inputs[i].id, given[i]});
      for (auto& g : c.gates) {
        GateInstance inst;
        inst.gate = g.gate;
        inst.params = g.params;
        for (auto& w : g.ins) {
          bool found = false;
          for (auto& [from, to] : mapping)
            if (from == w.id) {
              inst.ins.push_back(to);
              found = true;
              break;
            }
          if (!found) throw InternalError("unbox splice lost a wire");
        }
        for (auto& w : g.outs) {
          Wire fresh = fresh_wire(w.carrier);
          mapping.push_back({w.id, fresh});
          inst.outs.push_back(fresh);
        }
        stack_.back().gates.push_back(std::move(inst));
      }
      return rename_wires(c.output_template, mapping);
    }
    case Builtin::Reverse: {
      auto* cv = vas<VCircV>(args[4]);
      if (!cv) throw InternalError("reverse applied to a non-circuit value");
      auto out = std::make_shared<Circuit>(reverse_circuit(*cv->circ, globals_));
      return vmk<VCircV>(out);
    }
    case Builtin::ExistsBox: {
      // args: a b evS evP p f
      const ValuePtr& shape_type = args[0];
      const ValuePtr& f = args[5];
      stack_.push_back({});
      auto circ = std::make_shared<Circuit>();
      ValuePtr witness;
      try {
        circ->input_template = fresh_value_of_type(shape_type);
        flatten_wires(circ->input_template, circ->inputs);
        ValuePtr fn = force_value(f);
        ValuePtr res = apply_value(fn, circ->input_template);
        auto* pair = vas<VPair>(res);
        if (!pair) throw InternalError("existsBox body did not produce a pair");
        witness = pair->fst;
        circ->output_template = pair->snd;
        flatten_wires(circ->output_template, circ->outputs);
      } catch (...) {
        stack_.pop_back();
        throw;
      }
      circ->gates = std::move(stack_.back().gates);
      stack_.pop_back();
      // the second component awaits Simple evidence for the concrete witness
      ValuePtr guarded = vmk<VNative>(Builtin::KConst, std::string{},
                                      std::vector<ValuePtr>{vmk<VCircV>(circ)});
      return vmk<VPair>(witness, guarded);
    }
    case Builtin::KConst:
    case Builtin::Method:
      throw InternalError("builtin dispatched through the wrong path");
  }
  throw InternalError("unhandled builtin");
}

}  // namespace dpq::circuit
