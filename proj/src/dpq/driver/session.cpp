#include "dpq/driver/session.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "dpq/surface/desugar.hpp"
#include "dpq/surface/parser.hpp"

namespace dpq::driver {

using namespace dpq::kernel;

std::string resolve_prelude_path(const SessionConfig& cfg) {
  if (!cfg.prelude_path.empty()) return cfg.prelude_path;
  if (const char* env = std::getenv("PQD_PRELUDE")) return env;
  std::ifstream local("prelude/prelude.dpq");
  if (local.good()) return "prelude/prelude.dpq";
#ifdef DPQ_SOURCE_DIR
  return std::string(DPQ_SOURCE_DIR) + "/prelude/prelude.dpq";
#else
  return "prelude/prelude.dpq";
#endif
}

Session::Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
  checker::Elaborator::install_builtins(globals_);
  runtime_ = std::make_unique<circuit::Runtime>(globals_);
}

std::vector<Diagnostic> Session::init() {
  if (!cfg_.use_prelude) return {};
  return load_file(resolve_prelude_path(cfg_));
}

std::vector<Diagnostic> Session::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    return {{Code::IOError, {0, 0}, path, "cannot open file", {}}};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_source(buf.str(), path);
}

std::vector<Diagnostic> Session::load_source(const std::string& source,
                                             const std::string& name) {
  surface::Module mod;
  try {
    mod = surface::desugar(surface::parse_module(surface::tokenize(source)));
  } catch (const CompileError& e) {
    Diagnostic d = e.diag();
    d.file = name;
    return {d};
  }
  // check into a copy; commit only when clean
  GlobalTable copy = globals_;
  checker::ElabConfig cfg;
  cfg.fuel = cfg_.fuel;
  cfg.file = name;
  checker::Elaborator el(copy, cfg);
  std::vector<Diagnostic> diags = el.check_module(mod);
  for (auto& d : diags)
    if (d.file.empty()) d.file = name;
  if (diags.empty()) {
    globals_ = std::move(copy);
    runtime_ = std::make_unique<circuit::Runtime>(globals_);
  }
  return diags;
}

Session::Outcome Session::eval_expression(const std::string& text, const std::string& what) {
  checker::ElabConfig cfg;
  cfg.fuel = cfg_.fuel;
  cfg.file = what;
  checker::Elaborator el(globals_, cfg);
  auto expr = surface::parse_expression(surface::tokenize(text));
  auto r = el.infer_expression(expr);
  ValuePtr v = runtime_->evaluate(r.term);
  return {v, r.type};
}

ValuePtr Session::type_of_expression(const std::string& text, const std::string& what) {
  checker::ElabConfig cfg;
  cfg.fuel = cfg_.fuel;
  cfg.file = what;
  checker::Elaborator el(globals_, cfg);
  auto expr = surface::parse_expression(surface::tokenize(text));
  return el.infer_expression(expr).type;
}

std::string Session::show_type(const ValuePtr& t) {
  EvalCtx ctx{globals_, nullptr, nullptr, nullptr};
  long fuel = cfg_.fuel;
  ctx.fuel = &fuel;
  return print_term(quote(t, 0, ctx));
}

std::string Session::show_value(const ValuePtr& v) {
  if (auto n = numeral_of(v)) return std::to_string(*n);
  if (auto* c = vas<VCircV>(v)) {
    const circuit::Circuit& circ = *c->circ;
    return "Circ(ins=" + std::to_string(circ.inputs.size()) +
           ", gates=" + std::to_string(circ.gates.size()) +
           ", outs=" + std::to_string(circ.outputs.size()) + ")";
  }
  if (vas<VUnitV>(v)) return "()";
  if (auto* p = vas<VPair>(v))
    return "(" + show_value(p->fst) + ", " + show_value(p->snd) + ")";
  if (auto* c = vas<VCon>(v)) {
    std::string s = c->name;
    const GlobalEntry* g = globals_.find(c->name);
    size_t skip = g ? (size_t)g->ctor.n_irrelevant : 0;
    for (size_t i = skip; i < c->args.size(); i++) {
      std::string arg = show_value(c->args[i]);
      if (arg.find(' ') != std::string::npos) arg = "(" + arg + ")";
      s += " " + arg;
    }
    return s;
  }
  if (auto* w = vas<VWire>(v))
    return "<wire " + std::to_string(w->id) + ":" + w->carrier + ">";
  if (vas<VLift>(v) || vas<VLam>(v) || vas<VNative>(v) || vas<VGate>(v))
    return "<function>";
  if (vas<VDict>(v)) return "<instance dictionary>";
  if (vas<VEvToken>(v)) return "<evidence>";
  // fall back to the type printer for type-like values
  EvalCtx ctx{globals_, nullptr, nullptr, nullptr};
  long fuel = cfg_.fuel;
  ctx.fuel = &fuel;
  try {
    return print_term(quote(v, 0, ctx));
  } catch (...) {
    return "<value>";
  }
}

void Session::print_diagnostics(const std::vector<Diagnostic>& ds, std::ostream& out) {
  for (auto& d : ds) {
    if (cfg_.json_diagnostics) {
      nlohmann::json j{{"code", code_name(d.code)},
                       {"file", d.file},
                       {"line", d.span.line},
                       {"col", d.span.col},
                       {"message", d.message}};
      out << j.dump() << "\n";
    } else {
      out << d.to_string() << "\n";
    }
  }
}

int Session::repl(std::istream& in, std::ostream& out) {
  out << "Proto-Quipper-D interactive shell. Commands: :t EXPR, :d EXPR, :l PATH, :q\n";
  std::string line;
  for (;;) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) return 0;
    size_t ws = line.find_first_not_of(" \t");
    if (ws == std::string::npos) continue;
    line = line.substr(ws);
    try {
      if (line == ":q") return 0;
      if (line.rfind(":l ", 0) == 0) {
        std::string path = line.substr(3);
        auto ds = load_file(path);
        if (ds.empty())
          out << "loaded " << path << "\n";
        else
          print_diagnostics(ds, out);
        continue;
      }
      if (line.rfind(":t ", 0) == 0) {
        ValuePtr t = type_of_expression(line.substr(3), "<repl>");
        out << show_type(t) << "\n";
        continue;
      }
      if (line.rfind(":d ", 0) == 0) {
        Outcome o = eval_expression(line.substr(3), "<repl>");
        auto* c = vas<VCircV>(o.value);
        if (!c) {
          Diagnostic d{Code::NotACircuit, {1, 1}, "<repl>",
                       "expression does not evaluate to a boxed circuit", {}};
          print_diagnostics({d}, out);
          continue;
        }
        render::Options ropt;
        ropt.ascii = cfg_.ascii;
        out << render::render_text(*c->circ, ropt);
        continue;
      }
      if (line[0] == ':') {
        out << "unknown command " << line << "\n";
        continue;
      }
      Outcome o = eval_expression(line, "<repl>");
      out << show_value(o.value) << " : " << show_type(o.type) << "\n";
      if (runtime_->toplevel_gates() > 0) {
        out << "warning: " << runtime_->toplevel_gates()
            << " gate(s) were applied outside any box and will be discarded\n";
        runtime_->reset_toplevel();
      }
    } catch (const CompileError& e) {
      print_diagnostics({e.diag()}, out);
    } catch (const circuit::IrreversibleGateError& e) {
      out << e.what() << "\n";
    } catch (const Interrupted&) {
      out << "interrupted\n";
      runtime_->reset_toplevel();
    } catch (const FuelExhaustedError& e) {
      out << "FuelExhausted: " << e.what() << "\n";
    }
  }
}

}  // namespace dpq::driver
