#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dpq/driver/session.hpp"

using namespace dpq;

namespace {

void on_interrupt(int) { circuit::interrupt_flag().store(true); }

driver::Session make_session(const driver::SessionConfig& cfg, int& status) {
  driver::Session session(cfg);
  auto ds = session.init();
  if (!ds.empty()) {
    session.print_diagnostics(ds, std::cerr);
    status = ds.size() == 1 && ds[0].code == Code::IOError ? 2 : 1;
  } else {
    status = 0;
  }
  return session;
}

int exit_code_for(const std::vector<Diagnostic>& ds) {
  if (ds.empty()) return 0;
  for (auto& d : ds)
    if (d.code != Code::IOError) return 1;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);

  CLI::App app{"Proto-Quipper-D toolchain: checker, interpreter, circuit drawing"};
  app.require_subcommand(0, 1);

  driver::SessionConfig cfg;
  app.add_option("--fuel", cfg.fuel, "type-level normalization budget");
  app.add_flag("--ascii", cfg.ascii, "plain ASCII circuit drawings");
  app.add_flag("--json-diagnostics", cfg.json_diagnostics,
               "one machine-readable diagnostic per line");
  bool no_prelude = false;
  app.add_flag("--no-prelude", no_prelude, "do not load the prelude");

  std::string path, expr, format = "text", out_path;

  auto* check = app.add_subcommand("check", "type-check a file");
  check->add_option("file", path)->required();

  auto* run = app.add_subcommand("run", "evaluate a closed expression");
  run->add_option("file", path)->required();
  run->add_option("expr", expr, "expression to evaluate")->required();

  auto* draw = app.add_subcommand("draw", "evaluate to a circuit and render it");
  draw->add_option("file", path)->required();
  draw->add_option("expr", expr, "circuit-valued expression")->required();
  draw->add_option("-f,--format", format, "text or svg")
      ->check(CLI::IsMember({"text", "svg"}));
  draw->add_option("-o,--out", out_path, "output file (default stdout)");

  auto* repl = app.add_subcommand("repl", "interactive shell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.use_prelude = !no_prelude;

  try {
    if (check->parsed()) {
      driver::Session session(cfg);
      auto ds = session.init();
      if (ds.empty()) ds = session.load_file(path);
      session.print_diagnostics(ds, std::cout);
      return exit_code_for(ds);
    }
    if (run->parsed() || draw->parsed()) {
      driver::Session session(cfg);
      auto ds = session.init();
      if (ds.empty()) ds = session.load_file(path);
      if (!ds.empty()) {
        session.print_diagnostics(ds, std::cout);
        return exit_code_for(ds);
      }
      try {
        auto outcome = session.eval_expression(expr, "<arg>");
        if (run->parsed()) {
          std::cout << session.show_value(outcome.value) << "\n";
          return 0;
        }
        auto* c = kernel::vas<kernel::VCircV>(outcome.value);
        if (!c) {
          Diagnostic d{Code::NotACircuit, {1, 1}, "<arg>",
                       "'" + expr + "' does not evaluate to a boxed circuit", {}};
          session.print_diagnostics({d}, std::cout);
          return 1;
        }
        render::Options ropt;
        ropt.ascii = cfg.ascii;
        std::string rendered = format == "svg" ? render::render_svg(*c->circ, ropt)
                                               : render::render_text(*c->circ, ropt);
        if (out_path.empty()) {
          std::cout << rendered;
        } else {
          std::ofstream out(out_path, std::ios::binary);
          if (!out.good()) {
            std::cerr << "IOError: cannot write " << out_path << "\n";
            return 2;
          }
          out << rendered;
        }
        return 0;
      } catch (const CompileError& e) {
        session.print_diagnostics({e.diag()}, std::cout);
        return 1;
      }
    }
    if (repl->parsed() || app.get_subcommands().empty()) {
      int status = 0;
      driver::Session session = make_session(cfg, status);
      if (status != 0) return status;
      return session.repl(std::cin, std::cout);
    }
  } catch (const circuit::IrreversibleGateError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Interrupted&) {
    std::cerr << "interrupted\n";
    return 1;
  } catch (const kernel::FuelExhaustedError& e) {
    std::cerr << "FuelExhausted: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
