#pragma once

#include <iosfwd>
#include <optional>

#include "dpq/checker/elaborate.hpp"
#include "dpq/circuit/runtime.hpp"
#include "dpq/render/render.hpp"

namespace dpq::driver {

struct SessionConfig {
  long fuel = 100000;
  bool use_prelude = true;
  std::string prelude_path;  // empty: resolve via PQD_PRELUDE or defaults
  bool json_diagnostics = false;
  bool ascii = false;
};

/// Resolves the prelude source path from the config, the PQD_PRELUDE
/// environment variable, the working directory, or the build tree.
std::string resolve_prelude_path(const SessionConfig& cfg);

class Session {
public:
  explicit Session(SessionConfig cfg);

  /// Loads the prelude (unless disabled). Returns diagnostics; on any
  /// diagnostic the session is left empty.
  std::vector<Diagnostic> init();

  /// Checks a file and, when clean, commits its definitions atomically.
  std::vector<Diagnostic> load_file(const std::string& path);
  std::vector<Diagnostic> load_source(const std::string& source, const std::string& name);

  struct Outcome {
    kernel::ValuePtr value;
    kernel::ValuePtr type;
  };
  /// Elaborates and evaluates one expression string against the session env.
  Outcome eval_expression(const std::string& text, const std::string& what);

  /// Elaborates only; returns the inferred type.
  kernel::ValuePtr type_of_expression(const std::string& text, const std::string& what);

  std::string show_value(const kernel::ValuePtr& v);
  std::string show_type(const kernel::ValuePtr& t);

  void print_diagnostics(const std::vector<Diagnostic>& ds, std::ostream& out);

  kernel::GlobalTable& globals() { return globals_; }
  circuit::Runtime& runtime() { return *runtime_; }
  const SessionConfig& config() const { return cfg_; }

  /// Runs the interactive shell over the given streams; returns the exit code.
  int repl(std::istream& in, std::ostream& out);

private:
  SessionConfig cfg_;
  kernel::GlobalTable globals_;
  std::unique_ptr<circuit::Runtime> runtime_;
};

}  // namespace dpq::driver
