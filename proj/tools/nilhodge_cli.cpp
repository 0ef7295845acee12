#include <iostream>

#include "CLI11.hpp"
#include "nilhodge/commands.hpp"

int main(int argc, char** argv) {
  nh::CommandOptions o;
  std::string format = "json";
  CLI::App app{"Invariant-forms cohomology, metric structures and deformations on nilmanifold models"};
  app.set_help_flag("--help", "print help");
  app.add_option("command", o.command, "command")->required()->check(CLI::IsMember(nh::command_names()));
  app.add_option("target", o.target, "catalog entry name or path to a JSON document");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--h", o.hs, "twisting constants (repeat or comma-separate)")->delimiter(',');
  app.add_option("--p", o.ps, "form degrees for p-SKT / hp-HS (repeat or comma-separate)")->delimiter(',');
  app.add_option("--tol", o.tol, "residual tolerance for representative checks");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "tsv"}));
  app.add_option("--n", o.n, "chart dimension (verify-lemma)");
  app.add_option("--trials", o.trials, "random trials (verify-lemma)");
  app.add_option("--direction", o.direction, "tangent coordinate index (deform)");
  app.add_option("--t-max", o.t_max, "grid half-width (deform)");
  app.add_option("--steps", o.steps, "grid points (deform)");
  app.add_option("--order", o.order, "Maurer-Cartan order (deform)");
  app.add_flag("--family", o.family, "deform along the entry's parameter family");
  app.set_version_flag("--version", nh::kToolVersion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << nh::dump(nh::error_json(o.command, nh::Error(nh::ErrorKind::SchemaError, e.what()))) << '\n';
    return 2;
  }

  // build the whole document before writing, so failures never leave partial output
  std::string out;
  int code = 0;
  try {
    const auto r = nh::run_command(o);
    out = format == "tsv" ? nh::to_tsv(r) : nh::dump(nh::to_json(r)) + "\n";
    code = r.ok() ? 0 : 1;
  } catch (const nh::Error& e) {
    out = nh::dump(nh::error_json(o.command, e)) + "\n";
    code = nh::is_input_error(e.kind) ? 2 : 1;
  } catch (const std::exception& e) {
    out = nh::dump(nh::error_json(o.command, nh::Error(nh::ErrorKind::SchemaError, e.what()))) + "\n";
    code = 2;
  }
  std::cout << out;
  return code;
}
