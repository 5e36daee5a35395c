#include "commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"reaction-diffusion network control analysis"};
  app.require_subcommand(1);

  rdctl::Options opt;
  int figure = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* c = cmd->add_option("--config", opt.config_path, "run description (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", opt.out_path, "output CSV path (default: stdout)");
    cmd->add_option("--cells", opt.cells, "override the mesh resolution");
    cmd->add_option("--fd-step", opt.fd_step, "override the log-space probe step");
    cmd->add_option("--tol", opt.tol, "override the audit tolerance");
  };

  CLI::App* steady =
      app.add_subcommand("steady", "solve the steady state and write the profiles");
  add_common(steady, true);
  CLI::App* transient =
      app.add_subcommand("transient", "integrate in time and write flux and totals");
  add_common(transient, true);
  CLI::App* control =
      app.add_subcommand("control", "estimate all control coefficients of the target");
  add_common(control, true);
  CLI::App* verify =
      app.add_subcommand("verify", "audit summation theorems, homogeneity, and conservation");
  add_common(verify, true);
  CLI::App* reproduce =
      app.add_subcommand("reproduce-figure", "sweep system size and tabulate "
                                             "analytic vs numeric flux controls");
  reproduce->add_option("figure", figure, "4 (slab) or 5 (sphere)")->required();
  add_common(reproduce, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2; // bad usage is a configuration error
  }

  if (steady->parsed()) return rdctl::cmd_steady(opt);
  if (transient->parsed()) return rdctl::cmd_transient(opt);
  if (control->parsed()) return rdctl::cmd_control(opt);
  if (verify->parsed()) return rdctl::cmd_verify(opt);
  if (reproduce->parsed()) return rdctl::cmd_reproduce_figure(figure, opt);
  return 2;
}
