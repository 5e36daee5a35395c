#ifndef RDCTL_COMMANDS_HPP
#define RDCTL_COMMANDS_HPP

#include <string>

namespace rdctl {

/// Shared command-line options. Zero-valued overrides keep the config value.
struct Options {
  std::string config_path;
  std::string out_path; ///< empty writes to stdout
  int cells = 0;
  double fd_step = 0.0;
  double tol = 0.0;
};

// Exit codes: 0 ok, 1 audit failure, 2 config error, 3 solver failure.
int cmd_steady(const Options& opt);
int cmd_transient(const Options& opt);
int cmd_control(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_reproduce_figure(int figure, const Options& opt);

} // namespace rdctl

#endif
