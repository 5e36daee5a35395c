#include "commands.hpp"

#include <rdcontrol/analytic.hpp>
#include <rdcontrol/config.hpp>
#include <rdcontrol/control.hpp>
#include <rdcontrol/errors.hpp>
#include <rdcontrol/examples.hpp>
#include <rdcontrol/mesh.hpp>
#include <rdcontrol/network.hpp>
#include <rdcontrol/solver.hpp>
#include <rdcontrol/system.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rdctl {

namespace {

using namespace rdc;

/// Fixed 12-significant-digit formatting keeps output byte-deterministic.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Sink {
  std::ofstream file;
  std::ostream* os = nullptr;

  explicit Sink(const std::string& path) {
    if (path.empty()) {
      os = &std::cout;
      return;
    }
    file.open(path);
    if (!file) throw ConfigError("--out", "cannot open '" + path + "' for writing");
    os = &file;
  }
  void line(const std::string& s) { *os << s << '\n'; }
};

RunConfig load(const Options& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config", "required");
  RunConfig cfg = load_config(opt.config_path);
  if (opt.cells != 0) {
    if (opt.cells < 3) throw ConfigError("--cells", "need at least 3 cells");
    cfg.cells = opt.cells;
  }
  if (opt.fd_step != 0.0) {
    if (!(opt.fd_step > 0.0) || opt.fd_step > 0.1)
      throw ConfigError("--fd-step", "must lie in (0, 0.1]");
    cfg.fd_step = opt.fd_step;
  }
  if (opt.tol != 0.0) {
    if (!(opt.tol > 0.0)) throw ConfigError("--tol", "must be positive");
    cfg.verify_tol = opt.tol;
  }
  return cfg;
}

/// Runs `body` after config loading, mapping exceptions onto the documented
/// exit codes: 2 for configuration problems, 3 for solver failures.
int with_config(const Options& opt, const std::function<int(RunConfig&)>& body) {
  RunConfig cfg;
  try {
    cfg = load(opt);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  try {
    return body(cfg);
  } catch (const NewtonDiverged& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const NegativeConcentration& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const StepSolveFailed& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const ProbeSolveFailed& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const DivideByZero& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const UnboundIdentifier& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}

DiscreteSystem reference_system(const RunConfig& cfg, const Mesh& mesh) {
  return DiscreteSystem(
      apply_modulation(cfg.network, ModulationVector::reference(*cfg.network)), mesh);
}

std::optional<double> coeff_by_label(const ControlReport& rep, const std::string& label) {
  for (const Coefficient& c : rep.coefficients)
    if (c.modulator.label == label) return c.value;
  return std::nullopt;
}

double coeff_sum(const ControlReport& rep, Modulator::Kind kind) {
  double s = 0.0;
  for (const Coefficient& c : rep.coefficients)
    if (c.modulator.kind == kind) s += c.value;
  return s;
}

} // namespace

// ---------------------------------------------------------------------------
// steady

int cmd_steady(const Options& opt) {
  return with_config(opt, [&](RunConfig& cfg) {
    Mesh mesh = build_mesh(cfg.network->geometry(), cfg.cells);
    DiscreteSystem sys = reference_system(cfg, mesh);
    ConcentrationField field = solve_steady(sys, sys.initial_field(), cfg.settings);

    Sink out(opt.out_path);
    std::string header = "xi";
    for (int i = 0; i < cfg.network->n_species(); ++i)
      header += "," + cfg.network->species_name(i);
    out.line(header);
    for (int k = 0; k < mesh.n_cells; ++k) {
      std::string row = fmt(mesh.centers[k]);
      for (int i = 0; i < cfg.network->n_species(); ++i)
        row += "," + fmt(field.values[sys.index(k, i)]);
      out.line(row);
    }
    out.line("J," + fmt(sys.flux(field.values)));
    return 0;
  });
}

// ---------------------------------------------------------------------------
// transient

int cmd_transient(const Options& opt) {
  return with_config(opt, [&](RunConfig& cfg) {
    Mesh mesh = build_mesh(cfg.network->geometry(), cfg.cells);
    DiscreteSystem sys = reference_system(cfg, mesh);
    ConcentrationField field = integrate_transient(sys, sys.initial_field(),
                                                   cfg.tau_end, cfg.steps, cfg.settings);

    const auto& moieties = cfg.network->moieties();
    std::vector<std::vector<double>> totals;
    for (const auto& m : moieties)
      totals.push_back(moiety_totals(field, mesh, m.weights));

    Sink out(opt.out_path);
    std::string header = "tau,J";
    for (const auto& m : moieties) header += "," + m.name;
    out.line(header);
    for (size_t f = 0; f < field.frames.size(); ++f) {
      std::string row = fmt(field.times[f]) + "," + fmt(sys.flux(field.frames[f]));
      for (const auto& t : totals) row += "," + fmt(t[f]);
      out.line(row);
    }
    return 0;
  });
}

// ---------------------------------------------------------------------------
// control

int cmd_control(const Options& opt) {
  return with_config(opt, [&](RunConfig& cfg) {
    ControlEngine engine(cfg.control_context());
    ControlReport rep = engine.report(cfg.target);

    Sink out(opt.out_path);
    out.line("modulator,coefficient,trunc_err");
    // a vanished target means the rows below are absolute sensitivities
    if (rep.zero_target) out.line("ZERO_TARGET," + fmt(rep.reference_value) + ",0");
    for (const Coefficient& c : rep.coefficients)
      out.line(c.modulator.label + "," + fmt(c.value) + "," + fmt(c.trunc_err));
    out.line("L," + fmt(rep.size.value) + "," + fmt(rep.size.trunc_err));
    out.line("SUM_REACTION_THEOREM," + fmt(rep.reaction_sum) + "," +
             fmt(rep.reaction_residual));
    out.line("SUM_SIZE_THEOREM," + fmt(rep.size_sum) + "," + fmt(rep.size_residual));
    if (cfg.network->geometry().kind == Geometry::Kind::HalfLine)
      out.line("SUM_SIZE_OPEN," + fmt(rep.open_size_sum) + "," +
               fmt(rep.open_size_sum - rep.size_expected));
    return 0;
  });
}

// ---------------------------------------------------------------------------
// verify

namespace {

struct Audit {
  std::string name;
  bool pass = false;
  std::string detail;
};

class AuditLog {
public:
  void residual(const std::string& name, double value, double bound) {
    bool ok = std::isfinite(value) && std::fabs(value) <= bound;
    audits_.push_back({name, ok,
                       "residual " + fmt3(value) + ", tol " + fmt3(bound)});
  }
  void fail(const std::string& name, const std::string& why) {
    audits_.push_back({name, false, why});
  }
  int emit(Sink& out) const {
    int bad = 0;
    for (const Audit& a : audits_) {
      out.line(std::string(a.pass ? "PASS " : "FAIL ") + a.name + " (" + a.detail + ")");
      if (!a.pass) ++bad;
    }
    out.line(bad == 0 ? "ALL PASS" : "FAILED " + std::to_string(bad) + " audit(s)");
    return bad == 0 ? 0 : 1;
  }

private:
  std::vector<Audit> audits_;
};

void closed_form_audits(AuditLog& log, const RunConfig& cfg, ControlEngine& engine,
                        const ControlReport& flux_report, double tol) {
  analytic::Controls want;
  double want_J = 0.0;
  std::string conversion_bulk; // label of the bulk phosphatase, when it is one
  if (cfg.family == RunConfig::Family::Slab) {
    want = analytic::slab_flux_controls(cfg.slab);
    want_J = analytic::slab_solution(cfg.slab).J;
  } else {
    want = analytic::sphere_flux_controls(cfg.sphere);
    want_J = analytic::sphere_solution(cfg.sphere).J;
    conversion_bulk = "v:phosphatase";
  }

  double J = engine.reference_value({});
  log.residual("closed-form[J]", J - want_J,
               std::max(tol, 1e-3 * std::max(1.0, std::fabs(want_J))));

  auto kin = coeff_by_label(flux_report, "f:kinase");
  auto pho = conversion_bulk.empty() ? coeff_by_label(flux_report, "f:phosphatase")
                                     : coeff_by_label(flux_report, conversion_bulk);
  if (!kin || !pho) {
    log.fail("closed-form[controls]",
             "expected modulators f:kinase and " +
                 (conversion_bulk.empty() ? std::string("f:phosphatase")
                                          : conversion_bulk) +
                 " in the report");
    return;
  }
  double cD = coeff_sum(flux_report, Modulator::Kind::Diffusion);
  double worst = std::fabs(*kin - want.kinase);
  worst = std::max(worst, std::fabs(*pho - want.phosphatase));
  worst = std::max(worst, std::fabs(cD - want.diffusion));
  worst = std::max(worst, std::fabs(flux_report.size.value - want.size));
  log.residual("closed-form[controls]", worst, std::max(tol, 2e-3));
}

} // namespace

int cmd_verify(const Options& opt) {
  return with_config(opt, [&](RunConfig& cfg) {
    double tol = cfg.verify_tol;
    ControlEngine engine(cfg.control_context());
    AuditLog log;

    TargetSelector flux_target; // steady flux
    TargetSelector conc_target;
    if (cfg.target.kind == TargetSelector::Kind::Concentration ||
        cfg.target.kind == TargetSelector::Kind::FaceDifference) {
      conc_target = cfg.target;
    } else {
      conc_target.kind = TargetSelector::Kind::Concentration;
      conc_target.species = cfg.network->species_name(cfg.network->flux_species());
      conc_target.xi = cfg.network->geometry().extent / 2.0;
    }
    TargetSelector timed_target;
    timed_target.kind = TargetSelector::Kind::TimedFlux;
    timed_target.tau = cfg.tau_end;

    bool half_line = cfg.network->geometry().kind == Geometry::Kind::HalfLine;

    // summation theorems at both target kinds, plus the timed variant
    ControlReport rf = engine.report(flux_target);
    log.residual("reaction-sum[flux]", rf.reaction_residual, tol);
    log.residual("size-sum[flux]", rf.size_residual, tol);
    if (half_line)
      log.residual("size-sum-open[flux]", rf.open_size_sum - rf.size_expected,
                   std::max(tol, 1e-3)); // truncation leaves a C_L-sized remainder
    ControlReport rc = engine.report(conc_target);
    log.residual("reaction-sum[conc]", rc.reaction_residual, tol);
    log.residual("size-sum[conc]", rc.size_residual, tol);
    ControlReport rt = engine.report(timed_target);
    log.residual("reaction-sum[timed-flux]", rt.reaction_residual, tol);

    // homogeneity of the governing equations under the three scaling families
    double lams[] = {0.5, 2.0, 4.0};
    ScalingExponents rates{1.0, 1.0, 1.0, 0.0, 0.0};
    ScalingExponents sized{0.0, 1.0, 2.0, 1.0, 0.0};
    ScalingExponents timed{1.0, 1.0, 1.0, 0.0, -1.0};
    log.residual("homogeneity[rates]",
                 engine.homogeneity_deviation(flux_target, rates, 1.0, lams), tol);
    log.residual("homogeneity[size]",
                 engine.homogeneity_deviation(flux_target, sized, 1.0, lams), tol);
    log.residual("homogeneity[time]",
                 engine.homogeneity_deviation(timed_target, timed, 1.0, lams), tol);

    // conserved totals along the reference transient
    {
      Mesh mesh = build_mesh(cfg.network->geometry(), cfg.cells);
      DiscreteSystem sys = reference_system(cfg, mesh);
      ConcentrationField traj = integrate_transient(sys, sys.initial_field(),
                                                    cfg.tau_end, cfg.steps, cfg.settings);
      for (const auto& m : cfg.network->moieties()) {
        std::vector<double> totals = moiety_totals(traj, mesh, m.weights);
        double drift = 0.0;
        for (double t : totals)
          drift = std::max(drift, std::fabs(t - totals.front()));
        double rel = drift / std::max(1.0, std::fabs(totals.front()));
        log.residual("moiety-drift[" + m.name + "]", rel,
                     1e-10 * std::max(1.0, cfg.tau_end));
      }
    }

    if (cfg.family != RunConfig::Family::None)
      closed_form_audits(log, cfg, engine, rf, tol);

    Sink out(opt.out_path);
    return log.emit(out);
  });
}

// ---------------------------------------------------------------------------
// figure sweeps

namespace {

constexpr int kFigurePoints = 60;
constexpr double kFigureLmin = 0.05;
constexpr double kFigureLmax = 20.0;
// The slab's linear profile is exact on any mesh; the sphere needs the
// curvature resolved to keep the numeric columns within ~1e-4 of the
// closed forms across the whole sweep.
constexpr int kFigureCellsSlab = 256;
constexpr int kFigureCellsSphere = 1024;

struct SweepRow {
  double L = 0.0;
  analytic::Controls analytic_c, numeric_c;
};

std::string sweep_row(const SweepRow& r) {
  auto& a = r.analytic_c;
  auto& n = r.numeric_c;
  std::string s = fmt(r.L);
  for (double v : {a.kinase, a.phosphatase, a.diffusion, a.size}) s += "," + fmt(v);
  for (double v : {n.kinase, n.phosphatase, n.diffusion, n.size}) s += "," + fmt(v);
  s += "," + fmt(std::fabs(a.kinase - n.kinase));
  s += "," + fmt(std::fabs(a.phosphatase - n.phosphatase));
  s += "," + fmt(std::fabs(a.diffusion - n.diffusion));
  s += "," + fmt(std::fabs(a.size - n.size));
  return s;
}

} // namespace

int cmd_reproduce_figure(int figure, const Options& opt) {
  if (figure != 4 && figure != 5) {
    std::cerr << "configuration error: figure must be 4 or 5\n";
    return 2;
  }
  int cells = opt.cells != 0 ? opt.cells
                             : (figure == 4 ? kFigureCellsSlab : kFigureCellsSphere);
  double h = opt.fd_step != 0.0 ? opt.fd_step : 1e-3;
  if (cells < 3) {
    std::cerr << "configuration error: --cells needs at least 3\n";
    return 2;
  }
  if (!(h > 0.0) || h > 0.1) {
    std::cerr << "configuration error: --fd-step must lie in (0, 0.1]\n";
    return 2;
  }

  try {
    Sink out(opt.out_path);
    out.line(figure == 4
                 ? "# slab flux control coefficients vs system size L"
                 : "# sphere flux control coefficients vs cell radius L");
    out.line("# parameters: D=1, k_k=1, k_p=1, kappa_k=10, kappa_p=0.1, M=1");
    out.line("# grid: " + std::to_string(kFigurePoints) + " log-spaced sizes in [" +
             fmt(kFigureLmin) + ", " + fmt(kFigureLmax) + "]; cells=" +
             std::to_string(cells) + "; fd_step=" + fmt(h));
    out.line("L,CJ_k_analytic,CJ_p_analytic,CJ_D_analytic,CJ_L_analytic,"
             "CJ_k_numeric,CJ_p_numeric,CJ_D_numeric,CJ_L_numeric,"
             "CJ_k_diff,CJ_p_diff,CJ_D_diff,CJ_L_diff");

    for (int i = 0; i < kFigurePoints; ++i) {
      double L = kFigureLmin *
                 std::pow(kFigureLmax / kFigureLmin,
                          static_cast<double>(i) / (kFigurePoints - 1));
      SweepRow row;
      row.L = L;

      ControlContext ctx;
      ctx.n_cells = cells;
      ctx.fd_step = h;
      std::string conversion_label;
      if (figure == 4) {
        analytic::SlabParams p;
        p.L = L;
        row.analytic_c = analytic::slab_flux_controls(p);
        ctx.spec = examples::slab_cycle(p);
        conversion_label = "f:phosphatase";
      } else {
        analytic::SphereParams p;
        p.L = L;
        row.analytic_c = analytic::sphere_flux_controls(p);
        ctx.spec = examples::sphere_cycle(p);
        conversion_label = "v:phosphatase";
      }

      ControlEngine engine(std::move(ctx));
      ControlReport rep = engine.report({});
      row.numeric_c.kinase = coeff_by_label(rep, "f:kinase").value_or(
          std::numeric_limits<double>::quiet_NaN());
      row.numeric_c.phosphatase = coeff_by_label(rep, conversion_label)
                                      .value_or(std::numeric_limits<double>::quiet_NaN());
      row.numeric_c.diffusion = coeff_sum(rep, Modulator::Kind::Diffusion);
      row.numeric_c.size = rep.size.value;
      out.line(sweep_row(row));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  }
}

} // namespace rdctl
