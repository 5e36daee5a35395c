#ifndef RDCONTROL_ERRORS_HPP
#define RDCONTROL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdc {

/// Base class for everything thrown by the library. Catching this is enough
/// to map any library failure onto a process exit code.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A declaration or an input value failed validation (bad geometry, negative
/// rate constant, inconsistent moiety total, ...).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// A configuration file could not be loaded; `field()` names the offending
/// entry with a dotted path (e.g. "species[1].diffusion").
class ConfigError : public Error {
public:
  ConfigError(const std::string& field, const std::string& msg)
    : Error("config field '" + field + "': " + msg), field_(field) {}
  const std::string& field() const { return field_; }
private:
  std::string field_;
};

// ---------------------------------------------------------------------------
// rate-language errors

/// Malformed rate expression; `position()` is the 0-based source column.
class SyntaxError : public Error {
public:
  SyntaxError(int position, const std::string& msg)
    : Error("syntax error at column " + std::to_string(position) + ": " + msg),
      position_(position) {}
  int position() const { return position_; }
private:
  int position_;
};

/// An identifier or function name that is neither a declared constant, a
/// declared variable, nor a builtin function.
class UnknownIdentifier : public Error {
public:
  explicit UnknownIdentifier(const std::string& name)
    : Error("unknown identifier '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }
private:
  std::string name_;
};

/// Evaluation was handed fewer values than the symbol table declares.
class UnboundIdentifier : public Error {
public:
  explicit UnboundIdentifier(const std::string& name)
    : Error("no value bound for '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }
private:
  std::string name_;
};

/// Division by an exactly zero denominator during evaluation; `position()`
/// is the source column of the offending '/'.
class DivideByZero : public Error {
public:
  explicit DivideByZero(int position)
    : Error("division by zero at column " + std::to_string(position)),
      position_(position) {}
  int position() const { return position_; }
private:
  int position_;
};

// ---------------------------------------------------------------------------
// network construction errors

/// A rate law, stoichiometry entry, or modulation key names a species that
/// was never declared.
class UnknownSpecies : public Error {
public:
  explicit UnknownSpecies(const std::string& name)
    : Error("unknown species '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }
private:
  std::string name_;
};

/// A modulation key names a reaction that was never declared.
class UnknownReaction : public Error {
public:
  explicit UnknownReaction(const std::string& name)
    : Error("unknown reaction '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }
private:
  std::string name_;
};

/// Two declarations share a name that must be unique (species, reactions,
/// symbols, or two transport laws on the same species and face).
class DuplicateName : public Error {
public:
  explicit DuplicateName(const std::string& name)
    : Error("duplicate name '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }
private:
  std::string name_;
};

/// The species whose boundary flux defines J carries no transport law on any
/// flux face, so J would be identically zero by construction.
class NoFluxTransport : public Error {
public:
  explicit NoFluxTransport(const std::string& species)
    : Error("flux species '" + species + "' has no transport law on a flux face"),
      species_(species) {}
  const std::string& species() const { return species_; }
private:
  std::string species_;
};

/// A modulation factor must be a finite positive real.
class NonPositiveModulator : public Error {
public:
  NonPositiveModulator(const std::string& key, double value)
    : Error("modulator '" + key + "' must be positive, got " + std::to_string(value)),
      key_(key), value_(value) {}
  const std::string& key() const { return key_; }
  double value() const { return value_; }
private:
  std::string key_;
  double value_;
};

// ---------------------------------------------------------------------------
// discretization errors

/// Fewer cells than the scheme supports (boundary extrapolation needs two
/// interior values per face).
class TooFewCells : public Error {
public:
  explicit TooFewCells(int n)
    : Error("mesh needs at least 3 cells, got " + std::to_string(n)), n_(n) {}
  int n_cells() const { return n_; }
private:
  int n_;
};

/// A mesh built for one geometry was combined with a network declared on a
/// different one.
class GeometryMismatch : public Error {
public:
  explicit GeometryMismatch(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// solver errors

/// Newton iteration ran out of iterations or the line search stalled.
class NewtonDiverged : public Error {
public:
  NewtonDiverged(int iterations, double residual)
    : Error("Newton did not converge after " + std::to_string(iterations) +
            " iterations (scaled residual " + std::to_string(residual) + ")"),
      iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }
private:
  int iterations_;
  double residual_;
};

/// A converged state carries a concentration below zero; the solver aborts
/// rather than clamping.
class NegativeConcentration : public Error {
public:
  NegativeConcentration(int cell, int species, double value)
    : Error("negative concentration " + std::to_string(value) + " in cell " +
            std::to_string(cell) + ", species index " + std::to_string(species)),
      cell_(cell), species_(species), value_(value) {}
  int cell() const { return cell_; }
  int species() const { return species_; }
  double value() const { return value_; }
private:
  int cell_, species_;
  double value_;
};

/// One implicit time step failed to solve; `step()` is its index.
class StepSolveFailed : public Error {
public:
  StepSolveFailed(int step, const std::string& why)
    : Error("time step " + std::to_string(step) + " failed: " + why), step_(step) {}
  int step() const { return step_; }
private:
  int step_;
};

// ---------------------------------------------------------------------------
// control-analysis errors

/// A perturbed solve inside a finite-difference probe failed; the message
/// names the modulator being probed.
class ProbeSolveFailed : public Error {
public:
  ProbeSolveFailed(const std::string& modulator, const std::string& why)
    : Error("probe for modulator '" + modulator + "' failed: " + why),
      modulator_(modulator) {}
  const std::string& modulator() const { return modulator_; }
private:
  std::string modulator_;
};

} // namespace rdc

#endif
