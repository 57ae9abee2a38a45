#pragma once

#include <stdexcept>
#include <string>

namespace beamstab {

/// Argument outside the mathematical domain of an operation (x outside [0,1], dt <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficient whose K falls outside (0, 2), or that is not positive on (0, 1].
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix assembly produced something unusable (non-SPD mass matrix, non-finite entries).
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorization or iterative solver breakdown.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked invariant of the evolution failed (energy increase, too few snapshots, ...).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No delta in (0, nu) keeps eps0 - delta * C1(delta) positive.
class InfeasibleDeltaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration file: parse failure, unknown key or out-of-range value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace beamstab
