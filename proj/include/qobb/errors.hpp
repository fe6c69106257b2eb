#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace qobb {

/// Invalid argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Fock-space construction left more probability mass outside the retained
/// levels than the declared leakage budget allows.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, Eigen::Index required_n_max)
      : std::runtime_error(what), required_n_max(required_n_max) {}

  /// Smallest truncation that would satisfy the leakage budget.
  Eigen::Index required_n_max;
};

/// The discretized boundary-value problem could not be solved.
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical quadrature failed its refinement/consistency requirements.
class quadrature_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qobb
