#pragma once

#include <stdexcept>

namespace cfoed {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad values fed to an operation (positions outside the domain, invalid
// model constants, degenerate case/parameter combinations).
struct domain_error : error {
  using error::error;
};

// Malformed run configuration or input file.
struct config_error : error {
  using error::error;
};

// Reduced stiffness matrix singular or indefinite; signals a parameter
// outside the valid range.
struct assembly_error : error {
  using error::error;
};

// Saddle matrix singular or measurements too close together: coincident
// positions, or a measurement sitting on an eliminated Dirichlet node.
struct design_degeneracy_error : error {
  using error::error;
};

// Minimum eigenvalue too close to its neighbor; the eigenvalue gradient is
// not defined there.
struct degenerate_eigenvalue_error : error {
  using error::error;
};

// Iterative minimization failed or the objective is degenerate.
struct optimization_error : error {
  using error::error;
};

// Mismatched dimensions between coupled arguments.
struct contract_error : error {
  using error::error;
};

}  // namespace cfoed
