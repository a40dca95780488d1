#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "cfoed/mesh.hpp"

namespace cfoed {

/// Measurement positions (the experimental controls) with per-position box
/// bounds. Empty bounds mean the consumer's default box; on the
/// discretized path that is [h, 1] with h the smallest element width, one
/// element away from the eliminated Dirichlet node. min_separation < 0
/// selects the default (smallest element width); 0 permits coincident
/// positions.
struct ExperimentDesign {
  std::vector<double> positions;
  std::vector<std::array<double, 2>> bounds;
  double min_separation = -1.0;

  int count() const { return static_cast<int>(positions.size()); }
  void validate_against(const Mesh1D& mesh) const;
};

std::array<double, 2> default_position_bounds(const Mesh1D& mesh);
std::vector<std::array<double, 2>> resolved_bounds(
    const ExperimentDesign& design, const Mesh1D& mesh);

/// Row i holds the shape functions evaluated at position i; rows sum to one
/// (partition of unity) and have at most two nonzeros.
struct MeasurementOperator {
  Eigen::MatrixXd rows;  // C x node_count
};

MeasurementOperator measurement_operator(const ExperimentDesign& design,
                                         const Mesh1D& mesh);

/// Consistent nodal loads of unit impulses at the measurement positions;
/// equals the transpose of the measurement operator for the shared hat
/// basis.
struct ConstraintForceColumns {
  Eigen::MatrixXd cols;  // node_count x C
};

ConstraintForceColumns constraint_columns(const ExperimentDesign& design,
                                          const Mesh1D& mesh);

/// d/d(position) of a measurement row: the hat-function slopes of the
/// element containing the position. Exactly on an interior node the right
/// element is used (left element at position 1); this one-sided convention
/// is what every beta-derivative in the project inherits.
Eigen::RowVectorXd measurement_row_derivative(const Mesh1D& mesh,
                                              double position);

}  // namespace cfoed
