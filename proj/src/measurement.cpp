#include "cfoed/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "cfoed/errors.hpp"

namespace cfoed {

std::array<double, 2> default_position_bounds(const Mesh1D& mesh) {
  return {mesh.min_element_width(), 1.0};
}

std::vector<std::array<double, 2>> resolved_bounds(
    const ExperimentDesign& design, const Mesh1D& mesh) {
  if (!design.bounds.empty()) {
    if (design.bounds.size() != design.positions.size())
      throw contract_error("bounds must match the number of positions");
    return design.bounds;
  }
  return std::vector<std::array<double, 2>>(design.positions.size(),
                                            default_position_bounds(mesh));
}

void ExperimentDesign::validate_against(const Mesh1D& mesh) const {
  mesh.validate();
  for (double x : positions) {
    if (!(x >= 0.0 && x <= 1.0))
      throw domain_error("measurement position outside [0,1]");
  }
  if (!bounds.empty()) {
    if (bounds.size() != positions.size())
      throw contract_error("bounds must match the number of positions");
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!(bounds[i][0] <= bounds[i][1]))
        throw domain_error("position bounds must satisfy lo <= hi");
      if (positions[i] < bounds[i][0] || positions[i] > bounds[i][1])
        throw domain_error("measurement position outside its bounds");
    }
  }
  const double sep =
      min_separation < 0.0 ? mesh.min_element_width() : min_separation;
  if (sep > 0.0 && positions.size() > 1) {
    std::vector<double> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] - sorted[i - 1] < sep)
        throw design_degeneracy_error(
            "measurement positions closer than the minimum separation");
    }
  }
}

MeasurementOperator measurement_operator(const ExperimentDesign& design,
                                         const Mesh1D& mesh) {
  design.validate_against(mesh);
  MeasurementOperator M;
  M.rows = Eigen::MatrixXd::Zero(design.count(), mesh.node_count());
  for (int i = 0; i < design.count(); ++i) {
    const double x = design.positions[static_cast<std::size_t>(i)];
    const int e = mesh.element_containing(x);
    const double xl = mesh.node_positions[static_cast<std::size_t>(e)];
    const double h = mesh.element_width(e);
    const double local = (x - xl) / h;
    M.rows(i, e) = 1.0 - local;
    M.rows(i, e + 1) = local;
  }
  return M;
}

ConstraintForceColumns constraint_columns(const ExperimentDesign& design,
                                          const Mesh1D& mesh) {
  ConstraintForceColumns gamma;
  gamma.cols = measurement_operator(design, mesh).rows.transpose();
  return gamma;
}

Eigen::RowVectorXd measurement_row_derivative(const Mesh1D& mesh,
                                              double position) {
  if (!(position >= 0.0 && position <= 1.0))
    throw domain_error("measurement position outside [0,1]");
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(mesh.node_count());
  const int e = mesh.element_containing(position);
  const double inv_h = 1.0 / mesh.element_width(e);
  row[e] = -inv_h;
  row[e + 1] = inv_h;
  return row;
}

}  // namespace cfoed
