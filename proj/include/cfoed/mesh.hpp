#pragma once

#include <vector>

namespace cfoed {

/// Partition of [0,1] into line elements with linear (hat) shape functions.
struct Mesh1D {
  std::vector<double> node_positions;  // strictly increasing, 0 ... 1

  static Mesh1D uniform(int elements);
  static Mesh1D from_nodes(std::vector<double> nodes);

  int node_count() const { return static_cast<int>(node_positions.size()); }
  int element_count() const { return node_count() - 1; }
  double element_width(int element) const;
  double min_element_width() const;

  /// Element whose closure contains x. When x coincides with an interior
  /// node, from_right selects the right element (the project-wide
  /// convention for one-sided shape-function derivatives); x = 1 always
  /// maps to the last element.
  int element_containing(double x, bool from_right = true) const;

  void validate() const;
};

}  // namespace cfoed
