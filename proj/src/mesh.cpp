#include "cfoed/mesh.hpp"

#include <algorithm>
#include <limits>

#include "cfoed/errors.hpp"

namespace cfoed {

Mesh1D Mesh1D::uniform(int elements) {
  if (elements < 1) throw domain_error("mesh needs at least one element");
  Mesh1D mesh;
  mesh.node_positions.resize(static_cast<std::size_t>(elements) + 1);
  for (int i = 0; i <= elements; ++i)
    mesh.node_positions[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / elements;
  mesh.node_positions.front() = 0.0;
  mesh.node_positions.back() = 1.0;
  return mesh;
}

Mesh1D Mesh1D::from_nodes(std::vector<double> nodes) {
  Mesh1D mesh;
  mesh.node_positions = std::move(nodes);
  mesh.validate();
  return mesh;
}

double Mesh1D::element_width(int element) const {
  return node_positions[static_cast<std::size_t>(element) + 1] -
         node_positions[static_cast<std::size_t>(element)];
}

double Mesh1D::min_element_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (int e = 0; e < element_count(); ++e) w = std::min(w, element_width(e));
  return w;
}

int Mesh1D::element_containing(double x, bool from_right) const {
  if (x < node_positions.front() || x > node_positions.back())
    throw domain_error("position outside the mesh span");
  // first node strictly greater than x
  auto it = std::upper_bound(node_positions.begin(), node_positions.end(), x);
  int e = static_cast<int>(it - node_positions.begin()) - 1;
  if (e >= element_count()) e = element_count() - 1;  // x == 1
  if (!from_right && e > 0 &&
      x == node_positions[static_cast<std::size_t>(e)]) {
    --e;
  }
  return e;
}

void Mesh1D::validate() const {
  if (node_positions.size() < 2)
    throw domain_error("mesh needs at least two nodes");
  if (node_positions.front() != 0.0 || node_positions.back() != 1.0)
    throw domain_error("mesh must span [0,1]");
  for (std::size_t i = 1; i < node_positions.size(); ++i) {
    if (!(node_positions[i] > node_positions[i - 1]))
      throw domain_error("mesh nodes must be strictly increasing");
  }
}

}  // namespace cfoed
