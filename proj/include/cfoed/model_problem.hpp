#pragma once

#include <optional>
#include <string>

namespace cfoed {

/// Which component of the model problem carries the unknown scalar
/// parameter in the inverse problem.
enum class CaseKind {
  ParameterizedBC,        // right-boundary traction unknown
  ParameterizedSource,    // distributed source magnitude unknown
  ParameterizedMaterial,  // stiffness coefficient unknown
  MisspecifiedSource,     // source unknown, traction term wrongly omitted
};

enum class Criterion { Fisher, Ecfm };

/// Constants of the data-generating system
///   -k u'' = b on (0,1),  u(0) = 0,  k u'(1) = p.
struct ModelProblemSpec {
  double k = 1.0;  // stiffness, > 0
  double b = 0.0;  // distributed source magnitude
  double p = 0.0;  // boundary traction

  void validate() const;
};

const char* to_string(CaseKind kind);
const char* to_string(Criterion criterion);
CaseKind case_from_string(const std::string& name);

/// Parameter value at which the case's model reproduces the data exactly;
/// empty for MisspecifiedSource (no such value exists by construction).
std::optional<double> consistent_parameter(CaseKind kind,
                                           const ModelProblemSpec& spec);

}  // namespace cfoed
