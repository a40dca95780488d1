#include "cfoed/model_problem.hpp"

#include "cfoed/errors.hpp"

namespace cfoed {

void ModelProblemSpec::validate() const {
  if (!(k > 0.0)) throw domain_error("model spec requires k > 0");
}

const char* to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::ParameterizedBC:
      return "parameterized_bc";
    case CaseKind::ParameterizedSource:
      return "parameterized_source";
    case CaseKind::ParameterizedMaterial:
      return "parameterized_material";
    case CaseKind::MisspecifiedSource:
      return "misspecified_source";
  }
  return "unknown";
}

const char* to_string(Criterion criterion) {
  return criterion == Criterion::Fisher ? "fisher" : "ecfm";
}

CaseKind case_from_string(const std::string& name) {
  if (name == "parameterized_bc") return CaseKind::ParameterizedBC;
  if (name == "parameterized_source") return CaseKind::ParameterizedSource;
  if (name == "parameterized_material") return CaseKind::ParameterizedMaterial;
  if (name == "misspecified_source") return CaseKind::MisspecifiedSource;
  throw config_error("unknown case kind: " + name);
}

std::optional<double> consistent_parameter(CaseKind kind,
                                           const ModelProblemSpec& spec) {
  switch (kind) {
    case CaseKind::ParameterizedBC:
      return spec.p;
    case CaseKind::ParameterizedSource:
      return spec.b;
    case CaseKind::ParameterizedMaterial:
      return spec.k;
    case CaseKind::MisspecifiedSource:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace cfoed
