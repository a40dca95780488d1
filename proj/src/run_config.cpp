#include "cfoed/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cfoed/errors.hpp"
#include "json.hpp"

namespace cfoed {

namespace {

using nlohmann::json;

std::array<double, 2> parse_interval(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw config_error(std::string(what) + " must be a [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

PriorSpec parse_prior(const json& j) {
  if (!j.is_object()) throw config_error("prior must be an object");
  const std::string kind = j.value("kind", "");
  PriorSpec prior;
  if (kind == "uniform") {
    if (!j.contains("lo") || !j.contains("hi"))
      throw config_error("uniform prior needs lo and hi");
    prior = PriorSpec::uniform(j["lo"].get<double>(), j["hi"].get<double>());
  } else if (kind == "gaussian") {
    if (!j.contains("mean") || !j.contains("stddev"))
      throw config_error("gaussian prior needs mean and stddev");
    prior = PriorSpec::gaussian(j["mean"].get<double>(),
                                j["stddev"].get<double>());
  } else if (kind == "point") {
    if (!j.contains("value")) throw config_error("point prior needs value");
    prior = PriorSpec::point(j["value"].get<double>());
  } else {
    throw config_error("prior kind must be uniform, gaussian, or point");
  }
  prior.validate();
  return prior;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  prior.validate();
  if (elements < 1) throw config_error("mesh.elements must be >= 1");
  if (quadrature_nodes < 1) throw config_error("quadrature.nodes must be >= 1");
  if (sweep.resolution < 2)
    throw config_error("sweep.resolution must be >= 2");
  if (noise.sigma < 0.0) throw config_error("noise.sigma must be >= 0");
  if (noise.trials < 1) throw config_error("noise.trials must be >= 1");
  if (threads < 1) throw config_error("threads must be >= 1");
  if (criterion != "both" && criterion != "fisher" && criterion != "ecfm")
    throw config_error("criterion must be both, fisher, or ecfm");
  if (inverse.method != "both" && inverse.method != "standard" &&
      inverse.method != "ecfm")
    throw config_error("inverse.method must be both, standard, or ecfm");
  if (inverse.data_source != "analytic" && inverse.data_source != "file")
    throw config_error("inverse.data must be analytic or file");
  if (inverse.data_source == "file" && inverse.data_file.empty())
    throw config_error("inverse.data = file requires inverse.data_file");
  if (!design_bounds.empty() &&
      design_bounds.size() != design_positions.size())
    throw config_error("design.bounds must match design.positions");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config root must be an object");

  static const std::set<std::string> known = {
      "case",   "model",     "mesh",  "prior", "quadrature", "design",
      "criterion", "sweep", "inverse", "noise", "seed",       "threads"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key()))
      throw config_error("unknown config key: " + item.key());
  }

  RunConfig cfg;
  try {
    if (j.contains("case")) cfg.kind = case_from_string(j["case"].get<std::string>());
    if (j.contains("model")) {
      const json& m = j["model"];
      cfg.model.k = m.value("k", 1.0);
      cfg.model.b = m.value("b", 0.0);
      cfg.model.p = m.value("p", 0.0);
    }
    if (j.contains("mesh")) cfg.elements = j["mesh"].value("elements", 64);
    if (j.contains("prior")) cfg.prior = parse_prior(j["prior"]);
    if (j.contains("quadrature"))
      cfg.quadrature_nodes = j["quadrature"].value("nodes", 16);
    if (j.contains("design")) {
      const json& d = j["design"];
      if (d.contains("positions"))
        cfg.design_positions = d["positions"].get<std::vector<double>>();
      if (d.contains("bounds")) {
        cfg.design_bounds.clear();
        for (const json& b : d["bounds"])
          cfg.design_bounds.push_back(parse_interval(b, "design.bounds entry"));
      }
      cfg.min_separation = d.value("min_separation", -1.0);
    }
    if (j.contains("criterion"))
      cfg.criterion = j["criterion"].get<std::string>();
    if (j.contains("sweep"))
      cfg.sweep.resolution = j["sweep"].value("resolution", 101);
    if (j.contains("inverse")) {
      const json& inv = j["inverse"];
      cfg.inverse.method = inv.value("method", "both");
      cfg.inverse.data_source = inv.value("data", "analytic");
      cfg.inverse.data_file = inv.value("data_file", "");
      if (inv.contains("eps0")) cfg.inverse.eps0 = inv["eps0"].get<double>();
      if (inv.contains("support"))
        cfg.inverse.support = parse_interval(inv["support"], "inverse.support");
    }
    if (j.contains("noise")) {
      const json& n = j["noise"];
      cfg.noise.sigma = n.value("sigma", 0.01);
      cfg.noise.trials = n.value("trials", 100);
      if (n.contains("support"))
        cfg.noise.support = parse_interval(n["support"], "noise.support");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed config value: ") + e.what());
  }

  try {
    cfg.validate();
  } catch (const domain_error& e) {
    throw config_error(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace cfoed
