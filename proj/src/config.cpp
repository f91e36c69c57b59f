#include "msdiff/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace msdiff {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed,
                  const std::set<std::string>& required = {}) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(path + "/" + key, "unknown key");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(path + "/" + key, "missing required key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double out = v.get<double>();
  if (!std::isfinite(out)) fail(path, "expected a finite number");
  return out;
}

double positive(const json& v, const std::string& path) {
  const double out = number(v, path);
  if (!(out > 0.0)) fail(path, "must be positive");
  return out;
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

Eigen::VectorXd vector(const json& v, const std::string& path, Index expected) {
  if (!v.is_array()) fail(path, "expected an array");
  if (static_cast<Index>(v.size()) != expected) {
    fail(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  Eigen::VectorXd out(expected);
  for (Index i = 0; i < expected; ++i) out[i] = number(v[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
  return out;
}

Eigen::MatrixXd matrix(const json& v, const std::string& path, Index rows, Index cols) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
    fail(path, "expected an array of " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    out.row(i) = vector(v[static_cast<std::size_t>(i)], path + "/" + std::to_string(i), cols).transpose();
  }
  return out;
}

Eigen::VectorXd simplex_point(const json& v, const std::string& path, Index n) {
  Eigen::VectorXd x = vector(v, path, n);
  if (x.minCoeff() < 0.0) fail(path, "mole fractions must be nonnegative");
  if (std::abs(x.sum() - 1.0) > 1e-9) fail(path, "mole fractions must sum to 1");
  return x / x.sum();
}

ThermoModel parse_thermo(const json& v, Index n) {
  require_keys(v, "/thermo", {"model", "interaction"}, {"model"});
  if (!v["model"].is_string()) fail("/thermo/model", "expected a string");
  const auto model = v["model"].get<std::string>();
  if (model == "ideal") {
    if (v.contains("interaction")) fail("/thermo/interaction", "not used by the ideal model");
    return Ideal{};
  }
  if (model == "margules") {
    if (!v.contains("interaction")) fail("/thermo/interaction", "missing required key");
    return Margules<double>{matrix(v["interaction"], "/thermo/interaction", n, n)};
  }
  fail("/thermo/model", "expected \"ideal\" or \"margules\"");
}

std::vector<StoichTerm> parse_terms(const json& v, const std::string& path,
                                    const std::map<std::string, Index>& index) {
  if (!v.is_object() || v.empty()) fail(path, "expected a non-empty object of species -> coefficient");
  std::vector<StoichTerm> terms;
  for (const auto& [name, coeff] : v.items()) {
    const auto it = index.find(name);
    if (it == index.end()) fail(path + "/" + name, "unknown species");
    const auto nu = integer(coeff, path + "/" + name);
    if (nu <= 0) fail(path + "/" + name, "coefficient must be a positive integer");
    terms.push_back({it->second, static_cast<int>(nu)});
  }
  return terms;
}

InitialProfile parse_initial(const json& v, Index n, Index cells) {
  require_keys(v, "/initial", {"type", "c_tot", "x", "left", "right", "split", "mean", "amplitude", "mode", "cells"},
               {"type", "c_tot"});
  InitialProfile p;
  p.c_tot = positive(v["c_tot"], "/initial/c_tot");
  if (!v["type"].is_string()) fail("/initial/type", "expected a string");
  const auto type = v["type"].get<std::string>();
  auto allow_only = [&](const std::set<std::string>& keys) {
    std::set<std::string> allowed = keys;
    allowed.insert({"type", "c_tot"});
    require_keys(v, "/initial", allowed, keys);
  };
  if (type == "uniform") {
    allow_only({"x"});
    p.kind = InitialProfile::Kind::Uniform;
    p.x = simplex_point(v["x"], "/initial/x", n);
  } else if (type == "step") {
    std::set<std::string> allowed{"type", "c_tot", "left", "right", "split"};
    require_keys(v, "/initial", allowed, {"left", "right"});
    p.kind = InitialProfile::Kind::Step;
    p.x = simplex_point(v["left"], "/initial/left", n);
    p.other = simplex_point(v["right"], "/initial/right", n);
    if (v.contains("split")) {
      p.split = number(v["split"], "/initial/split");
      if (!(p.split > 0.0 && p.split < 1.0)) fail("/initial/split", "must lie in (0, 1)");
    }
  } else if (type == "cosine") {
    require_keys(v, "/initial", {"type", "c_tot", "mean", "amplitude", "mode"}, {"mean", "amplitude"});
    p.kind = InitialProfile::Kind::Cosine;
    p.x = simplex_point(v["mean"], "/initial/mean", n);
    p.other = vector(v["amplitude"], "/initial/amplitude", n);
    if (std::abs(p.other.sum()) > 1e-12) fail("/initial/amplitude", "amplitudes must sum to 0");
    if ((p.x - p.other.cwiseAbs()).minCoeff() < 0.0) fail("/initial/amplitude", "profile would turn negative");
    if (v.contains("mode")) {
      p.mode = static_cast<int>(integer(v["mode"], "/initial/mode"));
      if (p.mode < 1) fail("/initial/mode", "must be >= 1");
    }
  } else if (type == "cells") {
    allow_only({"cells"});
    p.kind = InitialProfile::Kind::Cells;
    p.cells.resize(cells, n);
    if (!v["cells"].is_array() || static_cast<Index>(v["cells"].size()) != cells) {
      fail("/initial/cells", "expected one row per grid cell");
    }
    for (Index i = 0; i < cells; ++i) {
      p.cells.row(i) =
          simplex_point(v["cells"][static_cast<std::size_t>(i)], "/initial/cells/" + std::to_string(i), n).transpose();
    }
  } else {
    fail("/initial/type", "expected one of uniform, step, cosine, cells");
  }
  return p;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "line " << line_of(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
    throw Error(ErrorCode::ConfigError, os.str());
  }

  require_keys(doc, "",
               {"species", "diffusivity", "thermo", "grid", "initial", "reactions", "simulation", "probe", "seed",
                "verify", "output"},
               {"species", "diffusivity"});

  RunConfig cfg;
  const json& species = doc["species"];
  if (!species.is_array() || species.size() < 2) fail("/species", "expected at least two species names");
  std::map<std::string, Index> index;
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (!species[i].is_string()) fail("/species/" + std::to_string(i), "expected a string");
    const auto name = species[i].get<std::string>();
    if (!index.emplace(name, static_cast<Index>(i)).second) fail("/species/" + std::to_string(i), "duplicate name");
    cfg.mixture.names.push_back(name);
  }
  const auto n = static_cast<Index>(species.size());
  cfg.mixture.dmat = matrix(doc["diffusivity"], "/diffusivity", n, n);
  if (doc.contains("thermo")) cfg.mixture.thermo = parse_thermo(doc["thermo"], n);

  const auto issues = validate_spec(cfg.mixture);
  if (!issues.empty()) {
    std::ostringstream os;
    for (const auto& issue : issues) os << "\n  " << issue.message;
    fail("/diffusivity", "invalid mixture:" + os.str());
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    require_keys(g, "/grid", {"ncells", "length"}, {"ncells", "length"});
    cfg.grid.ncells = integer(g["ncells"], "/grid/ncells");
    if (cfg.grid.ncells < 2) fail("/grid/ncells", "must be >= 2");
    cfg.grid.length = positive(g["length"], "/grid/length");
  }
  if (doc.contains("initial")) cfg.initial = parse_initial(doc["initial"], n, cfg.grid.ncells);
  else cfg.initial.x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  if (doc.contains("reactions")) {
    const json& list = doc["reactions"];
    if (!list.is_array()) fail("/reactions", "expected an array");
    std::vector<Reaction> reactions;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string path = "/reactions/" + std::to_string(k);
      const json& r = list[k];
      require_keys(r, path, {"reactants", "products", "k_forward", "k_backward"},
                   {"reactants", "products", "k_forward"});
      const auto reactants = parse_terms(r["reactants"], path + "/reactants", index);
      const auto products = parse_terms(r["products"], path + "/products", index);
      const double kf = number(r["k_forward"], path + "/k_forward");
      const double kb = r.contains("k_backward") ? number(r["k_backward"], path + "/k_backward") : 0.0;
      if (kf < 0.0 || kb < 0.0) fail(path, "rate constants must be nonnegative");
      reactions.push_back({reactants, products, kf});
      if (kb > 0.0) reactions.push_back({products, reactants, kb});
    }
    try {
      cfg.reactions = ReactionNetwork(std::move(reactions), n);
    } catch (const Error& e) {
      fail("/reactions", e.what());
    }
  }

  if (doc.contains("simulation")) {
    const json& s = doc["simulation"];
    require_keys(s, "/simulation", {"t_end", "cfl_safety", "checkpoint_interval", "max_steps"}, {"t_end"});
    cfg.sim.t_end = positive(s["t_end"], "/simulation/t_end");
    if (s.contains("cfl_safety")) {
      cfg.sim.cfl_safety = positive(s["cfl_safety"], "/simulation/cfl_safety");
      if (cfg.sim.cfl_safety > 1.0) fail("/simulation/cfl_safety", "must lie in (0, 1]");
    }
    if (s.contains("checkpoint_interval")) {
      cfg.sim.checkpoint_interval = positive(s["checkpoint_interval"], "/simulation/checkpoint_interval");
    }
    if (s.contains("max_steps")) {
      const auto steps = integer(s["max_steps"], "/simulation/max_steps");
      if (steps <= 0) fail("/simulation/max_steps", "must be positive");
      cfg.sim.max_steps = static_cast<std::size_t>(steps);
    }
  }

  if (doc.contains("probe")) {
    const json& p = doc["probe"];
    require_keys(p, "/probe", {"composition", "c_tot", "gradients"}, {"composition"});
    ProbePoint probe;
    probe.composition = simplex_point(p["composition"], "/probe/composition", n);
    if (p.contains("c_tot")) probe.c_tot = positive(p["c_tot"], "/probe/c_tot");
    if (p.contains("gradients")) {
      probe.gradients = vector(p["gradients"], "/probe/gradients", n);
      if (std::abs(probe.gradients->sum()) > 1e-12 * std::max(1.0, probe.gradients->cwiseAbs().maxCoeff())) {
        fail("/probe/gradients", "mole-fraction gradients must sum to 0");
      }
    }
    cfg.probe = std::move(probe);
  }

  if (doc.contains("seed")) {
    const auto seed = integer(doc["seed"], "/seed");
    if (seed < 0) fail("/seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("verify")) {
    const json& v = doc["verify"];
    require_keys(v, "/verify", {"samples"});
    if (v.contains("samples")) {
      const auto samples = integer(v["samples"], "/verify/samples");
      if (samples <= 0) fail("/verify/samples", "must be positive");
      cfg.verify_samples = static_cast<std::size_t>(samples);
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_keys(o, "/output", {"trajectory", "ledger"});
    if (o.contains("trajectory")) {
      if (!o["trajectory"].is_string()) fail("/output/trajectory", "expected a string");
      cfg.trajectory_file = o["trajectory"].get<std::string>();
    }
    if (o.contains("ledger")) {
      if (!o["ledger"].is_string()) fail("/output/ledger", "expected a string");
      cfg.ledger_file = o["ledger"].get<std::string>();
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Field initial_field(const RunConfig& config) {
  const auto& p = config.initial;
  const Index cells = config.grid.ncells;
  const Index n = config.mixture.n();
  Eigen::MatrixXd x(cells, n);
  for (Index i = 0; i < cells; ++i) {
    const double pos = config.grid.center(i) / config.grid.length;
    switch (p.kind) {
      case InitialProfile::Kind::Uniform: x.row(i) = p.x.transpose(); break;
      case InitialProfile::Kind::Step: x.row(i) = (pos < p.split ? p.x : p.other).transpose(); break;
      case InitialProfile::Kind::Cosine:
        x.row(i) = (p.x + std::cos(std::numbers::pi * p.mode * pos) * p.other).transpose();
        break;
      case InitialProfile::Kind::Cells: x.row(i) = p.cells.row(i); break;
    }
  }
  return make_field(config.grid, p.c_tot * x);
}

}  // namespace msdiff
