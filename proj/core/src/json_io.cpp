#include "opalg/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

namespace opalg {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& msg) {
  fail("ParseError", path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& allowed) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const std::string& a : allowed)
      if (key == a) known = true;
    if (!known) parse_fail(path + "/" + key, "unknown key");
  }
  for (const std::string& a : allowed)
    if (!obj.contains(a)) parse_fail(path + "/" + a, "missing key");
}

json matrix_to_value(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_value(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) parse_fail(path, "expected a nonempty array of rows");
  const size_t n = v.size();
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix m(dim, dim);
  for (size_t i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != n)
      parse_fail(path + "/" + std::to_string(i),
                 "expected a row of length " + std::to_string(n));
    for (size_t j = 0; j < n; ++j) {
      const json& entry = row[j];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number())
        parse_fail(path + "/" + std::to_string(i) + "/" + std::to_string(j),
                   "expected an [re, im] pair");
      m(Eigen::Index(i), Eigen::Index(j)) =
          Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

json parse_root(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) parse_fail("$", "malformed JSON");
  return root;
}

}  // namespace

std::string matrix_to_json(const Matrix& m) { return matrix_to_value(m).dump(); }

Matrix matrix_from_json(const std::string& text) {
  return matrix_from_value(parse_root(text), "$");
}

std::string model_to_json(const AlgebraModel& model) {
  json root;
  root["block_dims"] = model.block_dims;
  root["times"] = model.filtration.times;
  json partitions = json::array();
  for (const ProjectivePartition& p : model.filtration.partitions) {
    json projs = json::array();
    for (const Matrix& proj : p.projections) projs.push_back(matrix_to_value(proj));
    partitions.push_back(std::move(projs));
  }
  root["partitions"] = std::move(partitions);
  json numeraire = json::array();
  for (const Matrix& b : model.filtration.numeraire)
    numeraire.push_back(matrix_to_value(b));
  root["numeraire"] = std::move(numeraire);
  return root.dump(2);
}

AlgebraModel model_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"block_dims", "times", "partitions", "numeraire"});

  std::vector<int> blocks;
  if (!root["block_dims"].is_array()) parse_fail("$/block_dims", "expected array");
  for (size_t i = 0; i < root["block_dims"].size(); ++i) {
    const json& b = root["block_dims"][i];
    if (!b.is_number_integer() || b.get<int>() <= 0)
      parse_fail("$/block_dims/" + std::to_string(i), "expected a positive integer");
    blocks.push_back(b.get<int>());
  }

  std::vector<double> times;
  if (!root["times"].is_array()) parse_fail("$/times", "expected array");
  for (size_t i = 0; i < root["times"].size(); ++i) {
    if (!root["times"][i].is_number())
      parse_fail("$/times/" + std::to_string(i), "expected a number");
    times.push_back(root["times"][i].get<double>());
  }

  if (!root["partitions"].is_array()) parse_fail("$/partitions", "expected array");
  std::vector<ProjectivePartition> partitions;
  for (size_t t = 0; t < root["partitions"].size(); ++t) {
    const json& plist = root["partitions"][t];
    std::string path = "$/partitions/" + std::to_string(t);
    if (!plist.is_array()) parse_fail(path, "expected array of matrices");
    std::vector<Matrix> projs;
    for (size_t k = 0; k < plist.size(); ++k)
      projs.push_back(matrix_from_value(plist[k], path + "/" + std::to_string(k)));
    partitions.push_back(validate_partition(std::move(projs)));
  }

  if (!root["numeraire"].is_array()) parse_fail("$/numeraire", "expected array");
  std::vector<Matrix> numeraire;
  for (size_t t = 0; t < root["numeraire"].size(); ++t)
    numeraire.push_back(
        matrix_from_value(root["numeraire"][t], "$/numeraire/" + std::to_string(t)));

  Filtration filt = validate_filtration(std::move(times), std::move(partitions),
                                        std::move(numeraire));
  return validate_model(std::move(blocks), std::move(filt));
}

std::string state_to_json(const DensityState& state) {
  json root;
  root["rho"] = matrix_to_value(state.rho);
  return root.dump(2);
}

DensityState state_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"rho"});
  return make_state(matrix_from_value(root["rho"], "$/rho"));
}

std::string gains_to_json(const GainsCone& cone) {
  json root;
  json gains = json::array();
  for (const Matrix& g : cone.generators) gains.push_back(matrix_to_value(g));
  root["gains"] = std::move(gains);
  return root.dump(2);
}

GainsCone gains_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"gains"});
  if (!root["gains"].is_array()) parse_fail("$/gains", "expected array");
  std::vector<Matrix> gens;
  for (size_t i = 0; i < root["gains"].size(); ++i)
    gens.push_back(matrix_from_value(root["gains"][i], "$/gains/" + std::to_string(i)));
  if (gens.empty()) parse_fail("$/gains", "at least one generator required");
  return make_cone(std::move(gens));
}

std::string jump_to_json(const JumpModel& model) {
  json root;
  root["dx"] = model.dx;
  json gamma = json::object();
  for (const auto& [a, g] : model.gamma) gamma[std::to_string(a)] = g;
  root["gamma"] = std::move(gamma);
  root["r"] = model.r;
  return root.dump(2);
}

JumpModel jump_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"dx", "gamma", "r"});
  if (!root["dx"].is_number()) parse_fail("$/dx", "expected a number");
  if (!root["r"].is_number()) parse_fail("$/r", "expected a number");
  if (!root["gamma"].is_object()) parse_fail("$/gamma", "expected an object");
  std::map<int, double> gamma;
  for (const auto& [key, value] : root["gamma"].items()) {
    int alpha = 0;
    try {
      size_t used = 0;
      alpha = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      parse_fail("$/gamma/" + key, "key must be an integer jump size");
    }
    if (!value.is_number())
      parse_fail("$/gamma/" + key, "expected a numeric intensity");
    gamma[alpha] = value.get<double>();
  }
  return make_jump_model(root["dx"].get<double>(), std::move(gamma),
                         root["r"].get<double>());
}

std::string gksl_to_json(const GkslSystem& system, double r) {
  json root;
  root["H"] = matrix_to_value(system.hamiltonian);
  json ops = json::array();
  for (const Matrix& v : system.lindblad_ops) ops.push_back(matrix_to_value(v));
  root["lindblad"] = std::move(ops);
  root["r"] = r;
  return root.dump(2);
}

std::pair<GkslSystem, double> gksl_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"H", "lindblad", "r"});
  Matrix h = matrix_from_value(root["H"], "$/H");
  if (!root["lindblad"].is_array()) parse_fail("$/lindblad", "expected array");
  std::vector<Matrix> ops;
  for (size_t i = 0; i < root["lindblad"].size(); ++i)
    ops.push_back(
        matrix_from_value(root["lindblad"][i], "$/lindblad/" + std::to_string(i)));
  if (!root["r"].is_number()) parse_fail("$/r", "expected a number");
  return {make_gksl(std::move(h), std::move(ops)), root["r"].get<double>()};
}

std::string claim_to_json(const Matrix& claim) {
  json root;
  root["claim"] = matrix_to_value(claim);
  return root.dump(2);
}

Matrix claim_from_json(const std::string& text) {
  json root = parse_root(text);
  check_keys(root, "$", {"claim"});
  return matrix_from_value(root["claim"], "$/claim");
}

std::string born_to_csv(const BornDistribution& distribution) {
  std::string csv = "eigenvalue,probability\n";
  for (const BornAtom& atom : distribution.atoms)
    csv += format_double(atom.eigenvalue) + "," +
           format_double(atom.probability) + "\n";
  return csv;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("ParseError", path + ": cannot open file");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::random_device rd;
  fs::path tmp = dir / (target.filename().string() + ".tmp" +
                        std::to_string(rd() % 1000000));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("ParseError", tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) fail("ParseError", tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail("ParseError", path + ": atomic rename failed: " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace opalg
