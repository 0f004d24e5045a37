#include "qicert/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qicert {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key + ": missing");
  return *it;
}

std::size_t require_count(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ParseError(path + "." + key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

Dims dims_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of dimensions");
  Dims d;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<std::int64_t>() <= 0)
      throw ParseError(path + "[" + std::to_string(i) + "]: expected a positive integer");
    d.push_back(j[i].get<std::size_t>());
  }
  return d;
}

json check_json(double value, double target, double tolerance, bool pass) {
  return {{"value", value}, {"target", target}, {"tolerance", tolerance}, {"pass", pass}};
}

json check_json(const CheckResult& c) {
  json j = check_json(c.value, c.target, c.tolerance, c.pass);
  j["name"] = c.name;
  return j;
}

std::string time_name(TimeSlice s) { return s == TimeSlice::t1 ? "t1" : "t2"; }

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json entries = json::array();
  for (const Complex& z : m.entries()) entries.push_back({z.real(), z.imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j, const std::string& path) {
  const std::size_t rows = require_count(j, "rows", path);
  const std::size_t cols = require_count(j, "cols", path);
  const json& entries = require(j, "entries", path);
  if (!entries.is_array() || entries.size() != rows * cols)
    throw ParseError(path + ".entries: expected " + std::to_string(rows * cols) + " [re, im] pairs");
  std::vector<Complex> values;
  values.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ParseError(path + ".entries[" + std::to_string(i) + "]: expected [re, im]");
    values.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return ComplexMatrix(rows, cols, std::move(values));
}

json strategy_to_json(const Strategy& s) {
  json matrices = json::array();
  json src = matrix_to_json(s.source.density);
  src["role"] = "source_state";
  matrices.push_back(std::move(src));
  for (TimeSlice t : {TimeSlice::t1, TimeSlice::t2}) {
    const auto& obs = t == TimeSlice::t1 ? s.observables_t1 : s.observables_t2;
    for (std::size_t k = 0; k < obs.size(); ++k)
      for (int x : {0, 1}) {
        json m = matrix_to_json(obs[k][x]);
        m["role"] = "observable";
        m["party"] = k + 1;
        m["setting"] = x;
        m["time"] = static_cast<int>(t);
        matrices.push_back(std::move(m));
      }
  }
  json v = matrix_to_json(s.interaction.matrix);
  v["role"] = "interaction";
  matrices.push_back(std::move(v));
  return {{"schema_version", kStrategySchema},
          {"parties", s.parties()},
          {"dims", {{"t1", s.dims_t1()}, {"t2", s.dims_t2()}}},
          {"matrices", std::move(matrices)}};
}

Strategy strategy_from_json(const json& j) {
  const json& schema = require(j, "schema_version", "$");
  if (!schema.is_string() || schema.get<std::string>() != kStrategySchema)
    throw ParseError(std::string("$.schema_version: expected \"") + kStrategySchema + "\"");
  const std::size_t n = require_count(j, "parties", "$");
  if (n < 2) throw ParseError("$.parties: at least two parties required");
  const json& dims = require(j, "dims", "$");
  const Dims d1 = dims_from_json(require(dims, "t1", "$.dims"), "$.dims.t1");
  const Dims d2 = dims_from_json(require(dims, "t2", "$.dims"), "$.dims.t2");
  if (d1.size() != n || d2.size() != n) throw ParseError("$.dims: one dimension per party required");

  Strategy s;
  s.observables_t1.resize(n);
  s.observables_t2.resize(n);
  std::vector<bool> seen(4 * n, false);
  bool have_source = false, have_interaction = false;
  const json& matrices = require(j, "matrices", "$");
  if (!matrices.is_array()) throw ParseError("$.matrices: expected an array");
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const std::string path = "$.matrices[" + std::to_string(i) + "]";
    const json& m = matrices[i];
    const json& role = require(m, "role", path);
    if (!role.is_string()) throw ParseError(path + ".role: expected a string");
    const std::string r = role.get<std::string>();
    ComplexMatrix mat = matrix_from_json(m, path);
    if (r == "source_state") {
      s.source = QuantumState{std::move(mat), d1};
      have_source = true;
    } else if (r == "interaction") {
      s.interaction = Interaction{std::move(mat), d1, d2};
      have_interaction = true;
    } else if (r == "observable") {
      const std::size_t party = require_count(m, "party", path);
      const std::size_t setting = require_count(m, "setting", path);
      const std::size_t time = require_count(m, "time", path);
      if (party < 1 || party > n) throw ParseError(path + ".party: outside 1.." + std::to_string(n));
      if (setting > 1) throw ParseError(path + ".setting: expected 0 or 1");
      if (time != 1 && time != 2) throw ParseError(path + ".time: expected 1 or 2");
      const std::size_t slot = ((time - 1) * n + party - 1) * 2 + setting;
      if (seen[slot]) throw ParseError(path + ": duplicate observable");
      seen[slot] = true;
      (time == 1 ? s.observables_t1 : s.observables_t2)[party - 1][setting] = std::move(mat);
    } else {
      throw ParseError(path + ".role: unknown role \"" + r + "\"");
    }
  }
  if (!have_source) throw ParseError("$.matrices: no source_state");
  if (!have_interaction) throw ParseError("$.matrices: no interaction");
  for (std::size_t slot = 0; slot < seen.size(); ++slot)
    if (!seen[slot]) {
      const std::size_t setting = slot % 2, party = (slot / 2) % n + 1, time = slot / (2 * n) + 1;
      throw ParseError("$.matrices: missing observable (party " + std::to_string(party) + ", setting " +
                       std::to_string(setting) + ", time " + std::to_string(time) + ")");
    }
  s.validate();
  return s;
}

json record_to_json(const CorrelationRecord& r) {
  const std::size_t n = r.parties;
  json p2 = json::array();
  for (const auto& [key, table] : r.p2) {
    p2.push_back({{"settings", to_string(bits_of(key.settings, n))},
                  {"outcomes", to_string(bits_of(key.outcomes, n))},
                  {"probability", table.probability},
                  {"table", table.p2}});
  }
  json conditional = json::array();
  for (const auto& c : r.conditional_bell_values)
    conditional.push_back({{"outcomes", to_string(c.outcomes)},
                           {"value", c.value ? json(*c.value) : json(nullptr)}});
  json extra = nullptr;
  if (r.extra_stats) {
    extra = json::array();
    for (const auto& e : r.extra_stats->values)
      extra.push_back({{"label", e.label}, {"value", e.value}, {"target", e.target}});
  }
  return {{"schema_version", kRecordSchema},
          {"parties", n},
          {"p1", r.p1},
          {"p2", std::move(p2)},
          {"bell_values", {{"t1", r.bell_value_t1}, {"conditional", std::move(conditional)}}},
          {"extra_statistics", std::move(extra)}};
}

json report_to_json(const CertificationReport& r, const Provenance& p) {
  json rep;
  rep["parties"] = r.parties;
  rep["verdict"] = to_string(r.verdict);
  rep["reason"] = r.reason;
  rep["bell_checks"] = json::array();
  for (const auto& c : r.bell_checks) rep["bell_checks"].push_back(check_json(c));
  rep["extra_statistics"] = json::array();
  for (const auto& c : r.extra_statistics) rep["extra_statistics"].push_back(check_json(c));
  rep["projectivity_defects"] = json::array();
  for (const auto& d : r.projectivity_defects) {
    json c = check_json(d.defect, 0.0, tol::kCertification, d.defect < tol::kCertification);
    c["party"] = d.party + 1;
    c["time"] = time_name(d.slice);
    c["setting"] = d.setting;
    rep["projectivity_defects"].push_back(std::move(c));
  }
  rep["anticommutator_norms"] = json::array();
  for (const auto& a : r.anticommutator_norms) {
    json c = check_json(a.norm, 0.0, tol::kCertification, a.norm < tol::kCertification);
    c["party"] = a.party + 1;
    c["time"] = time_name(a.slice);
    rep["anticommutator_norms"].push_back(std::move(c));
  }
  rep["frames"] = json::array();
  for (const auto& f : r.frames) {
    rep["frames"].push_back({{"party", f.party + 1},
                             {"time", time_name(f.slice)},
                             {"aux_dim", f.aux_dim},
                             {"postcondition_residual",
                              check_json(f.postcondition_residual, 0.0, tol::kCertification,
                                         f.postcondition_residual < tol::kCertification)},
                             {"unitary", matrix_to_json(f.unitary)}});
  }
  rep["state_residual"] = r.state_residual
                              ? check_json(*r.state_residual, 0.0, tol::kCertification,
                                           *r.state_residual < tol::kCertification)
                              : json(nullptr);
  if (r.xi_min_eigenvalue) {
    json c = check_json(*r.xi_min_eigenvalue, 0.0, 1e-10, *r.xi_min_eigenvalue > 1e-10);
    c["criterion"] = "value > tolerance";
    rep["xi_min_eigenvalue"] = std::move(c);
  } else {
    rep["xi_min_eigenvalue"] = nullptr;
  }
  rep["xi"] = r.xi ? matrix_to_json(r.xi->density) : json(nullptr);
  if (r.interaction) {
    const auto& ic = *r.interaction;
    rep["interaction"] = {
        {"consistent", ic.consistent},
        {"failure", ic.failure},
        {"is_product", ic.is_product},
        {"proportionality_residual",
         check_json(ic.proportionality_residual, 0.0, kProportionalityTolerance,
                    ic.proportionality_residual <= kProportionalityTolerance)},
        {"cross_block_residual", check_json(ic.cross_block_residual, 0.0, kProportionalityTolerance,
                                            ic.cross_block_residual <= kProportionalityTolerance)},
        {"v0_unitarity_defect", check_json(ic.v0_unitarity_defect, 0.0, tol::kCertification,
                                           ic.v0_unitarity_defect < tol::kCertification)},
        {"residual",
         check_json(ic.residual, 0.0, tol::kCertification, ic.residual < tol::kCertification)},
        {"schmidt_coefficients", ic.schmidt_coefficients},
        {"recovered_v0", matrix_to_json(ic.recovered_v0)}};
  } else {
    rep["interaction"] = nullptr;
  }
  json prov = {{"input_digest", p.input_digest},
               {"seed", p.seed},
               {"tolerances",
                {{"bell", p.bell_tolerance},
                 {"identity", tol::kIdentity},
                 {"certification", tol::kCertification},
                 {"proportionality", kProportionalityTolerance},
                 {"xi_min_eigenvalue", 1e-10},
                 {"support", 1e-10}}}};
  return {{"schema_version", kReportSchema}, {"report", std::move(rep)}, {"provenance", std::move(prov)}};
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << contents;
}

Strategy load_strategy(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return strategy_from_json(j);
}

void save_strategy(const std::filesystem::path& path, const Strategy& s) {
  write_file(path, strategy_to_json(s).dump(1) + "\n");
}

}  // namespace qicert
