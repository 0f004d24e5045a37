// qicert: command-line front end for the two-time interaction certifier.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qicert/certifier.hpp"
#include "qicert/io.hpp"
#include "qicert/seesaw.hpp"

namespace {

using namespace qicert;
using nlohmann::json;

constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  double tolerance = tol::kIdentity;
  std::string format = "human";
  bool machine() const { return format == "machine"; }
};

struct Input {
  std::string file;
  std::size_t reference_parties = 0;
};

void add_input_options(CLI::App* cmd, Input& in) {
  cmd->add_option("strategy", in.file, "Strategy file (qicert.strategy/1 JSON)");
  cmd->add_option("--reference", in.reference_parties,
                  "Use the built-in reference strategy for this many parties instead of a file");
}

struct LoadedStrategy {
  Strategy strategy;
  std::string digest;
};

LoadedStrategy load_input(const Input& in) {
  if (!in.file.empty() && in.reference_parties != 0)
    throw UsageError("give either a strategy file or --reference, not both");
  if (!in.file.empty()) {
    const std::string text = read_file(in.file);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(in.file + ": " + e.what());
    }
    return {strategy_from_json(j), "fnv1a64:" + fnv1a64_hex(text)};
  }
  if (in.reference_parties == 0) throw UsageError("a strategy file or --reference N is required");
  if (in.reference_parties < 2 || in.reference_parties > kMaxEnumerationParties)
    throw UsageError("--reference: parties must be in 2.." + std::to_string(kMaxEnumerationParties));
  Strategy s = reference_strategy(in.reference_parties);
  return {s, "fnv1a64:" + fnv1a64_hex(strategy_to_json(s).dump())};
}

/// Explicit path, else $QICERT_OUTPUT_DIR/default_name, else none.
std::optional<std::filesystem::path> output_path(const std::string& explicit_path,
                                                 const std::string& default_name) {
  if (!explicit_path.empty()) return std::filesystem::path(explicit_path);
  if (const char* dir = std::getenv("QICERT_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / default_name;
  return std::nullopt;
}

std::string fixed(double v, int digits = 8) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

// ---- bounds -------------------------------------------------------------

int cmd_bounds(const Globals& g, std::size_t parties) {
  if (parties < 2 || parties > kMaxEnumerationParties)
    throw UsageError("bounds: parties must be in 2.." + std::to_string(kMaxEnumerationParties));
  const BellExpression expr = BellExpression::all_zero(parties);
  const double beta_c = classical_bound(expr);
  const Strategy ref = reference_strategy(parties);
  const double achieved = quantum_value(ref.source, ref.observables_t1, expr);
  if (g.machine()) {
    std::cout << json{{"parties", parties},
                      {"beta_c_enumerated", beta_c},
                      {"beta_c_closed_form", expr.classical_bound()},
                      {"beta_q", expr.quantum_bound()},
                      {"reference_value", achieved}}
                     .dump(2)
              << "\n";
    return 0;
  }
  std::cout << "Bell expression " << expr.name() << " (N = " << parties << ")\n"
            << "  classical bound (enumerated): " << fixed(beta_c) << "\n"
            << "  quantum bound:                " << fixed(expr.quantum_bound()) << "\n"
            << "  reference strategy achieves:  " << fixed(achieved) << "\n";
  return 0;
}

// ---- generate -----------------------------------------------------------

struct GenerateArgs {
  std::size_t parties = 2;
  std::vector<std::size_t> aux_dims;
  std::uint64_t seed = 1;
  std::string deviation = "none";
  double phase = 1.0;
  double visibility = 1.0;
  bool rank_deficient_xi = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.parties < 2 || a.parties > kMaxEnumerationParties)
    throw UsageError("generate: parties must be in 2.." + std::to_string(kMaxEnumerationParties));
  if (!(a.visibility >= 0.0 && a.visibility <= 1.0))
    throw UsageError("generate: --visibility must lie in [0, 1]");
  Strategy s = reference_strategy(a.parties);
  if (a.deviation == "swap") s = with_interaction(s, deviation::swapped_interaction(a.parties));
  else if (a.deviation == "diag-phase")
    s = with_interaction(s, deviation::diag_phase_interaction(a.parties, a.phase));
  else if (a.deviation == "identity")
    s = with_interaction(s, ComplexMatrix::identity(std::size_t{1} << a.parties));
  if (a.visibility < 1.0) s = with_visibility(s, a.visibility);
  if (!a.aux_dims.empty()) {
    const auto& aux = a.aux_dims;
    if (aux.size() != a.parties)
      throw UsageError("generate: --aux-dims needs one entry per party");
    s = scramble_strategy(s, aux, a.seed, {a.rank_deficient_xi}).strategy;
  } else if (a.rank_deficient_xi) {
    throw UsageError("generate: --rank-deficient-xi needs --aux-dims");
  }
  const std::string text = strategy_to_json(s).dump(1) + "\n";
  if (auto path = output_path(a.out, "strategy.json")) {
    write_file(*path, text);
    std::cerr << "wrote " << path->string() << "\n";
  } else {
    std::cout << text;
  }
  return 0;
}

// ---- simulate -----------------------------------------------------------

void print_record_summary(const CorrelationRecord& r) {
  const std::size_t n = r.parties;
  const double beta_q = 2.0 * static_cast<double>(n - 1);
  std::cout << "Bell values (beta_Q = " << fixed(beta_q, 4) << ")\n";
  std::cout << "  " << std::left << std::setw(16) << BellExpression::all_zero(n).name() + " @ t1"
            << fixed(r.bell_value_t1) << "\n";
  for (const auto& c : r.conditional_bell_values) {
    std::cout << "  " << std::setw(16) << BellExpression(c.outcomes).name() + " @ t2"
              << (c.value ? fixed(*c.value) : std::string("(branch impossible)")) << "\n";
  }
  std::cout << "Extra statistics (settings " << to_string(extra_statistics_settings(n))
            << ", outcomes " << to_string(Bits(n, 0)) << ")\n";
  if (!r.extra_stats) {
    std::cout << "  (event impossible)\n";
    return;
  }
  for (const auto& e : r.extra_stats->values)
    std::cout << "  " << std::setw(28) << e.label << fixed(e.value) << "  target "
              << fixed(e.target, 1) << "\n";
  std::cout << std::right;
}

int cmd_simulate(const Globals& g, const Input& in, const std::string& out) {
  const LoadedStrategy loaded = load_input(in);
  const CorrelationRecord rec = run_scenario(loaded.strategy);
  const json j = record_to_json(rec);
  if (auto path = output_path(out, "record.json")) write_file(*path, j.dump(1) + "\n");
  if (g.machine()) std::cout << j.dump(2) << "\n";
  else print_record_summary(rec);
  return 0;
}

// ---- certify ------------------------------------------------------------

void print_report(const CertificationReport& r) {
  std::cout << "Verdict: " << to_string(r.verdict) << " (" << r.reason << ")\n";
  auto row = [](const std::string& name, double value, double tolerance, bool pass) {
    std::cout << "  " << std::left << std::setw(34) << name << std::right << std::setw(14)
              << fixed(value, 10) << "  tol " << sci(tolerance) << "  " << (pass ? "ok" : "FAIL")
              << "\n";
  };
  if (!r.bell_checks.empty()) std::cout << "Bell checks\n";
  for (const auto& c : r.bell_checks) row(c.name, c.value, c.tolerance, c.pass);
  if (!r.extra_statistics.empty()) std::cout << "Extra statistics\n";
  for (const auto& c : r.extra_statistics) row(c.name, c.value, c.tolerance, c.pass);
  double worst_proj = 0.0, worst_anti = 0.0;
  for (const auto& d : r.projectivity_defects) worst_proj = std::max(worst_proj, d.defect);
  for (const auto& a : r.anticommutator_norms) worst_anti = std::max(worst_anti, a.norm);
  if (!r.projectivity_defects.empty()) {
    std::cout << "Structure\n";
    row("max projectivity defect", worst_proj, tol::kCertification, worst_proj < tol::kCertification);
  }
  if (!r.anticommutator_norms.empty())
    row("max anticommutator norm", worst_anti, tol::kCertification, worst_anti < tol::kCertification);
  for (const auto& f : r.frames)
    row("frame party " + std::to_string(f.party + 1) + (f.slice == TimeSlice::t1 ? " t1" : " t2") +
            " (aux " + std::to_string(f.aux_dim) + ")",
        f.postcondition_residual, tol::kCertification, f.postcondition_residual < tol::kCertification);
  if (r.state_residual)
    row("source state residual", *r.state_residual, tol::kCertification,
        *r.state_residual < tol::kCertification);
  if (r.xi_min_eigenvalue)
    row("xi min eigenvalue (> tol)", *r.xi_min_eigenvalue, 1e-10, *r.xi_min_eigenvalue > 1e-10);
  if (r.interaction) {
    const auto& ic = *r.interaction;
    std::cout << "Interaction\n";
    row("block proportionality", ic.proportionality_residual, kProportionalityTolerance,
        ic.proportionality_residual <= kProportionalityTolerance);
    row("cross-block equality", ic.cross_block_residual, kProportionalityTolerance,
        ic.cross_block_residual <= kProportionalityTolerance);
    row("V0 unitarity defect", ic.v0_unitarity_defect, tol::kCertification,
        ic.v0_unitarity_defect < tol::kCertification);
    row("||W' - U_ref (x) V0||", ic.residual, tol::kCertification, ic.residual < tol::kCertification);
    std::cout << "  product form: " << (ic.is_product ? "yes" : "no") << ", V0 is "
              << shape_string(ic.recovered_v0) << "\n";
  }
}

int cmd_certify(const Globals& g, const Input& in, const std::string& out, std::uint64_t seed) {
  const LoadedStrategy loaded = load_input(in);
  const CertificationReport rep = run_full_certification(loaded.strategy, g.tolerance);
  const json j = report_to_json(rep, {loaded.digest, seed, g.tolerance});
  if (auto path = output_path(out, "report.json")) write_file(*path, j.dump(1) + "\n");
  if (g.machine()) std::cout << j.dump(2) << "\n";
  else print_report(rep);
  return exit_code_for(rep.verdict);
}

// ---- noise-sweep --------------------------------------------------------

int cmd_noise_sweep(const Globals& g, const Input& in, std::vector<double> visibilities,
                    std::size_t steps, const std::string& out) {
  if (visibilities.empty()) {
    if (steps < 2) throw UsageError("noise-sweep: --steps must be at least 2");
    for (std::size_t i = 0; i < steps; ++i)
      visibilities.push_back(static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  for (double v : visibilities)
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("noise-sweep: visibility " + std::to_string(v) + " outside [0, 1]");
  const LoadedStrategy loaded = load_input(in);
  json rows = json::array();
  if (!g.machine())
    std::cout << std::setw(10) << "v" << std::setw(16) << "B(t1)" << std::setw(16) << "min B(t2)"
              << "  verdict\n";
  for (double v : visibilities) {
    const Strategy s = with_visibility(loaded.strategy, v);
    const CorrelationRecord rec = run_scenario(s);
    std::optional<double> min_t2;
    for (const auto& c : rec.conditional_bell_values)
      if (c.value) min_t2 = min_t2 ? std::min(*min_t2, *c.value) : *c.value;
    const Verdict verdict = run_full_certification(s, g.tolerance).verdict;
    rows.push_back({{"visibility", v},
                    {"bell_t1", rec.bell_value_t1},
                    {"min_bell_t2", min_t2 ? json(*min_t2) : json(nullptr)},
                    {"verdict", to_string(verdict)}});
    if (!g.machine())
      std::cout << std::setw(10) << fixed(v, 4) << std::setw(16) << fixed(rec.bell_value_t1)
                << std::setw(16) << (min_t2 ? fixed(*min_t2) : std::string("-")) << "  "
                << to_string(verdict) << "\n";
  }
  const json j{{"schema_version", "qicert.noise-sweep/1"}, {"input_digest", loaded.digest}, {"rows", rows}};
  if (auto path = output_path(out, "noise_sweep.json")) write_file(*path, j.dump(1) + "\n");
  if (g.machine()) std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- seesaw -------------------------------------------------------------

int cmd_seesaw(const Globals& g, std::size_t parties, std::vector<std::size_t> dims, std::size_t seeds,
               std::uint64_t seed, std::size_t max_iters, const std::string& out) {
  if (parties < 2 || parties > kMaxEnumerationParties)
    throw UsageError("seesaw: parties must be in 2.." + std::to_string(kMaxEnumerationParties));
  if (dims.empty()) dims.assign(parties, 2);
  if (dims.size() != parties) throw UsageError("seesaw: --dims needs one entry per party");
  SeesawConfig cfg;
  cfg.local_dims = dims;
  cfg.restarts = seeds;
  cfg.seed = seed;
  cfg.max_iters = max_iters;
  try {
    cfg.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  const BellExpression expr = BellExpression::all_zero(parties);
  const SeesawResult res = seesaw_maximize(expr, cfg);
  if (auto path = output_path(out, "seesaw_strategy.json")) save_strategy(*path, res.strategy_found());
  if (g.machine()) {
    std::cout << json{{"best_value", res.best_value},
                      {"beta_q", expr.quantum_bound()},
                      {"restart_values", res.restart_values},
                      {"best_seed", res.best.seed}}
                     .dump(2)
              << "\n";
    return 0;
  }
  std::cout << "Seesaw on " << expr.name() << ", local dims";
  for (auto d : dims) std::cout << " " << d;
  std::cout << ", " << seeds << " restarts\n";
  for (std::size_t r = 0; r < res.restart_values.size(); ++r)
    std::cout << "  seed " << std::setw(6) << seed + r << "  " << fixed(res.restart_values[r], 12) << "\n";
  std::cout << "best " << fixed(res.best_value, 12) << " (beta_Q = " << fixed(expr.quantum_bound(), 4)
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent certification of an entangling interaction between two time steps"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tolerance", g.tolerance, "Tolerance for maximal Bell values and extra statistics")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"human", "machine"}));

  std::size_t bounds_parties = 2;
  auto* bounds = app.add_subcommand("bounds", "Classical and quantum bounds of the Bell expression");
  bounds->add_option("-N,--parties", bounds_parties, "Number of parties")->required();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a reference, scrambled or deviating strategy");
  generate->add_option("-N,--parties", gen.parties, "Number of parties");
  generate->add_option("--aux-dims", gen.aux_dims, "Aux dimension per party (scrambles the strategy)")
      ->delimiter(',');
  generate->add_option("--seed", gen.seed, "Seed for the scrambling unitaries");
  generate->add_option("--deviation", gen.deviation, "Planted deviation of the interaction")
      ->check(CLI::IsMember({"none", "swap", "diag-phase", "identity"}));
  generate->add_option("--phase", gen.phase, "Phase of the diag-phase deviation");
  generate->add_option("--visibility", gen.visibility, "White-noise visibility of the source");
  generate->add_flag("--rank-deficient-xi", gen.rank_deficient_xi, "Plant a rank-deficient aux state");
  generate->add_option("-o,--out", gen.out, "Output file");

  Input sim_in;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Compute the correlation record of a strategy");
  add_input_options(simulate, sim_in);
  simulate->add_option("-o,--out", sim_out, "Record file");

  Input cert_in;
  std::string cert_out;
  std::uint64_t cert_seed = 0;
  auto* certify = app.add_subcommand("certify", "Run the full certification (exit 0/1/3)");
  add_input_options(certify, cert_in);
  certify->add_option("-o,--out", cert_out, "Report file");
  certify->add_option("--seed", cert_seed, "Seed recorded in the report provenance");

  Input sweep_in;
  std::vector<double> visibilities;
  std::size_t steps = 11;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("noise-sweep", "Bell values and verdicts under white noise");
  add_input_options(sweep, sweep_in);
  sweep->add_option("--visibilities", visibilities, "Comma-separated visibilities")->delimiter(',');
  sweep->add_option("--steps", steps, "Evenly spaced visibilities from 0 to 1");
  sweep->add_option("-o,--out", sweep_out, "Table file");

  std::size_t ss_parties = 2, ss_seeds = 20, ss_iters = 300;
  std::uint64_t ss_seed = 1;
  std::vector<std::size_t> ss_dims;
  std::string ss_out;
  auto* seesaw = app.add_subcommand("seesaw", "Seesaw maximization of the Bell expression");
  seesaw->add_option("-N,--parties", ss_parties, "Number of parties");
  seesaw->add_option("--dims", ss_dims, "Local dimension per party")->delimiter(',');
  seesaw->add_option("--seeds", ss_seeds, "Number of restarts");
  seesaw->add_option("--seed", ss_seed, "First restart seed");
  seesaw->add_option("--max-iters", ss_iters, "Iterations per restart");
  seesaw->add_option("-o,--out", ss_out, "Best strategy file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*bounds) return cmd_bounds(g, bounds_parties);
    if (*generate) return cmd_generate(gen);
    if (*simulate) return cmd_simulate(g, sim_in, sim_out);
    if (*certify) return cmd_certify(g, cert_in, cert_out, cert_seed);
    if (*sweep) return cmd_noise_sweep(g, sweep_in, visibilities, steps, sweep_out);
    if (*seesaw) return cmd_seesaw(g, ss_parties, ss_dims, ss_seeds, ss_seed, ss_iters, ss_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid strategy: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "invalid strategy: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
