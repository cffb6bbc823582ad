#include <algorithm>
#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ssos/certify.hpp"
#include "ssos/kkt.hpp"
#include "ssos/sdp.hpp"

namespace ssos::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw InputError(where.empty() ? "/" : where, "expected an object");
  if (!j.contains(key)) throw InputError(where + "/" + key, "missing");
  return j.at(key);
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw InputError(where + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

Polynomial polynomial(const json& j, const std::vector<std::string>& names,
                      const std::string& where) {
  if (!j.is_string()) throw InputError(where, "expected polynomial text");
  try {
    return parse(j.get<std::string>(), names);
  } catch (const std::exception& e) {
    throw InputError(where, e.what());
  }
}

std::vector<Polynomial> polynomials(const json& j, const std::vector<std::string>& names,
                                    const std::string& where) {
  if (!j.is_array()) throw InputError(where, "expected an array of polynomials");
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(polynomial(j[i], names, where + "/" + std::to_string(i)));
  return out;
}

VarietySpec variety(const json& j, const std::vector<std::string>& names,
                    const std::string& where) {
  VarietySpec V;
  V.nvars = names.size();
  V.varnames = names;
  V.generators = polynomials(require(j, "generators", where), names, where + "/generators");
  if (j.contains("dimension")) {
    const json& d = j.at("dimension");
    if (!d.is_number_unsigned()) throw InputError(where + "/dimension", "expected a count");
    V.dimension = d.get<unsigned>();
  }
  try {
    V.validate();
  } catch (const std::exception& e) {
    throw InputError(where, e.what());
  }
  return V;
}

template <typename T>
T number(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw InputError(where + "/" + key, "expected a number");
  } else {
    if (!v.is_number_unsigned()) throw InputError(where + "/" + key, "expected a count");
  }
  return v.get<T>();
}

json polynomial_list(const std::vector<Polynomial>& ps, const std::vector<std::string>& names) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(to_string(p, names));
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Problem parse_problem(const json& j) {
  Problem p;
  p.source = j;
  p.varnames = string_list(require(j, "variables", ""), "/variables");
  if (p.varnames.empty()) throw InputError("/variables", "at least one variable is required");
  p.objective = polynomial(require(j, "objective", ""), p.varnames, "/objective");

  const bool has_variety = j.contains("variety");
  const bool has_ineq = j.contains("inequalities");
  if (has_variety == has_ineq)
    throw InputError("", "exactly one of \"variety\" and \"inequalities\" is required");
  if (has_variety) p.variety = variety(j.at("variety"), p.varnames, "/variety");
  if (has_ineq) p.inequalities = polynomials(j.at("inequalities"), p.varnames, "/inequalities");

  if (j.contains("morphism")) {
    if (!has_variety) throw InputError("/morphism", "a morphism requires a variety");
    const json& m = j.at("morphism");
    try {
      if (m.is_string()) {
        p.morphism = catalog(m.get<std::string>());
      } else {
        ResolutionMorphism phi;
        phi.name = m.value("name", std::string("custom"));
        const json& src = require(m, "source", "/morphism");
        const auto names = string_list(require(src, "variables", "/morphism/source"),
                                       "/morphism/source/variables");
        phi.source = variety(src, names, "/morphism/source");
        phi.target = *p.variety;
        phi.components =
            polynomials(require(m, "components", "/morphism"), names, "/morphism/components");
        phi.sampler = m.value("sampler", std::string("box"));
        p.morphism = std::move(phi);
      }
      p.morphism->validate();
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError("/morphism", e.what());
    }
    if (p.morphism->target.nvars != p.varnames.size())
      throw InputError("/morphism", "target dimension does not match the variables");
  }

  if (j.contains("options")) {
    const json& o = j.at("options");
    if (!o.is_object()) throw InputError("/options", "expected an object");
    p.options.k_min = number<unsigned>(o, "k_min", p.options.k_min, "/options");
    p.options.k_max = number<unsigned>(o, "k_max", p.options.k_max, "/options");
    p.options.samples = static_cast<int>(number<unsigned>(o, "samples", 500, "/options"));
    p.options.seed = number<std::uint64_t>(o, "seed", 0, "/options");
    auto& s = p.options.hierarchy.solver;
    s.tol_gap = number<double>(o, "tol_gap", s.tol_gap, "/options");
    s.tol_feas = number<double>(o, "tol_feas", s.tol_feas, "/options");
    if (p.options.k_min > p.options.k_max) throw InputError("/options", "k_min > k_max");
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

PreparedProblem prepare(const Problem& p) {
  PreparedProblem out;
  if (p.morphism) {
    out.h0 = pullback(p.objective, *p.morphism);
    out.generators = p.morphism->source.generators;
    out.varnames = p.morphism->source.names();
  } else if (p.inequalities) {
    const SlackProblem s = slack_transform(p.objective, *p.inequalities);
    out.h0 = s.h0;
    out.generators = s.h;
    out.varnames = p.varnames;
    for (std::size_t j = 0; j < p.inequalities->size(); ++j)
      out.varnames.push_back("z" + std::to_string(j + 1));
  } else {
    out.h0 = p.objective;
    out.generators = p.variety->generators;
    out.varnames = p.varnames;
  }
  return out;
}

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Converged:
      return "converged";
    case ReportStatus::NotConverged:
      return "not-converged";
    case ReportStatus::InfeasibleKkt:
      return "infeasible-kkt";
  }
  return "?";
}

ReportStatus report_status(const PipelineReport& rep) {
  if (rep.hierarchy.any_infeasible()) return ReportStatus::InfeasibleKkt;
  if (rep.hierarchy.converged && !rep.exceeds_sampled) return ReportStatus::Converged;
  return ReportStatus::NotConverged;
}

int exit_code(ReportStatus s) {
  switch (s) {
    case ReportStatus::Converged:
      return kConverged;
    case ReportStatus::NotConverged:
      return kNotConverged;
    case ReportStatus::InfeasibleKkt:
      return kInfeasibleKkt;
  }
  return kInputError;
}

json solve_report(const Problem& p, const std::optional<std::string>& certificate_path) {
  const auto start = std::chrono::steady_clock::now();
  PipelineReport rep;
  if (p.morphism) {
    rep = solve_singular(*p.variety, p.objective, *p.morphism, p.options);
  } else {
    const PreparedProblem prep = prepare(p);
    VarietySpec V;
    V.nvars = prep.varnames.size();
    V.varnames = prep.varnames;
    V.generators = prep.generators;
    rep = solve_direct(V, prep.h0, p.options);
  }
  const ReportStatus status = report_status(rep);

  json r;
  r["tool"] = "singular-sos";
  r["version"] = kVersion;
  r["problem"] = p.source;
  r["status"] = to_string(status);
  r["exit_code"] = exit_code(status);
  r["value"] = rep.hierarchy.value ? json(*rep.hierarchy.value) : json(nullptr);
  r["converged"] = rep.hierarchy.converged;
  r["converged_order"] =
      rep.hierarchy.converged_order ? json(*rep.hierarchy.converged_order) : json(nullptr);
  r["morphism"] = rep.morphism.empty() ? json(nullptr) : json(rep.morphism);
  r["assumptions"] = rep.assumptions;
  std::string banner = "UNVERIFIED ASSUMPTIONS:";
  for (const auto& a : rep.assumptions) banner += " [" + a + "]";
  r["banner"] = banner;

  json caveats = json::array();
  if (status == ReportStatus::InfeasibleKkt)
    caveats.push_back(
        "the KKT relaxation is infeasible: no real point satisfies the KKT system, so the "
        "infimum is not attained at a KKT point and the relaxation cannot reach it");
  if (rep.exceeds_sampled)
    caveats.push_back(
        "the relaxation value exceeds an objective value seen at a sampled feasible point; the "
        "infimum is not attained at a KKT point and the reported value is not the infimum");
  r["caveats"] = caveats;

  r["kkt"] = {{"variables", rep.kkt_varnames},
              {"objective", to_string(rep.kkt.objective, rep.kkt_varnames)},
              {"polynomials", polynomial_list(rep.kkt.polynomials, rep.kkt_varnames)}};
  r["pulled_back_objective"] = to_string(rep.h0, rep.varnames);

  json orders = json::array();
  for (const auto& o : rep.hierarchy.orders) {
    const bool ok = o.tau_status == RelaxationStatus::Optimal;
    orders.push_back({{"k", o.k},
                      {"tau_status", ssos::to_string(o.tau_status)},
                      {"rho_status", ssos::to_string(o.rho_status)},
                      {"tau", ok ? finite_or_null(o.tau) : json(nullptr)},
                      {"rho", ok ? finite_or_null(o.rho) : json(nullptr)},
                      {"moment_size", o.moment_size},
                      {"reduced_variables", o.reduced_variables},
                      {"equations", o.equations},
                      {"seconds", o.seconds},
                      {"detail", o.detail}});
  }
  r["orders"] = orders;
  r["sampled_minimum"] = rep.sampled_minimum ? json(*rep.sampled_minimum) : json(nullptr);
  r["samples_used"] = rep.samples_used;
  r["exceeds_sampled"] = rep.exceeds_sampled;
  r["bounds"] = {{"n", rep.bounds.n},
                 {"d", rep.bounds.d},
                 {"l", rep.bounds.l},
                 {"w_c_branch", rep.bounds.w.c_branch.to_string()},
                 {"w_b_branch", rep.bounds.w.b_branch.to_string()},
                 {"w", rep.bounds.w.value.to_string()},
                 {"r", rep.bounds.r.to_string()},
                 {"cardinality", rep.bounds.cardinality.get_str()}};

  // Orders of the agreeing pair first, then the rest from the top down; the
  // first certificate that verifies is reported.
  std::vector<const OrderRecord*> candidates;
  for (auto it = rep.hierarchy.orders.rbegin(); it != rep.hierarchy.orders.rend(); ++it)
    if (it->tau_status == RelaxationStatus::Optimal) candidates.push_back(&*it);
  if (rep.hierarchy.converged_order) {
    const unsigned lo = *rep.hierarchy.converged_order;
    std::stable_partition(candidates.begin(), candidates.end(), [lo](const OrderRecord* o) {
      return o->k == lo + 1 || o->k == lo;
    });
  }
  const OrderRecord* best = nullptr;
  SOSCertificate cert;
  VerificationReport v;
  for (const OrderRecord* o : candidates) {
    SOSCertificate c = make_certificate(o->dual);
    VerificationReport vc = verify_certificate(c, rep.kkt.objective, rep.kkt.polynomials);
    if (!best || (vc.pass && !v.pass)) {
      best = o;
      cert = std::move(c);
      v = std::move(vc);
    }
    if (v.pass) break;
  }
  if (best) {
    json c = {{"order", best->k},
              {"xi", cert.xi},
              {"residual_norm", v.max_residual_value},
              {"gram_min_eigenvalue", v.gram_min_eigenvalue},
              {"pass", v.pass},
              {"file", nullptr}};
    if (certificate_path) {
      std::ofstream out(*certificate_path);
      if (!out) throw std::runtime_error("cannot write '" + *certificate_path + "'");
      out << certificate_to_json(cert, rep.kkt_varnames, v.max_residual_value) << '\n';
      c["file"] = *certificate_path;
    }
    r["certificate"] = c;
  } else {
    r["certificate"] = nullptr;
  }
  r["timings"] = {
      {"total_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

int cmd_solve(const std::string& path, const std::optional<std::uint64_t>& seed,
              const std::string& output, std::string certificate, std::ostream& out) {
  Problem p = load_problem(path);
  if (seed) p.options.seed = *seed;
  if (certificate.empty() && !output.empty()) {
    const auto dot = output.rfind(".json");
    certificate = (dot == std::string::npos ? output : output.substr(0, dot)) + ".cert.json";
  }
  const json r = solve_report(p, certificate.empty() ? std::nullopt
                                                     : std::optional<std::string>(certificate));
  write_text(r.dump(2) + "\n", output, out);
  return r.at("exit_code").get<int>();
}

int cmd_kkt(const std::string& path, std::ostream& out) {
  const PreparedProblem prep = prepare(load_problem(path));
  const KKTSystem sys = build_kkt(prep.h0, prep.generators);
  const auto names = sys.varnames(prep.varnames);
  out << "variables:";
  for (const auto& n : names) out << ' ' << n;
  out << "\nobjective: " << to_string(sys.objective, names) << '\n';
  for (std::size_t i = 0; i < sys.polynomials.size(); ++i)
    out << "h" << i + 1 << ": " << to_string(sys.polynomials[i], names) << '\n';
  return 0;
}

int cmd_singular_locus(const std::string& path, std::ostream& out) {
  const Problem p = load_problem(path);
  if (!p.variety) throw InputError("/variety", "singular-locus requires a variety");
  if (!p.variety->dimension) throw InputError("/variety/dimension", "missing");
  SingularSystem s;
  try {
    s = singular_system(*p.variety);
  } catch (const std::exception& e) {
    throw InputError("/variety", e.what());
  }
  out << "minor order: " << s.order << '\n';
  if (s.minors_empty) out << "no minors of that order exist; the system is h alone\n";
  for (std::size_t i = 0; i < s.system.generators.size(); ++i)
    out << "g" << i + 1 << ": " << to_string(s.system.generators[i], p.varnames) << '\n';
  return 0;
}

int cmd_pullback(const std::string& path, std::ostream& out) {
  const Problem p = load_problem(path);
  if (!p.morphism) throw InputError("/morphism", "pullback requires a morphism");
  out << to_string(pullback(p.objective, *p.morphism), p.morphism->source.names()) << '\n';
  return 0;
}

int cmd_bounds(unsigned long n, unsigned long d, unsigned long l, std::ostream& out) {
  if (d < 2) throw InputError("", "d must be at least 2");
  const WBound w = w_bound(n, d, l);
  out << "n = " << n << ", d = " << d << ", l = " << l << '\n';
  out << "bit(d) = " << bit(BigInt(d)) << '\n';
  out << "c(n+l, d, n+l) = " << c_bound(n + l, BigInt(d), n + l).get_str() << '\n';
  out << "w c-branch = " << w.c_branch.to_string() << '\n';
  out << "w b-branch = " << w.b_branch.to_string() << '\n';
  out << "w = " << w.value.to_string() << '\n';
  out << "r = " << r_bound(n, d, l, w.value).to_string() << '\n';
  out << "cardinality = " << cardinality_bound(n, d, l).get_str() << '\n';
  return 0;
}

int cmd_certify(const std::string& problem, const std::string& certificate, double tol,
                std::ostream& out) {
  const PreparedProblem prep = prepare(load_problem(problem));
  const KKTSystem sys = build_kkt(prep.h0, prep.generators);
  const auto names = sys.varnames(prep.varnames);
  std::ifstream in(certificate);
  if (!in) throw InputError("", "cannot open '" + certificate + "'");
  std::stringstream text;
  text << in.rdbuf();
  RationalCertificate cert;
  try {
    cert = certificate_from_json(text.str(), names);
  } catch (const std::invalid_argument& e) {
    throw InputError("", std::string("certificate ") + e.what());
  }
  VerificationReport v;
  try {
    v = verify_certificate(cert, sys.objective, sys.polynomials, tol);
  } catch (const std::invalid_argument& e) {
    throw InputError("", e.what());
  }
  const json r = {{"pass", v.pass},
                  {"xi", cert.xi.get_d()},
                  {"max_residual", v.max_residual_value},
                  {"max_residual_exact", ssos::to_string(v.max_residual)},
                  {"gram_min_eigenvalue", v.gram_min_eigenvalue},
                  {"tolerance", tol}};
  out << r.dump(2) << '\n';
  return v.pass ? 0 : kCertificateFailed;
}

int cmd_export_sdp(const std::string& path, unsigned k, const std::string& output,
                   std::ostream& out) {
  const PreparedProblem prep = prepare(load_problem(path));
  const KKTSystem sys = build_kkt(prep.h0, prep.generators);
  MomentRelaxation rel;
  try {
    rel = build_relaxation(sys.objective, sys.polynomials, k);
  } catch (const OrderTooSmall& e) {
    throw InputError("--order", e.what());
  }
  const ReducedRelaxation red = reduce(rel);
  if (!red.consistent) throw std::runtime_error("relaxation at order " + std::to_string(k) +
                                                " is infeasible; nothing to export");
  std::ostringstream text;
  write_sdpa(text, red.lmi);
  write_text(text.str(), output, out);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment-SOS relaxations over singular real varieties", "singular-sos"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Seed for all sampling (default: problem file, else 0)");
  app.set_version_flag("--version", kVersion);

  std::string problem, output, certificate;
  auto* solve = app.add_subcommand("solve", "Run the relaxation hierarchy and write a report");
  solve->add_option("problem", problem, "Problem JSON file")->required();
  solve->add_option("-o,--output", output, "Report file (default: stdout)");
  solve->add_option("--certificate", certificate,
                    "Certificate file (default: next to the report when -o is given)");

  auto* kkt = app.add_subcommand("kkt", "Print the KKT system");
  kkt->add_option("problem", problem)->required();
  auto* locus = app.add_subcommand("singular-locus", "Print the singular-locus system");
  locus->add_option("problem", problem)->required();
  auto* pull = app.add_subcommand("pullback", "Print the pulled-back objective");
  pull->add_option("problem", problem)->required();

  unsigned long bn = 0, bd = 0, bl = 0;
  auto* bounds = app.add_subcommand("bounds", "Print the degree-bound table");
  bounds->add_option("n", bn)->required();
  bounds->add_option("d", bd)->required();
  bounds->add_option("l", bl)->required();

  double tol = 1e-7;
  auto* cert = app.add_subcommand("certify", "Verify a certificate against a problem");
  cert->add_option("problem", problem)->required();
  cert->add_option("certificate", certificate)->required();
  cert->add_option("--tol", tol, "Residual and eigenvalue tolerance");

  unsigned order = 0;
  auto* exp = app.add_subcommand("export-sdp", "Write the reduced LMI in SDPA sparse format");
  exp->add_option("problem", problem)->required();
  exp->add_option("-k,--order", order, "Relaxation order")->required();
  exp->add_option("-o,--output", output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*solve) return cmd_solve(problem, seed, output, certificate, out);
    if (*kkt) return cmd_kkt(problem, out);
    if (*locus) return cmd_singular_locus(problem, out);
    if (*pull) return cmd_pullback(problem, out);
    if (*bounds) return cmd_bounds(bn, bd, bl, out);
    if (*cert) return cmd_certify(problem, certificate, tol, out);
    if (*exp) return cmd_export_sdp(problem, order, output, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace ssos::cli
