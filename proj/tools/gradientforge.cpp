#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "gforge/bundle_io.hpp"
#include "gforge/error.hpp"
#include "gforge/finite_difference.hpp"
#include "gforge/ft_cost.hpp"
#include "gforge/md_noise.hpp"
#include "gforge/nisq_cost.hpp"
#include "gforge/operator_core.hpp"
#include "gforge/pipeline.hpp"
#include "gforge/planewave.hpp"
#include "gforge/qubit_rep.hpp"

using namespace gforge;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kBohrAngstrom = 0.529177210903;
constexpr double kHaBohrToMhaAngstrom = 1000.0 / kBohrAngstrom;

// writes to path, or stdout for "" / "-"
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoFailure, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::IoFailure, "write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::IoFailure, "cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, path + ": " + e.what());
  }
}

std::string dump(json j) {
  j["schema_version"] = kSchemaVersion;
  return j.dump(2) + "\n";
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void apply_thread_cap() {
  if (const char* env = std::getenv("GRADIENTFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

// --- subcommands -----------------------------------------------------------

int cmd_validate(const std::string& dir, const std::string& out) {
  const IntegralBundle b = read_bundle(dir);
  const SumRuleReport sr = validate_sum_rules(b);
  json j;
  j["bundle"] = dir;
  j["status"] = "pass";
  j["n_spatial"] = b.n_spatial;
  j["n_electrons"] = b.n_electrons;
  j["n_atoms"] = b.geometry.n_atoms();
  j["sum_rule_worst"] = sr.worst();
  emit(out, dump(j));
  return 0;
}

int cmd_operators(const std::string& dir, const std::string& out, const std::string& pauli_dir) {
  const IntegralBundle b = read_bundle(dir);
  std::vector<FermionOp> ops;
  ops.push_back(build_hamiltonian(b));
  for (auto& f : build_all_force_operators(b)) ops.push_back(std::move(f));
  json arr = json::array();
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const FermionOp& op = ops[k];
    const PauliPolynomial p = jordan_wigner(op);
    const MajoranaPolynomial m = to_majorana(op);
    arr.push_back({{"label", op.label},
                   {"symmetry_violation", max_symmetry_violation(op)},
                   {"pauli_terms", p.terms.size()},
                   {"induced_one_norm", induced_one_norm(p)},
                   {"majorana_two_norm", std::sqrt(m.two_norm_sq())}});
    if (!pauli_dir.empty()) {
      const std::string name = k == 0 ? "H" : "F" + std::to_string(k - 1);
      std::ostringstream s;
      write_pauli_csv(p, s);
      emit(pauli_dir + "/" + name + ".csv", s.str());
    }
  }
  emit(out, dump({{"bundle", dir}, {"operators", arr}}));
  return 0;
}

int cmd_lambdas(const std::string& dir, const std::vector<std::string>& methods,
                const std::string& out) {
  const IntegralBundle b = read_bundle(dir);
  const auto rows = lambda_rows(b, methods);
  std::ostringstream s;
  s << "label,method,lambda1,lambda2,total,total_mHa_per_A\n";
  for (const auto& r : rows) {
    s << '"' << r.label << "\"," << r.method << ',' << fmt(r.lambda1) << ',' << fmt(r.lambda2)
      << ',' << fmt(r.total) << ',';
    if (r.label != "H") s << fmt(r.total * kHaBohrToMhaAngstrom);
    s << '\n';
  }
  emit(out, s.str());
  return 0;
}

int cmd_nisq(const std::vector<std::string>& dirs, double eps, const std::string& out) {
  if (!(eps > 0)) throw Error(Errc::InvalidArgument, "--eps must be positive");
  std::vector<NisqRow> rows;
  for (const auto& d : dirs) {
    const IntegralBundle b = read_bundle(d);
    const NisqGammas g = nisq_gammas(b);
    const double n = b.geometry.n_atoms();
    const double e2 = eps * eps;
    rows.push_back({"separate", n, g.separate, g.separate / e2});
    rows.push_back({"parallel", n, g.parallel, g.parallel / e2});
    rows.push_back({"no_importance", n, g.no_importance, g.no_importance / e2});
    rows.push_back({"shadow", n, g.shadow, g.shadow / e2});
    rows.push_back({"brg", n, g.brg, g.brg / e2});
    rows.push_back({"brg_one_body", n, g.brg_with_one_body, g.brg_with_one_body / e2});
  }
  std::ostringstream s;
  write_nisq_csv(rows, s);
  emit(out, s.str());
  return 0;
}

int cmd_fd_plan(const std::string& constants, double eps, int m_max, const std::string& out) {
  const SystemConstants k = system_constants_from_json(read_json_file(constants));
  const FDPlan p = optimize_m(k, eps, m_max);
  json j = to_json(p);
  j["eps"] = eps;
  j["model_flags"] = {"suppressed log factors set to 1",
                      "error budget split in quadrature: eps_pe = eps_fd = eps / sqrt 2"};
  j["gradient_vector_queries"] = {{"reuse", gradient_vector_queries(k, eps, true)},
                                  {"fresh", gradient_vector_queries(k, eps, false)}};
  emit(out, dump(j));
  return 0;
}

int cmd_ft_cost(const std::string& inputs, double eps, const std::string& norm,
                const std::string& out) {
  const json raw = read_json_file(inputs);
  const FTInputs in = ft_inputs_from_json(raw);
  if (raw.contains("eps") && eps <= 0) eps = raw.at("eps").get<double>();
  if (!(eps > 0)) throw Error(Errc::InvalidArgument, "--eps must be positive");
  std::string nm = norm;
  if (nm.empty()) nm = raw.value("norm", std::string("2"));
  if (nm != "1" && nm != "2") throw Error(Errc::InvalidArgument, "--norm must be 1 or 2");
  const CostReport oea = oea_total_cost(in, eps, nm == "1" ? ErrNorm::One : ErrNorm::Two);
  const CostReport gb = gbeve_cost(in, eps);
  json j;
  j["eps"] = eps;
  j["oea"] = oea.to_json();
  j["gbeve"] = gb.to_json();
  std::vector<std::string> flags = oea.model_flags;
  for (const auto& f : gb.model_flags)
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
  j["model_flags"] = flags;
  emit(out, dump(j));
  return 0;
}

int cmd_planewave(int n_side, double omega, double Z, int eta, std::vector<double> R, int axis,
                  int prob_n, const std::string& out) {
  if (R.size() != 3) throw Error(Errc::InvalidArgument, "--R needs three components");
  PWGrid g{n_side, omega};
  g.validate();
  const Eigen::Vector3d r(R[0], R[1], R[2]);
  json j;
  j["n_side"] = n_side;
  if (n_side <= kPwDenseMax) {
    const DiagCheck c = fft_diagonalize_check(pw_force_matrix(g, Z, r, axis), g, Z, r, axis);
    j["max_offdiag"] = c.max_offdiag;
    j["max_diag_error"] = c.max_diag_error;
  } else {
    j["max_offdiag"] = nullptr;
  }
  // a zero position has no direction; fall back to the axis direction
  Eigen::Vector3d dir = r;
  if (dir.norm() == 0.0) dir = Eigen::Vector3d::Unit(axis);
  const double lam = pw_lambda_force(g, Z, eta, dir);
  j["lambda_F"] = lam;
  j["lambda_F_mHa_per_A"] = lam * kHaBohrToMhaAngstrom;
  j["prob_n"] = momentum_prep_probability(prob_n);
  j["prob_bits"] = prob_n;
  j["prob_constant"] = momentum_prep_constant();
  emit(out, dump(j));
  return 0;
}

int cmd_md_noise(MDConfig c, const std::vector<double>& sweep, const std::string& out,
                 const std::string& summary) {
  c.validate();
  json j;
  if (sweep.empty()) {
    const MDResult r = run_md(c);
    std::ostringstream s;
    s << "r_angstrom,g\n";
    for (std::size_t k = 0; k < r.rdf.g.size(); ++k)
      s << fmt(r.rdf.bin_centers[k]) << ',' << fmt(r.rdf.g[k]) << '\n';
    emit(out, s.str());
    j["noise_rms_mHa_per_A"] = c.noise_rms;
    j["noise_2norm_mHa_per_A"] = rms_to_2norm(c.noise_rms, 3 * c.n_waters);
    j["first_peak_angstrom"] = r.rdf.first_peak_position;
    j["peak_bootstrap_se"] = bootstrap_peak_se(r);
    j["mean_temperature_K"] = r.mean_temperature;
    j["energy_drift_Ha_per_ps_per_molecule"] = energy_drift(r, c.n_waters);
  } else {
    const SweepResult s = noise_sweep(c, sweep);
    std::ostringstream csv;
    csv << "noise_rms_mHa_per_A,blew_up,peak_angstrom,peak_error_angstrom,se_angstrom,mean_temperature_K\n";
    for (const auto& row : s.rows)
      csv << fmt(row.noise_rms) << ',' << (row.blew_up ? 1 : 0) << ',' << fmt(row.peak) << ','
          << (row.blew_up ? std::string("inf") : fmt(row.error)) << ',' << fmt(row.se) << ','
          << fmt(row.mean_temperature) << '\n';
    emit(out, csv.str());
    j["reference_peak_angstrom"] = s.reference_peak;
    j["reference_se"] = s.reference_se;
    j["monotone"] = sweep_monotone(s);
  }
  j["waters"] = c.n_waters;
  j["steps"] = c.n_steps;
  j["seed"] = c.seed;
  j["box_angstrom"] = c.resolved_box();
  j["cutoff_angstrom"] = c.resolved_cutoff();
  j["model_flags"] = {"rigid TIP3P, shifted-force Coulomb and LJ (no Ewald)",
                      "first 10% of steps velocity-rescaled to T_init and discarded"};
  if (!summary.empty()) emit(summary, dump(j));
  return 0;
}

// y column vs x column from a CSV with a header
int cmd_fit(const std::string& csv, const std::string& xcol, const std::string& ycol, int k_last,
            const std::string& out) {
  std::ifstream f(csv);
  if (!f) throw Error(Errc::IoFailure, "cannot read " + csv);
  std::string line;
  if (!std::getline(f, line)) throw Error(Errc::InvalidArgument, "empty csv");
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream s(l);
    std::string c;
    while (std::getline(s, c, ',')) out.push_back(c);
    return out;
  };
  const auto head = split(line);
  auto col = [&](const std::string& name) {
    for (std::size_t k = 0; k < head.size(); ++k)
      if (head[k] == name) return k;
    throw Error(Errc::InvalidArgument, "no column '" + name + "'");
  };
  const std::size_t ix = col(xcol), iy = col(ycol);
  std::vector<double> x, y;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() <= std::max(ix, iy)) throw Error(Errc::InvalidArgument, "short row: " + line);
    try {
      x.push_back(std::stod(cells[ix]));
      y.push_back(std::stod(cells[iy]));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "non-numeric row: " + line);
    }
  }
  if (k_last <= 0) k_last = int(x.size());
  const PowerFit p = fit_power_law(x, y, k_last);
  emit(out, dump({{"exponent", p.exponent},
                  {"stderr", p.stderr_},
                  {"prefactor", p.prefactor},
                  {"k_last", k_last},
                  {"points", x.size()}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradientforge: force-operator construction and force-estimation cost models"};
  app.require_subcommand(1);
  std::string out;

  auto* v = app.add_subcommand("validate", "check an integral bundle; exit 2 on a violation");
  std::string v_dir;
  v->add_option("bundle", v_dir, "bundle directory")->required();
  v->add_option("-o,--out", out, "report path (default stdout)");

  auto* o = app.add_subcommand("operators", "build H and the 3 N_a force operators, summarise them");
  std::string o_dir, o_pauli;
  o->add_option("bundle", o_dir, "bundle directory")->required();
  o->add_option("-o,--out", out, "JSON summary path (default stdout)");
  o->add_option("--pauli-dir", o_pauli, "also write one Pauli CSV per operator here");

  auto* l = app.add_subcommand("lambdas", "rescaling factors (Ha, Ha/Bohr) per operator");
  std::string l_dir;
  std::vector<std::string> l_methods{"sparse", "df"};
  l->add_option("bundle", l_dir, "bundle directory")->required();
  l->add_option("--methods", l_methods, "subset of {sparse, df}")->delimiter(',');
  l->add_option("-o,--out", out, "CSV path (default stdout)");

  auto* n = app.add_subcommand("nisq", "measurement-count factors Gamma_2 per strategy");
  std::vector<std::string> n_dirs;
  double n_eps = 1e-3;
  n->add_option("bundles", n_dirs, "bundle directories")->required();
  n->add_option("--eps", n_eps, "target 2-norm error, Ha/Bohr (default 1e-3)");
  n->add_option("-o,--out", out, "CSV path (default stdout)");

  auto* fd = app.add_subcommand("fd-plan", "optimal finite-difference order and step");
  std::string fd_const;
  double fd_eps = 1e-3;
  int fd_mmax = 64;
  fd->add_option("--constants", fd_const, "JSON with c, e_frak, lambda_H, gap, n_atoms, max_dH, a0, a_min")
      ->required();
  fd->add_option("--eps", fd_eps, "target error, Ha/Bohr");
  fd->add_option("--m-max", fd_mmax, "largest stencil half-width searched");
  fd->add_option("-o,--out", out, "JSON path (default stdout)");

  auto* ft = app.add_subcommand("ft-cost", "overlap-estimation and gradient-based cost reports");
  std::string ft_in, ft_norm;
  double ft_eps = 0.0;
  ft->add_option("--inputs", ft_in, "FTInputs JSON")->required();
  ft->add_option("--eps", ft_eps, "target error (overrides the JSON 'eps')");
  ft->add_option("--norm", ft_norm, "1 or 2 (default 2)");
  ft->add_option("-o,--out", out, "JSON path (default stdout)");

  auto* pw = app.add_subcommand("planewave", "plane-wave force operator checks and lambda_F");
  int pw_n = 3, pw_eta = 1, pw_axis = 0, pw_bits = 6;
  double pw_omega = 1000.0, pw_Z = 1.0;
  std::vector<double> pw_R{1.0, 0.0, 0.0};
  pw->add_option("--n-side", pw_n, "odd grid points per side");
  pw->add_option("--omega", pw_omega, "cell volume, Bohr^3");
  pw->add_option("--Z", pw_Z, "nuclear charge");
  pw->add_option("--eta", pw_eta, "electron count");
  pw->add_option("--R", pw_R, "nuclear position x,y,z in Bohr")->delimiter(',');
  pw->add_option("--axis", pw_axis, "0, 1 or 2")->check(CLI::Range(0, 2));
  pw->add_option("--prob-bits", pw_bits, "n for the finite-n momentum-state probability");
  pw->add_option("-o,--out", out, "JSON path (default stdout)");

  auto* md = app.add_subcommand("md-noise", "rigid-water MD with Gaussian force noise; O-O RDF");
  MDConfig mc;
  std::vector<double> md_sweep;
  std::string md_summary;
  md->add_option("--waters", mc.n_waters, "number of molecules");
  md->add_option("--steps", mc.n_steps, "time steps");
  md->add_option("--dt", mc.dt, "time step, fs");
  md->add_option("--noise-rms", mc.noise_rms, "per-component noise RMS, mHa/Angstrom");
  md->add_option("--seed", mc.seed, "seed");
  md->add_option("--box", mc.box_length, "box length, Angstrom (default from density)");
  md->add_option("--sweep", md_sweep, "comma list of noise levels; writes a sweep table instead")
      ->delimiter(',');
  md->add_option("--summary", md_summary, "JSON summary path");
  md->add_option("-o,--out", out, "CSV path (default stdout)");

  auto* fit = app.add_subcommand("fit", "power-law fit over the last k points of a CSV");
  std::string fit_csv, fit_x = "x", fit_y = "y";
  int fit_k = 0;
  fit->add_option("--csv", fit_csv, "input CSV with header")->required();
  fit->add_option("--x", fit_x, "x column");
  fit->add_option("--y", fit_y, "y column");
  fit->add_option("--k-last", fit_k, "number of trailing points (default all)");
  fit->add_option("-o,--out", out, "JSON path (default stdout)");

  app.footer("Environment: GRADIENTFORGE_THREADS caps OpenMP threads.\n"
             "Exit codes: 0 ok, 2 invalid input or failed validation, 3 numerical failure.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  apply_thread_cap();

  try {
    if (*v) return cmd_validate(v_dir, out);
    if (*o) return cmd_operators(o_dir, out, o_pauli);
    if (*l) return cmd_lambdas(l_dir, l_methods, out);
    if (*n) return cmd_nisq(n_dirs, n_eps, out);
    if (*fd) return cmd_fd_plan(fd_const, fd_eps, fd_mmax, out);
    if (*ft) return cmd_ft_cost(ft_in, ft_eps, ft_norm, out);
    if (*pw) return cmd_planewave(pw_n, pw_omega, pw_Z, pw_eta, pw_R, pw_axis, pw_bits, out);
    if (*md) return cmd_md_noise(mc, md_sweep, out, md_summary);
    if (*fit) return cmd_fit(fit_csv, fit_x, fit_y, fit_k, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
