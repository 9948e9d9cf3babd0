#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gforge {

// Units: Angstrom, fs, amu, kJ/mol, K.
namespace md_units {
constexpr double kBoltzmann = 0.0083144626;   // kJ/mol/K
constexpr double kCoulomb = 1389.35457;       // kJ/mol A / e^2
constexpr double kAccel = 1e-4;               // (kJ/mol/A)/amu -> A/fs^2
constexpr double kMilliHartree = 2.62549964;  // kJ/mol
constexpr double kHartree = 2625.49964;       // kJ/mol
}  // namespace md_units

struct Tip3p {
  static constexpr double q_O = -0.834, q_H = 0.417;
  static constexpr double sigma = 3.15061, epsilon = 0.6364;
  static constexpr double r_OH = 0.9572, angle_deg = 104.52;
  static constexpr double m_O = 15.9994, m_H = 1.008;
  static double r_HH();
};

struct MDConfig {
  int n_waters = 64;
  double box_length = 0.0;  // A; 0 -> from density 0.997 g/cm^3
  double temperature_init = 299.0;
  double dt = 1.0;
  int n_steps = 20000;
  double noise_rms = 0.0;  // mHa/A per Cartesian component
  std::uint64_t seed = 1;
  double constraint_tolerance = 1e-8;  // A
  double cutoff = 0.0;                 // A; 0 -> min(9, L/2)
  double bin_width = 0.02;
  double equil_fraction = 0.1;
  int n_blocks = 20;
  bool serial_forces = false;

  double resolved_box() const;
  double resolved_cutoff() const;
  void validate() const;
};

struct RDFResult {
  std::vector<double> bin_centers;
  std::vector<double> g;
  std::vector<double> pair_counts;  // raw counts per bin
  double first_peak_position = 0.0;
  double first_peak_error = 0.0;  // vs reference, set by callers
};

// histogram bookkeeping shared by compute_rdf and the MD run
struct RDFAccumulator {
  double box, bin_width;
  int n_atoms;
  long frames = 0;
  std::vector<double> counts;

  RDFAccumulator(double box, double bin_width, int n_atoms);
  void add_frame(const std::vector<Eigen::Vector3d>& pos);
  void merge(const RDFAccumulator& o);
  RDFResult finish() const;
};

RDFResult compute_rdf(const std::vector<std::vector<Eigen::Vector3d>>& series, double box,
                      double bin_width = 0.02);
// vertex of the least-squares parabola through the 5 bins around the max
double rdf_peak(const std::vector<double>& r, const std::vector<double>& g);

// sites: O, H1, H2 per molecule, flat
struct WaterSystem {
  int n = 0;
  double box = 0.0;
  std::vector<Eigen::Vector3d> x, v, f;
  double mass(int a) const { return a % 3 == 0 ? Tip3p::m_O : Tip3p::m_H; }
};

WaterSystem make_lattice(const MDConfig& c);
// returns potential energy (kJ/mol); forces written into s.f
double forces_parallel(WaterSystem& s, double cutoff);
double forces_serial(WaterSystem& s, double cutoff);
double kinetic_energy(const WaterSystem& s);
double temperature(const WaterSystem& s);
Eigen::Vector3d total_momentum(const WaterSystem& s);

// N(0,1) keyed by (seed, step, atom, axis)
double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t atom, int axis);

struct MDResult {
  RDFResult rdf;
  std::vector<RDFAccumulator> blocks;
  std::vector<double> time_fs, total_energy;  // production samples, kJ/mol
  double mean_temperature = 0.0;
  double max_momentum = 0.0;  // max |P| over the run, amu A/fs
  WaterSystem final_state;
};

MDResult run_md(const MDConfig& c);

double bootstrap_peak_se(const MDResult& r, int n_resamples = 200, std::uint64_t seed = 12345);

// Ha/ps per molecule, linear fit over the production run of c
double noise_energy_drift(const MDConfig& c);
double energy_drift(const MDResult& r, int n_waters);

struct SweepRow {
  double noise_rms;
  bool blew_up = false;
  double peak = 0.0, error = 0.0, se = 0.0;
  double mean_temperature = 0.0;
};
struct SweepResult {
  double reference_peak = 0.0, reference_se = 0.0;
  RDFResult reference;
  std::vector<SweepRow> rows;
  std::vector<RDFResult> rdfs;  // empty entry for blow-ups
};
SweepResult noise_sweep(const MDConfig& base, const std::vector<double>& noise_levels);
// e_next <= e_prev + 2 sqrt(se_prev^2 + se_next^2) along decreasing noise
bool sweep_monotone(const SweepResult& s);

}  // namespace gforge
