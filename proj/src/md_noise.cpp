#include "gforge/md_noise.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gforge/error.hpp"

namespace gforge {

using namespace md_units;
using Eigen::Vector3d;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWaterMass = 18.01528;        // amu, density only
constexpr double kSiteMass = Tip3p::m_O + 2.0 * Tip3p::m_H;
constexpr double kAmuPerCm3ToGram = 1.66053907; // amu/A^3 -> g/cm^3
constexpr double kDensity = 0.997;

inline Vector3d min_image(Vector3d d, double box) {
  for (int k = 0; k < 3; ++k) d(k) -= box * std::nearbyint(d(k) / box);
  return d;
}

inline double site_charge(int a) { return a == 0 ? Tip3p::q_O : Tip3p::q_H; }

struct PairTables {
  double rc, rc2, inv_rc, inv_rc2;
  double lj_vc, lj_dvc;  // V(rc), V'(rc)
  explicit PairTables(double cutoff) : rc(cutoff), rc2(cutoff * cutoff), inv_rc(1 / cutoff), inv_rc2(1 / (cutoff * cutoff)) {
    const double s6 = std::pow(Tip3p::sigma / rc, 6);
    lj_vc = 4 * Tip3p::epsilon * (s6 * s6 - s6);
    lj_dvc = 4 * Tip3p::epsilon * (-12 * s6 * s6 + 6 * s6) / rc;
  }
};

// energy of one site pair and the force on the first site
inline double site_pair(const PairTables& t, int a, int b, const Vector3d& d, Vector3d& fa) {
  const double r2 = d.squaredNorm();
  if (r2 >= t.rc2) {
    fa.setZero();
    return 0.0;
  }
  const double r = std::sqrt(r2);
  const double inv_r = 1.0 / r;
  const double qq = kCoulomb * site_charge(a) * site_charge(b);
  double e = qq * (inv_r - t.inv_rc + (r - t.rc) * t.inv_rc2);
  double fmag = qq * (inv_r * inv_r - t.inv_rc2);
  if (a == 0 && b == 0) {
    const double s6 = std::pow(Tip3p::sigma * inv_r, 6);
    const double v = 4 * Tip3p::epsilon * (s6 * s6 - s6);
    const double dv = 4 * Tip3p::epsilon * (-12 * s6 * s6 + 6 * s6) * inv_r;
    e += v - t.lj_vc - (r - t.rc) * t.lj_dvc;
    fmag += -dv + t.lj_dvc;
  }
  fa = (fmag * inv_r) * d;
  return e;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t h) { return (double(h >> 11) + 0.5) * 0x1.0p-53; }

struct Constraint {
  int a, b;
  double d2;
};

std::array<Constraint, 3> constraints() {
  const double oh = Tip3p::r_OH, hh = Tip3p::r_HH();
  return {Constraint{0, 1, oh * oh}, Constraint{0, 2, oh * oh}, Constraint{1, 2, hh * hh}};
}

// positions x against reference xr (start of step); v picks up the same correction / dt
void shake(WaterSystem& s, const std::vector<Vector3d>& xr, double dt, double tol) {
  const auto cons = constraints();
#pragma omp parallel for
  for (int m = 0; m < s.n; ++m) {
    const int base = 3 * m;
    bool done = false;
    for (int it = 0; it < 1000 && !done; ++it) {
      done = true;
      for (const auto& c : cons) {
        const int ia = base + c.a, ib = base + c.b;
        const Vector3d d = s.x[std::size_t(ia)] - s.x[std::size_t(ib)];
        const double diff = c.d2 - d.squaredNorm();
        if (std::abs(diff) > 2.0 * std::sqrt(c.d2) * tol) done = false;
        const Vector3d dr = xr[std::size_t(ia)] - xr[std::size_t(ib)];
        const double ima = 1.0 / s.mass(ia), imb = 1.0 / s.mass(ib);
        const double g = diff / (2.0 * (ima + imb) * d.dot(dr));
        s.x[std::size_t(ia)] += g * ima * dr;
        s.x[std::size_t(ib)] -= g * imb * dr;
        s.v[std::size_t(ia)] += (g * ima / dt) * dr;
        s.v[std::size_t(ib)] -= (g * imb / dt) * dr;
      }
    }
    if (!done) s.x[std::size_t(base)](0) = std::numeric_limits<double>::quiet_NaN();
  }
  for (int m = 0; m < s.n; ++m)
    if (std::isnan(s.x[std::size_t(3 * m)](0)))
      throw Error(Errc::BlowUp, "constraint solver did not converge");
}

void rattle_velocities(WaterSystem& s, double tol) {
  const auto cons = constraints();
#pragma omp parallel for
  for (int m = 0; m < s.n; ++m) {
    const int base = 3 * m;
    for (int it = 0; it < 1000; ++it) {
      bool done = true;
      for (const auto& c : cons) {
        const int ia = base + c.a, ib = base + c.b;
        const Vector3d d = s.x[std::size_t(ia)] - s.x[std::size_t(ib)];
        const Vector3d rv = s.v[std::size_t(ia)] - s.v[std::size_t(ib)];
        const double dot = d.dot(rv);
        // tol is a length; per fs this is a generous velocity tolerance
        if (std::abs(dot) > 1e-3 * tol * c.d2) done = false;
        const double ima = 1.0 / s.mass(ia), imb = 1.0 / s.mass(ib);
        const double k = dot / (c.d2 * (ima + imb));
        s.v[std::size_t(ia)] -= k * ima * d;
        s.v[std::size_t(ib)] += k * imb * d;
      }
      if (done) break;
    }
  }
}

void rescale_to(WaterSystem& s, double T) {
  const double cur = temperature(s);
  if (cur <= 0) return;
  const double f = std::sqrt(T / cur);
  for (auto& v : s.v) v *= f;
}

void remove_com_velocity(WaterSystem& s) {
  Vector3d p = total_momentum(s);
  const double mtot = s.n * kSiteMass;
  const Vector3d vc = p / mtot;
  for (auto& v : s.v) v -= vc;
}

}  // namespace

double Tip3p::r_HH() {
  return 2.0 * r_OH * std::sin(0.5 * angle_deg * kPi / 180.0);
}

double MDConfig::resolved_box() const {
  if (box_length > 0) return box_length;
  return std::cbrt(n_waters * kWaterMass * kAmuPerCm3ToGram / kDensity);
}

double MDConfig::resolved_cutoff() const {
  return cutoff > 0 ? cutoff : std::min(9.0, 0.5 * resolved_box());
}

void MDConfig::validate() const {
  if (n_waters < 2) throw Error(Errc::InvalidArgument, "need at least 2 waters");
  if (!(temperature_init > 0) || !(dt > 0) || n_steps < 1)
    throw Error(Errc::InvalidArgument, "temperature, dt and n_steps must be positive");
  if (!(noise_rms >= 0)) throw Error(Errc::InvalidArgument, "noise_rms must be >= 0");
  if (!(constraint_tolerance > 0) || !(bin_width > 0))
    throw Error(Errc::InvalidArgument, "tolerances must be positive");
  if (!(equil_fraction >= 0 && equil_fraction < 1))
    throw Error(Errc::InvalidArgument, "equil_fraction must lie in [0, 1)");
  if (n_blocks < 2) throw Error(Errc::InvalidArgument, "need at least 2 blocks");
  const double L = resolved_box();
  if (resolved_cutoff() > 0.5 * L + 1e-12)
    throw Error(Errc::BoxTooSmall, "cutoff exceeds half the box");
  const int m = int(std::ceil(std::cbrt(double(n_waters)) - 1e-9));
  if (L / m < 2.5) throw Error(Errc::BoxTooSmall, "box too small for the initial lattice");
}

RDFAccumulator::RDFAccumulator(double box_, double bw, int n)
    : box(box_), bin_width(bw), n_atoms(n),
      counts(std::size_t(std::floor(0.5 * box_ / bw)), 0.0) {}

void RDFAccumulator::add_frame(const std::vector<Vector3d>& pos) {
  const double rmax = bin_width * double(counts.size());
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const double r = min_image(pos[i] - pos[j], box).norm();
      if (r < rmax) counts[std::size_t(r / bin_width)] += 1.0;
    }
  ++frames;
}

void RDFAccumulator::merge(const RDFAccumulator& o) {
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
  frames += o.frames;
}

RDFResult RDFAccumulator::finish() const {
  RDFResult res;
  const double V = box * box * box;
  const double pairs = 0.5 * double(n_atoms) * (n_atoms - 1);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double r0 = k * bin_width, r1 = r0 + bin_width;
    const double shell = 4.0 / 3.0 * kPi * (r1 * r1 * r1 - r0 * r0 * r0);
    const double ideal = double(frames) * pairs * shell / V;
    res.bin_centers.push_back(r0 + 0.5 * bin_width);
    res.g.push_back(ideal > 0 ? counts[k] / ideal : 0.0);
    res.pair_counts.push_back(counts[k]);
  }
  res.first_peak_position = rdf_peak(res.bin_centers, res.g);
  return res;
}

RDFResult compute_rdf(const std::vector<std::vector<Vector3d>>& series, double box, double bw) {
  if (series.empty()) throw Error(Errc::InvalidArgument, "empty position series");
  RDFAccumulator acc(box, bw, int(series.front().size()));
  for (const auto& f : series) acc.add_frame(f);
  return acc.finish();
}

double rdf_peak(const std::vector<double>& r, const std::vector<double>& g) {
  if (g.size() < 5) throw Error(Errc::InvalidArgument, "need at least 5 bins");
  const long k = long(std::max_element(g.begin(), g.end()) - g.begin());
  const long lo = std::clamp(k - 2, 0L, long(g.size()) - 5);
  Eigen::Matrix<double, 5, 3> A;
  Eigen::Matrix<double, 5, 1> y;
  for (int i = 0; i < 5; ++i) {
    const double x = r[std::size_t(lo + i)] - r[std::size_t(k)];
    A.row(i) << x * x, x, 1.0;
    y(i) = g[std::size_t(lo + i)];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  if (!(c(0) < 0)) return r[std::size_t(k)];
  const double xv = -c(1) / (2 * c(0));
  // stay inside the fitted window
  return r[std::size_t(k)] + std::clamp(xv, r[std::size_t(lo)] - r[std::size_t(k)],
                                        r[std::size_t(lo + 4)] - r[std::size_t(k)]);
}

WaterSystem make_lattice(const MDConfig& c) {
  c.validate();
  WaterSystem s;
  s.n = c.n_waters;
  s.box = c.resolved_box();
  const int m = int(std::ceil(std::cbrt(double(s.n)) - 1e-9));
  const double a = s.box / m;
  const double half = 0.5 * Tip3p::angle_deg * kPi / 180.0;
  // body frame with the centre of mass at the origin
  std::array<Vector3d, 3> body = {
      Vector3d(0, 0, 0), Vector3d(Tip3p::r_OH * std::sin(half), 0, Tip3p::r_OH * std::cos(half)),
      Vector3d(-Tip3p::r_OH * std::sin(half), 0, Tip3p::r_OH * std::cos(half))};
  const Vector3d com = (Tip3p::m_O * body[0] + Tip3p::m_H * (body[1] + body[2])) / kSiteMass;
  for (auto& b : body) b -= com;

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  s.x.resize(std::size_t(3 * s.n));
  s.v.resize(std::size_t(3 * s.n));
  s.f.assign(std::size_t(3 * s.n), Vector3d::Zero());
  for (int w = 0; w < s.n; ++w) {
    const int ix = w / (m * m), iy = (w / m) % m, iz = w % m;
    const Vector3d centre = a * Vector3d(ix + 0.5, iy + 0.5, iz + 0.5);
    Eigen::Quaterniond q(nd(rng), nd(rng), nd(rng), nd(rng));
    q.normalize();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    for (int k = 0; k < 3; ++k) s.x[std::size_t(3 * w + k)] = centre + rot * body[std::size_t(k)];
  }
  for (int i = 0; i < 3 * s.n; ++i) {
    const double sd = std::sqrt(kBoltzmann * c.temperature_init / s.mass(i) * kAccel);
    s.v[std::size_t(i)] = sd * Vector3d(nd(rng), nd(rng), nd(rng));
  }
  rattle_velocities(s, c.constraint_tolerance);
  remove_com_velocity(s);
  rescale_to(s, c.temperature_init);
  return s;
}

double forces_parallel(WaterSystem& s, double cutoff) {
  const PairTables t(cutoff);
  std::vector<double> e_mol(std::size_t(s.n), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.n; ++i) {
    Vector3d fi[3] = {Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero()};
    double e = 0.0;
    for (int j = 0; j < s.n; ++j) {
      if (j == i) continue;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const Vector3d d =
              min_image(s.x[std::size_t(3 * i + a)] - s.x[std::size_t(3 * j + b)], s.box);
          Vector3d fa;
          e += site_pair(t, a, b, d, fa);
          fi[a] += fa;
        }
    }
    for (int a = 0; a < 3; ++a) s.f[std::size_t(3 * i + a)] = fi[a];
    e_mol[std::size_t(i)] = 0.5 * e;
  }
  double e = 0.0;
  for (double v : e_mol) e += v;
  return e;
}

double forces_serial(WaterSystem& s, double cutoff) {
  const PairTables t(cutoff);
  for (auto& f : s.f) f.setZero();
  double e = 0.0;
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const Vector3d d =
              min_image(s.x[std::size_t(3 * i + a)] - s.x[std::size_t(3 * j + b)], s.box);
          Vector3d fa;
          e += site_pair(t, a, b, d, fa);
          s.f[std::size_t(3 * i + a)] += fa;
          s.f[std::size_t(3 * j + b)] -= fa;
        }
  return e;
}

double kinetic_energy(const WaterSystem& s) {
  double k = 0.0;
  for (int i = 0; i < 3 * s.n; ++i) k += 0.5 * s.mass(i) * s.v[std::size_t(i)].squaredNorm();
  return k / kAccel;
}

double temperature(const WaterSystem& s) {
  const double dof = 6.0 * s.n - 3.0;
  return 2.0 * kinetic_energy(s) / (dof * kBoltzmann);
}

Vector3d total_momentum(const WaterSystem& s) {
  Vector3d p = Vector3d::Zero();
  for (int i = 0; i < 3 * s.n; ++i) p += s.mass(i) * s.v[std::size_t(i)];
  return p;
}

double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t atom, int axis) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ step);
  h = splitmix(h ^ (atom * 4 + std::uint64_t(axis)));
  const double u1 = to_unit(splitmix(h ^ 0x5bd1e995ULL));
  const double u2 = to_unit(splitmix(h ^ 0x1b873593ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

MDResult run_md(const MDConfig& c) {
  WaterSystem s = make_lattice(c);
  const double rc = c.resolved_cutoff();
  const double dt = c.dt;
  const double sigma = c.noise_rms * kMilliHartree;  // kJ/mol/A
  const int n_equil = int(std::floor(c.equil_fraction * c.n_steps));
  const int n_prod = c.n_steps - n_equil;
  if (n_prod < c.n_blocks) throw Error(Errc::InvalidArgument, "too few production steps");
  auto compute = [&](std::uint64_t step) {
    const double u = c.serial_forces ? forces_serial(s, rc) : forces_parallel(s, rc);
    if (sigma > 0)
      for (int i = 0; i < 3 * s.n; ++i)
        for (int k = 0; k < 3; ++k)
          s.f[std::size_t(i)](k) += sigma * counter_normal(c.seed, step, std::uint64_t(i), k);
    return u;
  };
  std::vector<double> vmax(std::size_t(3 * s.n));
  for (int i = 0; i < 3 * s.n; ++i)
    vmax[std::size_t(i)] = 100.0 * std::sqrt(kBoltzmann * c.temperature_init / s.mass(i) * kAccel);

  MDResult res;
  res.blocks.assign(std::size_t(c.n_blocks), RDFAccumulator(s.box, c.bin_width, s.n));
  double u = compute(0);
  std::vector<Vector3d> xr(s.x.size()), oxy(std::size_t(s.n));
  double tsum = 0.0;

  for (int step = 1; step <= c.n_steps; ++step) {
    for (int i = 0; i < 3 * s.n; ++i)
      s.v[std::size_t(i)] += (0.5 * dt * kAccel / s.mass(i)) * s.f[std::size_t(i)];
    xr = s.x;
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += dt * s.v[i];
    shake(s, xr, dt, c.constraint_tolerance);
    u = compute(std::uint64_t(step));
    for (int i = 0; i < 3 * s.n; ++i)
      s.v[std::size_t(i)] += (0.5 * dt * kAccel / s.mass(i)) * s.f[std::size_t(i)];
    rattle_velocities(s, c.constraint_tolerance);
    if (step <= n_equil) rescale_to(s, c.temperature_init);

    for (int i = 0; i < 3 * s.n; ++i)
      if (!(s.v[std::size_t(i)].norm() < vmax[std::size_t(i)]))
        throw Error(Errc::BlowUp, "velocity above 100x thermal scale at step " +
                                      std::to_string(step));
    res.max_momentum = std::max(res.max_momentum, total_momentum(s).norm());

    if (step > n_equil) {
      const int k = step - n_equil - 1;
      for (int m = 0; m < s.n; ++m) oxy[std::size_t(m)] = s.x[std::size_t(3 * m)];
      res.blocks[std::size_t(k * c.n_blocks / n_prod)].add_frame(oxy);
      res.time_fs.push_back(step * dt);
      res.total_energy.push_back(u + kinetic_energy(s));
      tsum += temperature(s);
    }
  }
  RDFAccumulator all(s.box, c.bin_width, s.n);
  for (const auto& b : res.blocks) all.merge(b);
  res.rdf = all.finish();
  res.mean_temperature = tsum / n_prod;
  res.final_state = std::move(s);
  return res;
}

double bootstrap_peak_se(const MDResult& r, int n_resamples, std::uint64_t seed) {
  const int nb = int(r.blocks.size());
  if (nb < 2) throw Error(Errc::InvalidArgument, "need at least 2 blocks");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, nb - 1);
  double s1 = 0.0, s2 = 0.0;
  for (int t = 0; t < n_resamples; ++t) {
    RDFAccumulator acc = r.blocks.front();
    std::fill(acc.counts.begin(), acc.counts.end(), 0.0);
    acc.frames = 0;
    for (int k = 0; k < nb; ++k) acc.merge(r.blocks[std::size_t(pick(rng))]);
    const double p = acc.finish().first_peak_position;
    s1 += p;
    s2 += p * p;
  }
  const double mean = s1 / n_resamples;
  return std::sqrt(std::max(0.0, (s2 - n_resamples * mean * mean) / (n_resamples - 1)));
}

double energy_drift(const MDResult& r, int n_waters) {
  const std::size_t n = r.time_fs.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "need at least 2 energy samples");
  double mt = 0, me = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += r.time_fs[i];
    me += r.total_energy[i];
  }
  mt /= double(n);
  me /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = r.time_fs[i] - mt;
    sxy += dx * (r.total_energy[i] - me);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;  // kJ/mol per fs
  return slope * 1000.0 / kHartree / n_waters;
}

double noise_energy_drift(const MDConfig& c) { return energy_drift(run_md(c), c.n_waters); }

SweepResult noise_sweep(const MDConfig& base, const std::vector<double>& noise_levels) {
  SweepResult out;
  MDConfig c0 = base;
  c0.noise_rms = 0.0;
  const MDResult ref = run_md(c0);
  out.reference = ref.rdf;
  out.reference_peak = ref.rdf.first_peak_position;
  out.reference_se = bootstrap_peak_se(ref);
  for (double nz : noise_levels) {
    MDConfig c = base;
    c.noise_rms = nz;
    SweepRow row;
    row.noise_rms = nz;
    try {
      MDResult r = run_md(c);
      row.peak = r.rdf.first_peak_position;
      row.error = std::abs(row.peak - out.reference_peak);
      row.se = std::hypot(bootstrap_peak_se(r), out.reference_se);
      row.mean_temperature = r.mean_temperature;
      r.rdf.first_peak_error = row.error;
      out.rdfs.push_back(std::move(r.rdf));
    } catch (const Error& e) {
      if (e.code() != Errc::BlowUp) throw;
      row.blew_up = true;
      row.error = std::numeric_limits<double>::infinity();
      out.rdfs.emplace_back();
    }
    out.rows.push_back(row);
  }
  return out;
}

bool sweep_monotone(const SweepResult& s) {
  for (std::size_t k = 1; k < s.rows.size(); ++k) {
    const SweepRow& p = s.rows[k - 1];
    const SweepRow& n = s.rows[k];
    if (p.blew_up) continue;
    if (n.blew_up) return false;
    if (n.error > p.error + 2.0 * std::hypot(p.se, n.se)) return false;
  }
  return true;
}

}  // namespace gforge
