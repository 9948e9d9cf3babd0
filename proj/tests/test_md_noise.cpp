#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "gforge/md_noise.hpp"
#include "test_util.hpp"

using namespace gforge;
using Eigen::Vector3d;

namespace {

MDConfig short_run(int steps, double noise = 0.0) {
  MDConfig c;
  c.n_steps = steps;
  c.noise_rms = noise;
  c.n_blocks = 4;
  return c;
}

bool same_bits(const std::vector<Vector3d>& a, const std::vector<Vector3d>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(Vector3d)) == 0;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  MDConfig c;
  // 64 waters at 0.997 g/cm^3
  CHECK(c.resolved_box() == Catch::Approx(12.4296).margin(1e-3));
  CHECK(c.resolved_cutoff() == Catch::Approx(c.resolved_box() / 2));
  c.validate();
  c.cutoff = 7.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::BoxTooSmall);
  MDConfig d;
  d.noise_rms = -1;
  CHECK(code_of([&] { d.validate(); }) == Errc::InvalidArgument);
  CHECK(Tip3p::r_HH() == Catch::Approx(1.5139).margin(1e-4));
}

TEST_CASE("lattice start is a valid rigid geometry") {
  const auto s = make_lattice(MDConfig{});
  REQUIRE(s.n == 64);
  REQUIRE(s.x.size() == 192);
  for (int m = 0; m < s.n; ++m) {
    const auto& o = s.x[std::size_t(3 * m)];
    CHECK((s.x[std::size_t(3 * m + 1)] - o).norm() == Catch::Approx(Tip3p::r_OH).epsilon(1e-10));
    CHECK((s.x[std::size_t(3 * m + 2)] - o).norm() == Catch::Approx(Tip3p::r_OH).epsilon(1e-10));
  }
  CHECK(total_momentum(s).norm() < 1e-10);
  CHECK(temperature(s) == Catch::Approx(299.0).epsilon(1e-10));
}

TEST_CASE("parallel and serial forces agree") {
  auto a = make_lattice(MDConfig{});
  auto b = a;
  const double rc = MDConfig{}.resolved_cutoff();
  const double ua = forces_parallel(a, rc), ub = forces_serial(b, rc);
  CHECK(ua == Catch::Approx(ub).epsilon(1e-12));
  double fmax = 0, dmax = 0;
  Vector3d net = Vector3d::Zero();
  for (std::size_t i = 0; i < a.f.size(); ++i) {
    fmax = std::max(fmax, a.f[i].norm());
    dmax = std::max(dmax, (a.f[i] - b.f[i]).norm());
    net += a.f[i];
  }
  CHECK(dmax < 1e-10 * fmax);
  CHECK(net.norm() < 1e-9 * fmax);
}

TEST_CASE("forces are the negative gradient of the potential") {
  auto s = make_lattice(MDConfig{});
  const double rc = MDConfig{}.resolved_cutoff();
  forces_serial(s, rc);
  const auto f = s.f;
  const double h = 1e-5;
  for (int atom : {0, 1, 50, 191})
    for (int ax = 0; ax < 3; ++ax) {
      auto p = s, m = s;
      p.x[std::size_t(atom)](ax) += h;
      m.x[std::size_t(atom)](ax) -= h;
      const double fd = -(forces_serial(p, rc) - forces_serial(m, rc)) / (2 * h);
      INFO("atom " << atom << " axis " << ax);
      CHECK(f[std::size_t(atom)](ax) == Catch::Approx(fd).margin(1e-5 * std::max(1.0, std::abs(fd))));
    }
}

TEST_CASE("counter-based normals") {
  CHECK(counter_normal(1, 2, 3, 0) == counter_normal(1, 2, 3, 0));
  CHECK(counter_normal(1, 2, 3, 0) != counter_normal(1, 2, 3, 1));
  CHECK(counter_normal(1, 2, 3, 0) != counter_normal(2, 2, 3, 0));
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(7, std::uint64_t(i / 300), std::uint64_t(i % 100), i % 3);
    s += z, s2 += z * z, s4 += z * z * z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 5 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1) < 0.02);
  CHECK(std::abs(s4 / n - 3) < 0.1);
}

TEST_CASE("rdf of an ideal gas is flat") {
  const double box = 12.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, box);
  std::vector<std::vector<Vector3d>> frames(200);
  for (auto& f : frames)
    for (int i = 0; i < 64; ++i) f.emplace_back(u(rng), u(rng), u(rng));
  const auto r = compute_rdf(frames, box, 0.1);
  CHECK(r.bin_centers.size() == 60);
  for (std::size_t k = 0; k < r.g.size(); ++k) {
    CHECK(r.g[k] >= 0.0);
    if (r.pair_counts[k] > 0) {
      INFO("r=" << r.bin_centers[k]);
      CHECK(std::abs(r.g[k] - 1.0) < 5.0 / std::sqrt(r.pair_counts[k]));
    }
  }
}

TEST_CASE("rdf of two atoms peaks at their distance") {
  const double box = 10.0, d = 3.13;
  std::vector<std::vector<Vector3d>> frames{{Vector3d(1, 1, 1), Vector3d(1 + d, 1, 1)}};
  const auto r = compute_rdf(frames, box, 0.02);
  CHECK(std::abs(r.first_peak_position - d) < 0.02);
  // minimum image: distance across the boundary
  std::vector<std::vector<Vector3d>> wrap{{Vector3d(0.5, 1, 1), Vector3d(9.5, 1, 1)}};
  CHECK(std::abs(compute_rdf(wrap, box, 0.02).first_peak_position - 1.0) < 0.02);
}

TEST_CASE("rdf peak fit recovers a parabola vertex") {
  std::vector<double> r, g;
  for (int k = 0; k < 40; ++k) {
    r.push_back(0.01 + 0.02 * k);
    g.push_back(3.0 - 20.0 * std::pow(r.back() - 0.4137, 2));
  }
  CHECK(rdf_peak(r, g) == Catch::Approx(0.4137).epsilon(1e-10));
}

TEST_CASE("short runs: determinism, momentum, constraints") {
  const auto c = short_run(300, 25.6);
  const auto a = run_md(c), b = run_md(c);
  CHECK(same_bits(a.final_state.x, b.final_state.x));
  CHECK(same_bits(a.final_state.v, b.final_state.v));
  auto c2 = c;
  c2.seed = 2;
  CHECK_FALSE(same_bits(a.final_state.x, run_md(c2).final_state.x));

  const auto q = run_md(short_run(300));
  CHECK(q.max_momentum < 1e-8);
  const auto& s = q.final_state;
  for (int m = 0; m < s.n; ++m) {
    const auto& o = s.x[std::size_t(3 * m)];
    CHECK(std::abs((s.x[std::size_t(3 * m + 1)] - o).norm() - Tip3p::r_OH) < 1e-7);
    CHECK(std::abs((s.x[std::size_t(3 * m + 1)] - s.x[std::size_t(3 * m + 2)]).norm() - Tip3p::r_HH()) < 1e-7);
  }
  CHECK(q.time_fs.size() == q.total_energy.size());
  CHECK(q.rdf.g.size() == q.blocks.front().counts.size());
}

TEST_CASE("serial-force run tracks the parallel run") {
  auto c = short_run(50);
  const auto a = run_md(c);
  c.serial_forces = true;
  const auto b = run_md(c);
  double d = 0;
  for (std::size_t i = 0; i < a.final_state.x.size(); ++i)
    d = std::max(d, (a.final_state.x[i] - b.final_state.x[i]).norm());
  CHECK(d < 1e-6);
}

TEST_CASE("energy drift") {
  auto c = short_run(1000);
  const double d1 = std::abs(noise_energy_drift(c));
  CHECK(d1 < 1e-4);
  c.dt = 0.25;
  c.n_steps = 4000;
  const double dq = std::abs(noise_energy_drift(c));
  CHECK(dq < d1);
  auto n1 = short_run(1000, 0.8), n2 = short_run(1000, 25.6);
  CHECK(std::abs(noise_energy_drift(n1)) < std::abs(noise_energy_drift(n2)));
}

TEST_CASE("huge noise blows up") {
  CHECK(code_of([] { run_md(short_run(2000, 409.6)); }) == Errc::BlowUp);
}

TEST_CASE("sweep monotonicity rule") {
  SweepResult s;
  s.rows = {{409.6, true}, {25.6, false, 2.9, 0.10, 0.02}, {6.4, false, 2.82, 0.02, 0.03},
            {0.8, false, 2.80, 0.05, 0.02}};
  // 0.05 <= 0.02 + 2 sqrt(0.03^2 + 0.02^2)
  CHECK(sweep_monotone(s));
  s.rows.back().error = 0.2;
  CHECK_FALSE(sweep_monotone(s));
}
