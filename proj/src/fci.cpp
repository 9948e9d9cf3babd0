#include "gforge/fci.hpp"

#include <algorithm>
#include <bit>

#include "gforge/error.hpp"

namespace gforge {

namespace {

using Det = std::uint64_t;

void strings(int n, int k, std::vector<Det>& out) {
  out.clear();
  if (k < 0 || k > n) return;
  Det s = (k == 0) ? 0 : ((Det(1) << k) - 1);
  const Det limit = Det(1) << n;
  if (k == 0) {
    out.push_back(0);
    return;
  }
  while (s < limit) {
    out.push_back(s);
    // next combination (Gosper)
    const Det c = s & (~s + 1);
    const Det r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

Det interleave(Det a, Det b, int n) {
  Det d = 0;
  for (int p = 0; p < n; ++p) {
    if (a >> p & 1) d |= Det(1) << (2 * p);
    if (b >> p & 1) d |= Det(1) << (2 * p + 1);
  }
  return d;
}

// E^sigma_pq on det: returns false if annihilated.
inline bool excite(Det det, int p, int q, Det& out, double& sign) {
  const Det bq = Det(1) << q;
  if (!(det & bq)) return false;
  Det d = det ^ bq;
  const Det bp = Det(1) << p;
  if (d & bp) return false;
  int par = std::popcount(det & (bq - 1)) + std::popcount(d & (bp - 1));
  out = d | bp;
  sign = (par & 1) ? -1.0 : 1.0;
  return true;
}

template <class F>
void for_each_image(const FermionOp& op, Det det, F&& emit) {
  const int n = op.n_spatial();
  if (op.shift != 0.0) emit(det, op.shift);
  for (int sg = 0; sg < 2; ++sg)
    for (int q = 0; q < n; ++q) {
      const int jq = 2 * q + sg;
      if (!(det >> jq & 1)) continue;
      for (int p = 0; p < n; ++p) {
        const double t = op.one_body(p, q);
        if (t == 0.0) continue;
        Det d;
        double s;
        if (excite(det, 2 * p + sg, jq, d, s)) emit(d, s * t);
      }
    }
  for (int tau = 0; tau < 2; ++tau)
    for (int s_ = 0; s_ < n; ++s_) {
      const int js = 2 * s_ + tau;
      if (!(det >> js & 1)) continue;
      for (int r = 0; r < n; ++r) {
        Det d1;
        double sg1;
        if (!excite(det, 2 * r + tau, js, d1, sg1)) continue;
        for (int sg = 0; sg < 2; ++sg)
          for (int q = 0; q < n; ++q) {
            const int jq = 2 * q + sg;
            if (!(d1 >> jq & 1)) continue;
            for (int p = 0; p < n; ++p) {
              const double v = op.two_body(p, q, r, s_);
              if (v == 0.0) continue;
              Det d2;
              double sg2;
              if (excite(d1, 2 * p + sg, jq, d2, sg2)) emit(d2, sg1 * sg2 * v);
            }
          }
      }
    }
}

}  // namespace

DetSpace DetSpace::make(int n_spatial, int n_electrons) {
  if (2 * n_spatial > kFciMaxSpinOrbitals)
    throw Error(Errc::TooLarge, std::to_string(2 * n_spatial) + " spin-orbitals exceeds cap " +
                                    std::to_string(kFciMaxSpinOrbitals));
  DetSpace sp;
  sp.n_spatial = n_spatial;
  sp.n_alpha = (n_electrons + 1) / 2;
  sp.n_beta = n_electrons / 2;
  if (sp.n_alpha > n_spatial) throw Error(Errc::InvalidArgument, "too many electrons");
  std::vector<Det> sa, sb;
  strings(n_spatial, sp.n_alpha, sa);
  strings(n_spatial, sp.n_beta, sb);
  for (Det a : sa)
    for (Det b : sb) sp.dets.push_back(interleave(a, b, n_spatial));
  std::sort(sp.dets.begin(), sp.dets.end());
  return sp;
}

int DetSpace::find(std::uint64_t det) const {
  auto it = std::lower_bound(dets.begin(), dets.end(), det);
  if (it == dets.end() || *it != det) return -1;
  return int(it - dets.begin());
}

Eigen::VectorXd apply_op(const FermionOp& op, const DetSpace& space, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (std::size_t j = 0; j < space.dets.size(); ++j) {
    const double xj = x(long(j));
    if (xj == 0.0) continue;
    for_each_image(op, space.dets[j], [&](Det d, double c) {
      const int i = space.find(d);
      if (i >= 0) y(i) += c * xj;
    });
  }
  return y;
}

Eigen::MatrixXd op_matrix(const FermionOp& op, const DetSpace& space) {
  const long dim = long(space.dets.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (long j = 0; j < dim; ++j)
    for_each_image(op, space.dets[std::size_t(j)], [&](Det d, double c) {
      const int i = space.find(d);
      if (i >= 0) m(i, j) += c;
    });
  return m;
}

FciResult fci_ground_state(const FermionOp& hamiltonian, int n_electrons) {
  FciResult res;
  res.space = DetSpace::make(hamiltonian.n_spatial(), n_electrons);
  Eigen::MatrixXd hm = op_matrix(hamiltonian, res.space);
  hm = 0.5 * (hm + hm.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
  res.energy = es.eigenvalues()(0);
  res.psi = es.eigenvectors().col(0);
  Eigen::Index k;
  res.psi.cwiseAbs().maxCoeff(&k);
  if (res.psi(k) < 0) res.psi = -res.psi;
  return res;
}

double fci_expectation(const FermionOp& op, const FciResult& ground) {
  return ground.psi.dot(apply_op(op, ground.space, ground.psi));
}

double fci_expectation(const FermionOp& op, const IntegralBundle& b) {
  if (2 * b.n_spatial > kFciMaxSpinOrbitals)
    throw Error(Errc::TooLarge, "bundle too large for FCI");
  return fci_expectation(op, fci_ground_state(build_hamiltonian(b), b.n_electrons));
}

}  // namespace gforge
