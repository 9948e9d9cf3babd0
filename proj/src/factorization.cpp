#include "gforge/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gforge/error.hpp"

namespace gforge {

namespace {

Eigen::MatrixXd matricize(const Tensor4& g) {
  const int n = g.n, n2 = n * n;
  Eigen::MatrixXd m(n2, n2);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) m(p * n + q, r * n + s) = g(p, q, r, s);
  return m;
}

}  // namespace

Factorization single_factorize(const FermionOp& op, std::optional<int> rank, double tol) {
  if (tol < 0) throw Error(Errc::InvalidArgument, "tol < 0");
  const int n = op.n_spatial();
  const Eigen::MatrixXd m = matricize(chemist_tensor(op));
  const double asym = n ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10) throw Error(Errc::NonSymmetricInput, "matricised V asymmetric by " + std::to_string(asym));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& w = es.eigenvalues();
  std::vector<int> order(std::size_t(w.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(w(a)) > std::abs(w(b)); });

  // Eigenvalues at rounding level belong to the (pq)-antisymmetric null
  // space and would give non-symmetric g matrices.
  const double wmax = w.size() ? std::abs(w(order[0])) : 0.0;
  const double floor = 1e-13 * std::max(wmax, 1.0);

  std::vector<double> tail(order.size() + 1, 0.0);  // sum of w^2 from k on
  for (int k = int(order.size()) - 1; k >= 0; --k)
    tail[std::size_t(k)] = tail[std::size_t(k) + 1] + w(order[std::size_t(k)]) * w(order[std::size_t(k)]);

  Factorization fac;
  std::size_t k = 0;
  for (; k < order.size(); ++k) {
    if (rank && int(k) >= *rank) break;
    if (std::sqrt(tail[k]) < tol) break;
    const double wk = w(order[k]);
    if (std::abs(wk) <= floor) break;
    Factor f;
    f.w_sign = wk < 0 ? -1 : 1;
    f.w_abs = std::abs(wk);
    const Eigen::VectorXd v = es.eigenvectors().col(order[k]);
    f.g_matrix.resize(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) f.g_matrix(p, q) = v(p * n + q);
    f.g_matrix = 0.5 * (f.g_matrix + f.g_matrix.transpose()).eval();
    f.g_matrix /= f.g_matrix.norm();
    fac.factors.push_back(std::move(f));
  }
  fac.truncation_error = std::sqrt(tail[k]);
  return fac;
}

Factorization double_factorize(Factorization fac) {
  for (auto& f : fac.factors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.g_matrix);
    f.f = es.eigenvalues() * std::sqrt(f.w_abs);
    f.basis_rotation = es.eigenvectors();
  }
  fac.doubled = true;
  return fac;
}

Eigen::MatrixXd lambda_one_body(const FermionOp& op) {
  const int n = op.n_spatial();
  Eigen::MatrixXd t = op.one_body;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double c = 0.0;
      for (int r = 0; r < n; ++r) c += op.two_body(p, q, r, r);
      t(p, q) += 2.0 * c;  // g = 2V
    }
  return t;
}

Lambdas lambda_sparse(const FermionOp& op) {
  Lambdas l;
  l.lambda1 = lambda_one_body(op).cwiseAbs().sum();
  double s = 0.0;
  for (double v : op.two_body.data) s += std::abs(v);
  l.lambda2 = s;  // 1/2 sum |g| with g = 2V
  l.total = l.lambda1 + l.lambda2;
  return l;
}

Lambdas lambda_df(const FermionOp& op, const Factorization& fac) {
  if (!fac.doubled) throw Error(Errc::MissingFactorization, "double_factorize not applied");
  Lambdas l;
  const Eigen::MatrixXd t = lambda_one_body(op);
  if (t.size()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
    l.lambda1 = es.eigenvalues().cwiseAbs().sum();
  }
  for (const auto& f : fac.factors) {
    const double s = f.f.cwiseAbs().sum();
    l.lambda2 += 0.25 * s * s;
  }
  l.total = l.lambda1 + l.lambda2;
  return l;
}

MeanStd lambda_force_mean(const std::vector<double>& lams) {
  std::vector<double> kept;
  for (double v : lams)
    if (v > 1e-12) kept.push_back(v);
  if (kept.empty()) throw Error(Errc::AllZero, "no force operator with nonzero lambda");
  const double mean = std::accumulate(kept.begin(), kept.end(), 0.0) / double(kept.size());
  double var = 0.0;
  for (double v : kept) var += (v - mean) * (v - mean);
  var = kept.size() > 1 ? var / double(kept.size() - 1) : 0.0;
  return {mean, std::sqrt(var), int(kept.size())};
}

double truncate_check(const FermionOp& op, const Factorization& fac, int k) {
  if (k < 0 || k > fac.rank()) throw Error(Errc::IndexOutOfRange, "k outside [0, L]");
  const int n = op.n_spatial();
  Eigen::MatrixXd m = matricize(chemist_tensor(op));
  for (int l = 0; l < k; ++l) {
    const auto& f = fac.factors[std::size_t(l)];
    const Eigen::Map<const Eigen::VectorXd> v(f.g_matrix.data(), long(n) * n);
    m -= (f.w_sign * f.w_abs) * v * v.transpose();
  }
  return m.norm();
}

double lambda_f_low_rank(const std::vector<Eigen::MatrixXd>& W, const std::vector<Eigen::MatrixXd>& dW) {
  if (W.size() != dW.size()) throw Error(Errc::InvalidArgument, "W and dW pairing length differs");
  double lam = 0.0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    if (W[l].rows() != dW[l].rows() || W[l].cols() != dW[l].cols())
      throw Error(Errc::ShapeMismatch, "W/dW factor shapes differ");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(W[l] + dW[l], Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(W[l] - dW[l], Eigen::EigenvaluesOnly);
    const double sp = ep.eigenvalues().cwiseAbs().sum();
    const double sm = em.eigenvalues().cwiseAbs().sum();
    lam += 0.5 * (sp * sp + sm * sm);
  }
  return lam;
}

}  // namespace gforge
