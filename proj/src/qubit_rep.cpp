#include "gforge/qubit_rep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "gforge/error.hpp"

namespace gforge {

namespace {

using cd = std::complex<double>;
using u128 = unsigned __int128;

const cd kIpow[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};

struct PauliHash {
  std::size_t operator()(const PauliString& p) const {
    return std::hash<std::uint64_t>()(p.x * 0x9E3779B97F4A7C15ull ^ (p.z + 0x632BE59BD9B4E019ull));
  }
};

// P(x,z) = i^{x.z} X^x Z^z, so multiplying gives
// i^{x1.z1 + x2.z2 + 2 z1.x2 - x3.z3} P(x3,z3).
inline int mul_phase(const PauliString& a, const PauliString& b, PauliString& out) {
  out.x = a.x ^ b.x;
  out.z = a.z ^ b.z;
  const int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
                2 * std::popcount(a.z & b.x) - std::popcount(out.x & out.z);
  return ((e % 4) + 4) % 4;
}

struct PTerm {
  PauliString p;
  cd c;
};
using PSum = std::vector<PTerm>;

PSum mul(const PSum& a, const PSum& b) {
  PSum out;
  for (const auto& ta : a)
    for (const auto& tb : b) {
      PauliString r;
      const int e = mul_phase(ta.p, tb.p, r);
      const cd c = ta.c * tb.c * kIpow[e];
      auto it = std::find_if(out.begin(), out.end(), [&](const PTerm& t) { return t.p == r; });
      if (it == out.end())
        out.push_back({r, c});
      else
        it->c += c;
    }
  std::erase_if(out, [](const PTerm& t) { return std::abs(t.c) == 0.0; });
  return out;
}

PSum jw_ladder(int j, bool dagger) {
  const std::uint64_t below = (j == 0) ? 0 : ((std::uint64_t(1) << j) - 1);
  const std::uint64_t bit = std::uint64_t(1) << j;
  const PauliString xs{bit, below}, ys{bit, below | bit};
  return {{xs, cd(0.5, 0)}, {ys, cd(0, dagger ? -0.5 : 0.5)}};
}

PauliPolynomial finish(std::unordered_map<PauliString, cd, PauliHash>& acc, int nq) {
  PauliPolynomial poly;
  poly.n_qubits = nq;
  for (const auto& [p, c] : acc) {
    if (std::abs(c.imag()) > 1e-10)
      throw Error(Errc::InvalidArgument, "operator is not Hermitian: imaginary Pauli coefficient " +
                                             std::to_string(c.imag()));
    if (p.is_identity()) {
      poly.identity += c.real();
      continue;
    }
    if (std::abs(c.real()) < kDropTol) continue;
    poly.terms.push_back({p, c.real()});
  }
  std::sort(poly.terms.begin(), poly.terms.end(),
            [](const PauliTerm& a, const PauliTerm& b) { return pauli_less(a.p, b.p); });
  return poly;
}

inline int code(const PauliString& p, int k) {
  const int x = int(p.x >> k & 1), z = int(p.z >> k & 1);
  return x ? (z ? 2 : 1) : (z ? 3 : 0);  // I X Y Z
}

MajoranaKey mask_key(u128 m) { return {std::uint64_t(m), std::uint64_t(m >> 64)}; }

inline int popcount128(u128 m) {
  return std::popcount(std::uint64_t(m)) + std::popcount(std::uint64_t(m >> 64));
}

// gamma_A gamma_B = (-1)^{#(a in A, b in B, a > b)} gamma_{A xor B}
inline double gamma_sign(u128 a, u128 b) {
  int count = 0;
  while (b) {
    const std::uint64_t lo = std::uint64_t(b);
    const int j = lo ? std::countr_zero(lo) : 64 + std::countr_zero(std::uint64_t(b >> 64));
    const u128 above = ~((u128(2) << j) - 1);  // wraps to 0 for j = 127
    count += popcount128(a & above);
    b &= b - 1;
  }
  return (count & 1) ? -1.0 : 1.0;
}

struct MTerm {
  u128 m;
  cd c;
};
using MSum = std::vector<MTerm>;

MSum mmul(const MSum& a, const MSum& b) {
  MSum out;
  for (const auto& ta : a)
    for (const auto& tb : b) {
      const u128 r = ta.m ^ tb.m;
      const cd c = ta.c * tb.c * gamma_sign(ta.m, tb.m);
      auto it = std::find_if(out.begin(), out.end(), [&](const MTerm& t) { return t.m == r; });
      if (it == out.end())
        out.push_back({r, c});
      else
        it->c += c;
    }
  std::erase_if(out, [](const MTerm& t) { return std::abs(t.c) == 0.0; });
  return out;
}

MSum maj_ladder(int j, bool dagger) {
  return {{u128(1) << (2 * j), cd(0.5, 0)}, {u128(1) << (2 * j + 1), cd(0, dagger ? -0.5 : 0.5)}};
}

void check_width(const FermionOp& op) {
  if (2 * op.n_spatial() > kMaxQubits)
    throw Error(Errc::TooManyModes, std::to_string(2 * op.n_spatial()) + " modes > " +
                                        std::to_string(kMaxQubits));
}

}  // namespace

std::string pauli_to_string(const PauliString& p, int n_qubits) {
  static const char letters[] = {'I', 'X', 'Y', 'Z'};
  std::string s(std::size_t(n_qubits), 'I');
  for (int k = 0; k < n_qubits; ++k) s[std::size_t(k)] = letters[code(p, k)];
  return s;
}

PauliString pauli_from_string(const std::string& s) {
  PauliString p;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::uint64_t bit = std::uint64_t(1) << k;
    switch (s[k]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Y': p.x |= bit; p.z |= bit; break;
      case 'Z': p.z |= bit; break;
      default: throw Error(Errc::InvalidArgument, "bad Pauli letter in " + s);
    }
  }
  return p;
}

bool pauli_less(const PauliString& a, const PauliString& b) {
  const std::uint64_t diff = (a.x ^ b.x) | (a.z ^ b.z);
  if (!diff) return false;
  const int k = std::countr_zero(diff);
  return code(a, k) < code(b, k);
}

double PauliPolynomial::coeff(const PauliString& p) const {
  if (p.is_identity()) return identity;
  auto it = std::lower_bound(terms.begin(), terms.end(), p,
                             [](const PauliTerm& t, const PauliString& q) { return pauli_less(t.p, q); });
  return (it != terms.end() && it->p == p) ? it->c : 0.0;
}

PauliPolynomial jordan_wigner(const FermionOp& op) {
  check_width(op);
  const int n = op.n_spatial(), nq = 2 * n;
  std::vector<PSum> E(std::size_t(nq * nq));
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) E[std::size_t(i * nq + j)] = mul(jw_ladder(i, true), jw_ladder(j, false));

  std::unordered_map<PauliString, cd, PauliHash> acc;
  auto add = [&](const PSum& s, double w) {
    for (const auto& t : s) acc[t.p] += w * t.c;
  };
  if (op.shift != 0.0) acc[PauliString{}] += op.shift;
  for (int sg = 0; sg < 2; ++sg)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (op.one_body(p, q) != 0.0) add(E[std::size_t((2 * p + sg) * nq + 2 * q + sg)], op.one_body(p, q));
  for (int sg = 0; sg < 2; ++sg)
    for (int tau = 0; tau < 2; ++tau)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const PSum& left = E[std::size_t((2 * p + sg) * nq + 2 * q + sg)];
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
              const double v = op.two_body(p, q, r, s);
              if (v == 0.0) continue;
              add(mul(left, E[std::size_t((2 * r + tau) * nq + 2 * s + tau)]), v);
            }
        }
  return finish(acc, nq);
}

double induced_one_norm(const PauliPolynomial& poly) {
  double s = 0.0;
  for (const auto& t : poly.terms) s += std::abs(t.c);
  return s;
}

void write_pauli_csv(const PauliPolynomial& poly, std::ostream& out) {
  out << "string,coefficient\n";
  out.precision(17);
  if (poly.identity != 0.0) out << pauli_to_string(PauliString{}, poly.n_qubits) << "," << poly.identity << "\n";
  for (const auto& t : poly.terms) out << pauli_to_string(t.p, poly.n_qubits) << "," << t.c << "\n";
}

Eigen::MatrixXcd pauli_dense(const PauliPolynomial& poly) {
  if (poly.n_qubits > 14) throw Error(Errc::TooLarge, "dense Pauli matrix too large");
  const long dim = 1L << poly.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (long b = 0; b < dim; ++b) m(b, b) += poly.identity;
  for (const auto& t : poly.terms) {
    const cd ph = kIpow[std::popcount(t.p.x & t.p.z) % 4];
    for (long b = 0; b < dim; ++b) {
      const double sgn = (std::popcount(t.p.z & std::uint64_t(b)) & 1) ? -1.0 : 1.0;
      m(long(std::uint64_t(b) ^ t.p.x), b) += t.c * sgn * ph;
    }
  }
  return m;
}

int MajoranaKey::degree() const { return std::popcount(lo) + std::popcount(hi); }

std::vector<int> MajoranaKey::indices() const {
  std::vector<int> out;
  for (int k = 0; k < 64; ++k)
    if (lo >> k & 1) out.push_back(k);
  for (int k = 0; k < 64; ++k)
    if (hi >> k & 1) out.push_back(64 + k);
  return out;
}

MajoranaKey MajoranaKey::from_indices(const std::vector<int>& idx) {
  MajoranaKey k;
  for (int i : idx) {
    if (i < 64)
      k.lo |= std::uint64_t(1) << i;
    else
      k.hi |= std::uint64_t(1) << (i - 64);
  }
  return k;
}

double MajoranaPolynomial::two_norm_sq() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.f * t.f;
  return s;
}

MajoranaPolynomial to_majorana(const FermionOp& op) {
  check_width(op);
  const int n = op.n_spatial(), nm = 2 * n;
  std::vector<MSum> E(std::size_t(nm * nm));
  for (int i = 0; i < nm; ++i)
    for (int j = 0; j < nm; ++j) E[std::size_t(i * nm + j)] = mmul(maj_ladder(i, true), maj_ladder(j, false));

  struct U128Hash {
    std::size_t operator()(u128 m) const {
      return std::hash<std::uint64_t>()(std::uint64_t(m) * 0x9E3779B97F4A7C15ull ^ std::uint64_t(m >> 64));
    }
  };
  std::unordered_map<u128, cd, U128Hash> acc;
  auto add = [&](const MSum& s, double w) {
    for (const auto& t : s) acc[t.m] += w * t.c;
  };
  if (op.shift != 0.0) acc[0] += op.shift;
  for (int sg = 0; sg < 2; ++sg)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (op.one_body(p, q) != 0.0) add(E[std::size_t((2 * p + sg) * nm + 2 * q + sg)], op.one_body(p, q));
  for (int sg = 0; sg < 2; ++sg)
    for (int tau = 0; tau < 2; ++tau)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const MSum& left = E[std::size_t((2 * p + sg) * nm + 2 * q + sg)];
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
              const double v = op.two_body(p, q, r, s);
              if (v == 0.0) continue;
              add(mmul(left, E[std::size_t((2 * r + tau) * nm + 2 * s + tau)]), v);
            }
        }

  MajoranaPolynomial out;
  out.n_modes = nm;
  for (const auto& [m, c] : acc) {
    const int deg = popcount128(m);
    // product form -> Gamma form: gamma...gamma = (-i)^k Gamma
    const int k = deg / 2;
    const cd f = c * kIpow[(4 - k % 4) % 4];
    if (std::abs(f.imag()) > 1e-10)
      throw Error(Errc::InvalidArgument, "operator is not Hermitian: complex Majorana coefficient");
    if (deg == 0) {
      out.constant += f.real();
      continue;
    }
    if (deg != 2 && deg != 4)
      throw Error(Errc::InvalidArgument, "unexpected Majorana degree " + std::to_string(deg));
    if (std::abs(f.real()) < kDropTol) continue;
    out.terms.push_back({mask_key(m), f.real()});
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [](const MajoranaTerm& a, const MajoranaTerm& b) { return a.mu < b.mu; });
  return out;
}

PauliPolynomial majorana_to_pauli(const MajoranaPolynomial& m) {
  if (m.n_modes > kMaxQubits) throw Error(Errc::TooManyModes, "too many modes");
  std::unordered_map<PauliString, cd, PauliHash> acc;
  if (m.constant != 0.0) acc[PauliString{}] += m.constant;
  for (const auto& t : m.terms) {
    const auto idx = t.mu.indices();
    PauliString cur{};
    int e = int(idx.size() / 2) % 4;  // the i^k of Gamma
    for (int g : idx) {
      const int j = g / 2;
      const std::uint64_t bit = std::uint64_t(1) << j;
      const std::uint64_t below = j ? ((std::uint64_t(1) << j) - 1) : 0;
      const PauliString pg = (g % 2 == 0) ? PauliString{bit, below} : PauliString{bit, below | bit};
      PauliString r;
      e += mul_phase(cur, pg, r);
      cur = r;
    }
    acc[cur] += t.f * kIpow[e % 4];
  }
  return finish(acc, m.n_modes);
}

PauliUnion pauli_union(const std::vector<PauliPolynomial>& polys) {
  PauliUnion u;
  if (polys.empty()) return u;
  u.n_qubits = polys.front().n_qubits;
  for (const auto& p : polys)
    if (p.n_qubits != u.n_qubits)
      throw Error(Errc::WidthMismatch, std::to_string(p.n_qubits) + " vs " + std::to_string(u.n_qubits));
  for (const auto& p : polys)
    for (const auto& t : p.terms) u.terms.push_back(t.p);
  std::sort(u.terms.begin(), u.terms.end(), pauli_less);
  u.terms.erase(std::unique(u.terms.begin(), u.terms.end()), u.terms.end());
  u.h = Eigen::MatrixXd::Zero(long(polys.size()), long(u.terms.size()));
  for (std::size_t i = 0; i < polys.size(); ++i) {
    std::size_t j = 0;
    for (const auto& t : polys[i].terms) {
      while (!(u.terms[j] == t.p)) ++j;
      u.h(long(i), long(j)) = t.c;
    }
  }
  return u;
}

}  // namespace gforge
