#include "gforge/bundle_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "gforge/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gforge {

namespace {

const char* kNames[] = {"S",         "h",       "g",     "dS",    "dh",
                        "dg",        "positions", "charges", "e_nuc", "de_nuc"};

std::vector<double> read_raw(const fs::path& file, std::size_t count) {
  std::error_code ec;
  const auto bytes = fs::file_size(file, ec);
  if (ec) throw Error(Errc::MissingDataset, "cannot stat " + file.string());
  if (bytes != count * 8)
    throw Error(Errc::ShapeMismatch, file.filename().string() + " has " +
                                         std::to_string(bytes) + " bytes, expected " +
                                         std::to_string(count * 8));
  std::vector<double> out(count);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + file.string());
  in.read(reinterpret_cast<char*>(out.data()), std::streamsize(count * 8));
  if (!in) throw Error(Errc::IoFailure, "short read on " + file.string());
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : out) {
      std::uint64_t u;
      std::memcpy(&u, &v, 8);
      u = __builtin_bswap64(u);
      std::memcpy(&v, &u, 8);
    }
  }
  return out;
}

void write_raw(const fs::path& file, const double* data, std::size_t count) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + file.string());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t k = 0; k < count; ++k) {
      std::uint64_t u;
      std::memcpy(&u, data + k, 8);
      u = __builtin_bswap64(u);
      out.write(reinterpret_cast<const char*>(&u), 8);
    }
  } else {
    out.write(reinterpret_cast<const char*>(data), std::streamsize(count * 8));
  }
  if (!out) throw Error(Errc::IoFailure, "write failed on " + file.string());
}

// Eigen is column-major by default; the file is row-major.
Eigen::MatrixXd to_matrix(const double* d, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d[std::size_t(i) * cols + j];
  return m;
}

void append_matrix(std::vector<double>& out, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
}

double sym_violation(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

struct Entry {
  std::vector<long> shape;
  std::string file;
};

}  // namespace

double SumRuleReport::worst() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.max_violation);
  return w;
}

IntegralBundle read_bundle(const std::string& dir) {
  const fs::path root(dir);
  const fs::path mpath = root / "manifest.json";
  std::ifstream min(mpath);
  if (!min) throw Error(Errc::MissingDataset, "no manifest.json in " + dir);
  json m;
  try {
    min >> m;
  } catch (const json::exception& e) {
    throw Error(Errc::ShapeMismatch, std::string("manifest parse: ") + e.what());
  }

  IntegralBundle b;
  try {
    if (m.at("format_version").get<int>() != 1)
      throw Error(Errc::ShapeMismatch, "unsupported format_version");
    b.n_spatial = m.at("n_spatial").get<int>();
    b.n_electrons = m.at("n_electrons").get<int>();
    const auto kind = m.at("orbital_kind").get<std::string>();
    if (kind == "canonical")
      b.orbital_kind = OrbitalKind::Canonical;
    else if (kind == "localized")
      b.orbital_kind = OrbitalKind::Localized;
    else
      throw Error(Errc::ShapeMismatch, "orbital_kind '" + kind + "'");
    b.basis = m.value("basis", std::string());
    if (m.contains("symbols")) b.geometry.symbols = m["symbols"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(Errc::ShapeMismatch, std::string("manifest field: ") + e.what());
  }

  std::map<std::string, Entry> entries;
  for (const auto& d : m.value("datasets", json::array())) {
    const auto dtype = d.value("dtype", std::string());
    const auto name = d.value("name", std::string());
    if (dtype != "f64-le")
      throw Error(Errc::ShapeMismatch, "dataset " + name + " has dtype '" + dtype + "'");
    entries[name] = Entry{d.at("shape").get<std::vector<long>>(), d.at("file").get<std::string>()};
  }
  for (const char* name : kNames)
    if (!entries.count(name)) throw Error(Errc::MissingDataset, name);

  auto load = [&](const std::string& name, std::vector<long> expect) {
    const Entry& e = entries[name];
    // scalars may be written as [] or [1]
    if (expect.empty() && e.shape == std::vector<long>{1}) expect = {1};
    if (e.shape != expect) {
      std::string got, want;
      for (long v : e.shape) got += std::to_string(v) + ",";
      for (long v : expect) want += std::to_string(v) + ",";
      throw Error(Errc::ShapeMismatch, name + " shape [" + got + "] expected [" + want + "]");
    }
    std::size_t count = 1;
    for (long v : expect) count *= std::size_t(v);
    return read_raw(root / e.file, count);
  };

  const long n = b.n_spatial;
  const auto charges = entries["charges"].shape;
  if (charges.size() != 1 || charges[0] < 1)
    throw Error(Errc::ShapeMismatch, "charges must be a non-empty vector");
  const long na = charges[0];
  const long nd = 3 * na;

  auto q = load("charges", {na});
  b.geometry.charges = Eigen::Map<Eigen::VectorXd>(q.data(), na);
  auto pos = load("positions", {na, 3});
  b.geometry.positions = to_matrix(pos.data(), int(na), 3);
  if (b.geometry.symbols.empty()) b.geometry.symbols.assign(std::size_t(na), "X");
  if (long(b.geometry.symbols.size()) != na)
    throw Error(Errc::ShapeMismatch, "symbols length differs from charges");

  auto s = load("S", {n, n});
  b.S = to_matrix(s.data(), int(n), int(n));
  auto h = load("h", {n, n});
  b.h = to_matrix(h.data(), int(n), int(n));
  auto g = load("g", {n, n, n, n});
  b.g = Tensor4(int(n));
  b.g.data = std::move(g);

  const std::size_t n2 = std::size_t(n * n), n4 = n2 * n2;
  auto ds = load("dS", {nd, n, n});
  auto dh = load("dh", {nd, n, n});
  auto dg = load("dg", {nd, n, n, n, n});
  for (long i = 0; i < nd; ++i) {
    b.dS.push_back(to_matrix(ds.data() + i * n2, int(n), int(n)));
    b.dh.push_back(to_matrix(dh.data() + i * n2, int(n), int(n)));
    Tensor4 t{int(n)};
    std::copy(dg.begin() + long(i * n4), dg.begin() + long((i + 1) * n4), t.data.begin());
    b.dg.push_back(std::move(t));
  }
  b.e_nuc = load("e_nuc", {})[0];
  auto den = load("de_nuc", {nd});
  b.de_nuc = Eigen::Map<Eigen::VectorXd>(den.data(), nd);

  static const char* known[] = {"format_version", "n_spatial", "n_electrons", "orbital_kind",
                                "basis", "symbols", "datasets"};
  for (auto it = m.begin(); it != m.end(); ++it)
    if (std::none_of(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }))
      b.extra[it.key()] = it.value();

  validate_bundle(b);
  return b;
}

void validate_bundle(const IntegralBundle& b) {
  const int n = b.n_spatial;
  const int na = b.geometry.n_atoms();
  if (na < 1) throw Error(Errc::ShapeMismatch, "no atoms");
  if (n < 1) throw Error(Errc::ShapeMismatch, "n_spatial < 1");
  if (b.n_electrons < 0 || b.n_electrons > 2 * n)
    throw Error(Errc::ShapeMismatch, "n_electrons out of range");
  for (int a = 0; a < na; ++a)
    if (!(b.geometry.charges(a) > 0))
      throw Error(Errc::ShapeMismatch, "non-positive nuclear charge");
  if (!b.geometry.positions.allFinite()) throw Error(Errc::ShapeMismatch, "non-finite positions");
  if (b.S.rows() != n || b.h.rows() != n || b.g.n != n || int(b.dS.size()) != 3 * na ||
      int(b.dh.size()) != 3 * na || int(b.dg.size()) != 3 * na || b.de_nuc.size() != 3 * na)
    throw Error(Errc::ShapeMismatch, "tensor extents inconsistent with n_spatial/n_atoms");

  auto check_sym = [](const std::string& name, double v) {
    if (!(v <= kSymmetryTol))
      throw Error(Errc::SymmetryViolation, name + " max violation " + std::to_string(v));
  };
  check_sym("S", sym_violation(b.S));
  check_sym("h", sym_violation(b.h));
  check_sym("g", eightfold_violation(b.g));
  for (int i = 0; i < 3 * na; ++i) {
    const auto tag = "[" + std::to_string(i) + "]";
    check_sym("dS" + tag, sym_violation(b.dS[i]));
    check_sym("dh" + tag, sym_violation(b.dh[i]));
    check_sym("dg" + tag, eightfold_violation(b.dg[i]));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.S, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0))
    throw Error(Errc::NonPositiveOverlap,
                "smallest overlap eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  const double dev = (b.S - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(dev < kOrthonormalTol))
    throw Error(Errc::NonPositiveOverlap,
                "orbitals not orthonormal at the reference geometry, max|S-I| = " +
                    std::to_string(dev));

  const auto report = validate_sum_rules(b);
  for (const auto& e : report.entries)
    if (!(e.max_violation < kSumRuleTol))
      throw Error(Errc::SumRuleViolation, e.tensor + " axis " + std::to_string(e.axis) +
                                              " violation " + std::to_string(e.max_violation));
}

SumRuleReport validate_sum_rules(const IntegralBundle& b) {
  SumRuleReport rep;
  const int na = b.geometry.n_atoms();
  const int n = b.n_spatial;
  for (int ax = 0; ax < 3; ++ax) {
    Eigen::MatrixXd sS = Eigen::MatrixXd::Zero(n, n), sh = sS;
    std::vector<double> sg(b.g.data.size(), 0.0);
    double sn = 0.0;
    for (int a = 0; a < na; ++a) {
      const int i = 3 * a + ax;
      sS += b.dS[i];
      sh += b.dh[i];
      for (std::size_t k = 0; k < sg.size(); ++k) sg[k] += b.dg[i].data[k];
      sn += b.de_nuc(i);
    }
    double mg = 0.0;
    for (double v : sg) mg = std::max(mg, std::abs(v));
    rep.entries.push_back({"dS", ax, n ? sS.cwiseAbs().maxCoeff() : 0.0});
    rep.entries.push_back({"dh", ax, n ? sh.cwiseAbs().maxCoeff() : 0.0});
    rep.entries.push_back({"dg", ax, mg});
    rep.entries.push_back({"de_nuc", ax, std::abs(sn)});
  }
  return rep;
}

void write_bundle(const IntegralBundle& b, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root))
    throw Error(Errc::IoFailure, "cannot create directory " + dir);

  const long n = b.n_spatial, na = b.geometry.n_atoms(), nd = 3 * na;
  json datasets = json::array();
  auto put = [&](const std::string& name, const std::vector<long>& shape,
                 const std::vector<double>& data) {
    write_raw(root / (name + ".f64"), data.data(), data.size());
    datasets.push_back({{"name", name}, {"shape", shape}, {"dtype", "f64-le"},
                        {"file", name + ".f64"}});
  };
  std::vector<double> buf;
  append_matrix(buf, b.S);
  put("S", {n, n}, buf);
  buf.clear();
  append_matrix(buf, b.h);
  put("h", {n, n}, buf);
  put("g", {n, n, n, n}, b.g.data);
  buf.clear();
  for (const auto& m : b.dS) append_matrix(buf, m);
  put("dS", {nd, n, n}, buf);
  buf.clear();
  for (const auto& m : b.dh) append_matrix(buf, m);
  put("dh", {nd, n, n}, buf);
  buf.clear();
  for (const auto& t : b.dg) buf.insert(buf.end(), t.data.begin(), t.data.end());
  put("dg", {nd, n, n, n, n}, buf);
  buf.clear();
  append_matrix(buf, b.geometry.positions);
  put("positions", {na, 3}, buf);
  put("charges", {na}, std::vector<double>(b.geometry.charges.data(), b.geometry.charges.data() + na));
  put("e_nuc", {}, {b.e_nuc});
  put("de_nuc", {nd}, std::vector<double>(b.de_nuc.data(), b.de_nuc.data() + nd));

  json m = b.extra;
  m["format_version"] = 1;
  m["n_spatial"] = b.n_spatial;
  m["n_electrons"] = b.n_electrons;
  m["orbital_kind"] = b.orbital_kind == OrbitalKind::Canonical ? "canonical" : "localized";
  m["basis"] = b.basis;
  m["symbols"] = b.geometry.symbols;
  m["datasets"] = datasets;
  std::ofstream out(root / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write manifest in " + dir);
  out << m.dump(1) << "\n";
  if (!out) throw Error(Errc::IoFailure, "manifest write failed in " + dir);
}

}  // namespace gforge
