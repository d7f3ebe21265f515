#include "tracial/ktheory.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace tracial {

namespace {

BigInt mod_positive(const BigInt& a, const BigInt& d) {
  BigInt r = a % d;
  return r < 0 ? BigInt(r + d) : r;
}

bool zero_in(const FGAbelianGroup& g, Eigen::Index row, const BigInt& v) {
  if (row < g.rank) return v == 0;
  return v % g.torsion[static_cast<std::size_t>(row - g.rank)] == 0;
}

BigMatrix hcat(const BigMatrix& a, const BigMatrix& b) {
  BigMatrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace

bool equal(const BigMatrix& a, const BigMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shapes do not compose");
  BigMatrix out = BigMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (a(i, k) != 0)
        for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

FGAbelianGroup free_group(int rank) {
  if (rank < 0) throw std::invalid_argument("negative rank");
  return {rank, {}};
}

FGAbelianGroup group_from_presentation(const BigMatrix& relations) {
  const auto snf = smith_normal_form<BigInt>(relations);
  FGAbelianGroup g;
  g.rank = static_cast<int>(relations.rows() - snf.rank);
  for (Eigen::Index i = 0; i < snf.rank; ++i)
    if (snf.D(i, i) > 1) g.torsion.push_back(snf.D(i, i));
  return g;
}

BigMatrix relation_matrix(const FGAbelianGroup& g) {
  const Eigen::Index t = static_cast<Eigen::Index>(g.torsion.size());
  BigMatrix r = BigMatrix::Zero(g.generators(), t);
  for (Eigen::Index i = 0; i < t; ++i) r(g.rank + i, i) = g.torsion[static_cast<std::size_t>(i)];
  return r;
}

FGAbelianGroup direct_sum(const FGAbelianGroup& a, const FGAbelianGroup& b) {
  const auto ra = relation_matrix(a), rb = relation_matrix(b);
  BigMatrix r = BigMatrix::Zero(ra.rows() + rb.rows(), ra.cols() + rb.cols());
  r.topLeftCorner(ra.rows(), ra.cols()) = ra;
  r.bottomRightCorner(rb.rows(), rb.cols()) = rb;
  return group_from_presentation(r);
}

GroupHom make_hom(FGAbelianGroup domain, FGAbelianGroup codomain, BigMatrix matrix) {
  if (matrix.rows() != codomain.generators() || matrix.cols() != domain.generators())
    throw std::invalid_argument("hom matrix must be " + std::to_string(codomain.generators()) + " x " +
                                std::to_string(domain.generators()));
  for (Eigen::Index i = codomain.rank; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      matrix(i, j) = mod_positive(matrix(i, j), codomain.torsion[static_cast<std::size_t>(i - codomain.rank)]);
  for (Eigen::Index j = domain.rank; j < matrix.cols(); ++j) {
    const BigInt& d = domain.torsion[static_cast<std::size_t>(j - domain.rank)];
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      if (!zero_in(codomain, i, d * matrix(i, j)))
        throw std::invalid_argument("hom is not well defined: torsion generator " + std::to_string(j) +
                                    " has order " + d.str() + " but its image does not");
  }
  return {std::move(domain), std::move(codomain), std::move(matrix)};
}

GroupHom identity_hom(const FGAbelianGroup& g) {
  return make_hom(g, g, BigMatrix::Identity(g.generators(), g.generators()));
}

GroupHom zero_hom(const FGAbelianGroup& domain, const FGAbelianGroup& codomain) {
  return make_hom(domain, codomain, BigMatrix::Zero(codomain.generators(), domain.generators()));
}

GroupHom one_minus(const GroupHom& a) {
  if (a.domain != a.codomain) throw std::invalid_argument("1 - a needs an endomorphism");
  const Eigen::Index n = a.domain.generators();
  BigMatrix m = BigMatrix::Identity(n, n) - a.matrix;
  return make_hom(a.domain, a.codomain, std::move(m));
}

KernelCokernel kernel_cokernel(const GroupHom& f) {
  const BigMatrix rd = relation_matrix(f.domain), rc = relation_matrix(f.codomain);
  const Eigen::Index n = f.matrix.cols();
  KernelCokernel out;
  out.cokernel = group_from_presentation(hcat(f.matrix, rc));

  // x with f x in the relation lattice of the codomain: nullspace of [M | -R]
  const BigMatrix neg = -rc;
  const auto snf = smith_normal_form<BigInt>(hcat(f.matrix, neg));
  const Eigen::Index null = snf.V.cols() - snf.rank;
  const BigMatrix gens = snf.V.block(0, snf.rank, n, null);
  // basis of the span of gens
  const auto span = smith_normal_form<BigInt>(gens);
  const Eigen::Index l = span.rank;
  // express domain relations in that basis: (U r)_i / d_i
  BigMatrix coords(l, rd.cols());
  for (Eigen::Index c = 0; c < rd.cols(); ++c) {
    const BigMatrix ur = multiply(span.U, rd.col(c));
    for (Eigen::Index i = 0; i < l; ++i) {
      if (ur(i, 0) % span.D(i, i) != 0) throw std::logic_error("domain relation outside the kernel lattice");
      coords(i, c) = ur(i, 0) / span.D(i, i);
    }
  }
  out.kernel = group_from_presentation(coords);
  return out;
}

PVResult pv_crossed_kgroups(const FGAbelianGroup& K0, const FGAbelianGroup& K1, const GroupHom& a0,
                            const GroupHom& a1) {
  if (a0.domain != K0 || a0.codomain != K0) throw std::invalid_argument("a0 must be an endomorphism of K0");
  if (a1.domain != K1 || a1.codomain != K1) throw std::invalid_argument("a1 must be an endomorphism of K1");
  const auto d0 = kernel_cokernel(one_minus(a0));
  const auto d1 = kernel_cokernel(one_minus(a1));
  auto degree = [](const FGAbelianGroup& sub, const FGAbelianGroup& quotient) {
    PVDegree d{sub, quotient, quotient.free() || sub.trivial(), std::nullopt};
    if (d.split) d.group = direct_sum(sub, quotient);
    return d;
  };
  PVResult r{degree(d0.cokernel, d1.kernel), degree(d1.cokernel, d0.kernel), std::nullopt};
  const bool trivial_on_k0 = equal(a0.matrix, BigMatrix::Identity(K0.generators(), K0.generators()));
  if (trivial_on_k0 && r.k0.group && *r.k0.group == free_group(1))
    r.order_note = "(K0, K0+, [1]) = (Z, N, 1) when the unit class generates; annotated, not derived";
  return r;
}

// ---- grammar ----------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

BigInt parse_int(const std::string& s, const std::string& context) {
  if (s.empty()) throw std::invalid_argument("missing integer in " + context);
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("bad integer '" + s + "' in " + context);
  for (std::size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw std::invalid_argument("bad integer '" + s + "' in " + context);
  return BigInt(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

FGAbelianGroup parse_group(const std::string& text) {
  const std::string s = strip(text);
  if (s.empty()) throw std::invalid_argument("empty group");
  FGAbelianGroup g;
  if (s == "0") return g;
  bool seen_torsion = false;
  for (const auto& term : split(s, '+')) {
    if (term == "Z") {
      if (seen_torsion) throw std::invalid_argument("free part must come first in '" + text + "'");
      ++g.rank;
    } else if (term.rfind("Z^", 0) == 0) {
      if (seen_torsion) throw std::invalid_argument("free part must come first in '" + text + "'");
      const BigInt r = parse_int(term.substr(2), "'" + term + "'");
      if (r < 0 || r > 1000000) throw std::invalid_argument("rank out of range in '" + term + "'");
      g.rank += static_cast<int>(r);
    } else if (term.rfind("Z/", 0) == 0) {
      const BigInt d = parse_int(term.substr(2), "'" + term + "'");
      if (d < 2) throw std::invalid_argument("torsion divisor must be >= 2 in '" + term + "'");
      if (!g.torsion.empty() && d % g.torsion.back() != 0)
        throw std::invalid_argument("divisors must form a chain d1 | d2 | ... in '" + text + "'");
      g.torsion.push_back(d);
      seen_torsion = true;
    } else {
      throw std::invalid_argument("unknown term '" + term + "' in group '" + text + "'");
    }
  }
  return g;
}

std::string to_string(const FGAbelianGroup& g) {
  if (g.trivial()) return "0";
  std::vector<std::string> terms;
  if (g.rank == 1) terms.push_back("Z");
  else if (g.rank > 1) terms.push_back("Z^" + std::to_string(g.rank));
  for (const auto& d : g.torsion) terms.push_back("Z/" + d.str());
  std::string out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) out += " + " + terms[i];
  return out;
}

BigMatrix parse_matrix(const std::string& text, Eigen::Index rows, Eigen::Index cols) {
  const std::string s = strip(text);
  if (s == "[]") return BigMatrix::Zero(rows, cols);
  if (s.size() < 4 || s.substr(0, 2) != "[[" || s.substr(s.size() - 2) != "]]")
    throw std::invalid_argument("matrix must look like [[a,b],[c,d]]: '" + text + "'");
  std::vector<std::vector<BigInt>> data;
  for (const auto& row : split(s.substr(2, s.size() - 4), ']')) {
    std::string body = row;
    if (!data.empty()) {
      if (body.rfind(",[", 0) != 0) throw std::invalid_argument("malformed row in '" + text + "'");
      body = body.substr(2);
    }
    std::vector<BigInt> values;
    for (const auto& entry : split(body, ',')) values.push_back(parse_int(entry, "matrix '" + text + "'"));
    if (!data.empty() && values.size() != data.front().size())
      throw std::invalid_argument("ragged rows in '" + text + "'");
    data.push_back(std::move(values));
  }
  BigMatrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

std::string to_string(const BigMatrix& m) {
  if (m.size() == 0) return "[]";
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << (i ? ",[" : "[");
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j).str();
    out << ']';
  }
  out << ']';
  return out.str();
}

std::string to_string(const PVResult& r) {
  auto show = [](const PVDegree& d) {
    return d.group ? to_string(*d.group) : "ext(" + to_string(d.sub) + ", " + to_string(d.quotient) + ")";
  };
  return "K0 = " + show(r.k0) + ", K1 = " + show(r.k1);
}

}  // namespace tracial
