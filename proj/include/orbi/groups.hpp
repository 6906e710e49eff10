#pragma once

#include <algorithm>
#include <complex>
#include <memory>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "orbi/error.hpp"
#include "orbi/matrix.hpp"
#include "orbi/rational.hpp"

namespace orbi {

inline constexpr double kMatrixTol = 1e-12;

// Finite group given by its multiplication table; elements are 0..n-1.
class FiniteGroup {
 public:
  FiniteGroup(std::string name, std::vector<std::vector<int>> table, std::vector<std::string> labels = {})
      : name_(std::move(name)), table_(std::move(table)), labels_(std::move(labels)) {
    auto problems = check_table(table_);
    if (!problems.empty()) throw InputError("group '" + name_ + "': " + problems.front());
    int n = order();
    for (int e = 0; e < n; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g) ok = table_[e][g] == g && table_[g][e] == g;
      if (ok) {
        identity_ = e;
        break;
      }
    }
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h)
        if (table_[g][h] == identity_) inverse_[g] = h;
    if (labels_.empty())
      for (int g = 0; g < n; ++g) labels_.push_back(std::to_string(g));
    if (static_cast<int>(labels_.size()) != n) throw InputError("group '" + name_ + "': wrong number of labels");
  }

  // Returns the violated group axioms for a candidate table (empty when valid).
  static std::vector<std::string> check_table(const std::vector<std::vector<int>>& t) {
    std::vector<std::string> out;
    int n = static_cast<int>(t.size());
    if (n == 0) return {"empty multiplication table"};
    for (const auto& row : t) {
      if (static_cast<int>(row.size()) != n) return {"multiplication table is not square"};
      for (int v : row)
        if (v < 0 || v >= n) return {"multiplication table entry out of range"};
    }
    int identity = -1;
    for (int e = 0; e < n && identity < 0; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g) ok = t[e][g] == g && t[g][e] == g;
      if (ok) identity = e;
    }
    if (identity < 0) out.push_back("no identity element");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (t[t[a][b]][c] != t[a][t[b][c]]) {
            out.push_back("not associative at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
            return out;
          }
    if (identity >= 0)
      for (int g = 0; g < n; ++g) {
        bool has = false;
        for (int h = 0; h < n; ++h) has = has || (t[g][h] == identity && t[h][g] == identity);
        if (!has) {
          out.push_back("element " + std::to_string(g) + " has no inverse");
          break;
        }
      }
    return out;
  }

  static std::shared_ptr<const FiniteGroup> trivial() { return cyclic(1); }

  static std::shared_ptr<const FiniteGroup> cyclic(int n) {
    if (n < 1) throw InputError("cyclic group order must be positive");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    return std::make_shared<const FiniteGroup>(n == 1 ? "1" : "Z" + std::to_string(n), std::move(t));
  }

  // Symmetries of the regular n-gon, order 2n: element r^k is k, s r^k is n + k.
  static std::shared_ptr<const FiniteGroup> dihedral(int n) {
    if (n < 1) throw InputError("dihedral index must be positive");
    int m = 2 * n;
    std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
    auto enc = [n](int flip, int k) { return flip * n + ((k % n) + n) % n; };
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        int fa = a / n, ka = a % n, fb = b / n, kb = b % n;
        // (s^fa r^ka)(s^fb r^kb) = s^(fa+fb) r^((-1)^fb ka + kb)
        t[a][b] = enc((fa + fb) % 2, (fb ? -ka : ka) + kb);
      }
    return std::make_shared<const FiniteGroup>("D" + std::to_string(n), std::move(t));
  }

  // Permutations of {0..n-1} in lexicographic order; composition (p*q)(i) = p(q(i)).
  static std::shared_ptr<const FiniteGroup> symmetric(int n) {
    if (n < 1 || n > 6) throw InputError("symmetric group degree must be in 1..6");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    auto index_of = [&](const std::vector<int>& q) {
      return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
    };
    int m = static_cast<int>(perms.size());
    std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
    std::vector<std::string> labels;
    for (int a = 0; a < m; ++a) {
      std::string l = "(";
      for (int i = 0; i < n; ++i) l += std::to_string(perms[a][i] + 1);
      labels.push_back(l + ")");
      for (int b = 0; b < m; ++b) {
        std::vector<int> c(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) c[i] = perms[a][perms[b][i]];
        t[a][b] = index_of(c);
      }
    }
    return std::make_shared<const FiniteGroup>("S" + std::to_string(n), std::move(t), std::move(labels));
  }

  // (g, h) is encoded as g * |H| + h.
  static std::shared_ptr<const FiniteGroup> direct_product(const FiniteGroup& g, const FiniteGroup& h) {
    int n = g.order(), m = h.order();
    std::vector<std::vector<int>> t(static_cast<std::size_t>(n * m), std::vector<int>(static_cast<std::size_t>(n * m)));
    for (int a = 0; a < n * m; ++a)
      for (int b = 0; b < n * m; ++b) t[a][b] = g.mul(a / m, b / m) * m + h.mul(a % m, b % m);
    return std::make_shared<const FiniteGroup>(g.name() + "x" + h.name(), std::move(t));
  }

  const std::string& name() const { return name_; }
  int order() const { return static_cast<int>(table_.size()); }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[a][b]; }
  int inverse(int a) const { return inverse_[a]; }
  int conjugate(int h, int g) const { return mul(mul(h, g), inverse(h)); }  // h g h^-1
  const std::vector<std::vector<int>>& table() const { return table_; }
  const std::vector<std::string>& labels() const { return labels_; }

  int element_order(int g) const {
    int k = 1;
    for (int x = g; x != identity_; x = mul(x, g)) ++k;
    return k;
  }

  bool is_abelian() const {
    for (int a = 0; a < order(); ++a)
      for (int b = 0; b < order(); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

 private:
  std::string name_;
  std::vector<std::vector<int>> table_;
  std::vector<std::string> labels_;
  int identity_ = 0;
  std::vector<int> inverse_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(GroupPtr parent, std::vector<int> elements) : parent_(std::move(parent)), elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  }

  const GroupPtr& parent() const { return parent_; }
  const std::vector<int>& elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }
  bool contains(int g) const { return std::binary_search(elements_.begin(), elements_.end(), g); }
  bool is_trivial() const { return size() == 1; }
  bool is_whole() const { return size() == parent_->order(); }

  bool is_closed() const {
    if (!contains(parent_->identity())) return false;
    for (int a : elements_)
      for (int b : elements_)
        if (!contains(parent_->mul(a, b))) return false;
    return true;
  }

  bool is_normal() const {
    for (int h = 0; h < parent_->order(); ++h)
      for (int g : elements_)
        if (!contains(parent_->conjugate(h, g))) return false;
    return true;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.elements_ == b.elements_; }

 private:
  GroupPtr parent_;
  std::vector<int> elements_;
};

// Partition into conjugacy classes, sorted by minimal element index.
inline std::vector<std::vector<int>> conjugacy_classes(const FiniteGroup& g) {
  std::vector<int> seen(static_cast<std::size_t>(g.order()), 0);
  std::vector<std::vector<int>> out;
  for (int x = 0; x < g.order(); ++x) {
    if (seen[x]) continue;
    std::set<int> cls;
    for (int h = 0; h < g.order(); ++h) cls.insert(g.conjugate(h, x));
    for (int c : cls) seen[c] = 1;
    out.emplace_back(cls.begin(), cls.end());
  }
  return out;
}

inline int conjugacy_class_of(const std::vector<std::vector<int>>& classes, int g) {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (std::binary_search(classes[i].begin(), classes[i].end(), g)) return static_cast<int>(i);
  throw InputError("element not found in conjugacy classes");
}

inline Subgroup centralizer(const GroupPtr& g, int x) {
  std::vector<int> c;
  for (int h = 0; h < g->order(); ++h)
    if (g->mul(h, x) == g->mul(x, h)) c.push_back(h);
  return Subgroup(g, std::move(c));
}

// Real orthogonal representation: one d x d matrix per group element.
struct Representation {
  GroupPtr group;
  std::vector<Mat> matrices;

  int dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
  const Mat& operator()(int g) const { return matrices[static_cast<std::size_t>(g)]; }

  static Representation trivial(GroupPtr g, int dim) {
    return {g, std::vector<Mat>(static_cast<std::size_t>(g->order()), Mat::Identity(dim, dim))};
  }

  // Cyclic group Z_n acting on R^2 by rotation through 2 pi k g / n.
  static Representation rotation(GroupPtr g, int k = 1) {
    int n = g->order();
    Representation r{g, {}};
    for (int e = 0; e < n; ++e) {
      double t = 2.0 * std::numbers::pi * static_cast<double>(k * e % n) / n;
      Mat m(2, 2);
      m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      snap(m);
      r.matrices.push_back(m);
    }
    return r;
  }

  // Rounds entries within 1e-15 of 0, +-1/2, +-1 onto those values.
  static void snap(Mat& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
      for (double v : {0.0, 0.5, -0.5, 1.0, -1.0})
        if (std::fabs(m.data()[i] - v) < 1e-15) m.data()[i] = v;
  }

  std::vector<std::string> problems(double tol = kMatrixTol) const {
    std::vector<std::string> out;
    if (!group) return {"representation without a group"};
    if (static_cast<int>(matrices.size()) != group->order()) return {"expected one matrix per group element"};
    int d = dim();
    for (const auto& m : matrices)
      if (m.rows() != d || m.cols() != d) return {"representation matrices have inconsistent sizes"};
    if (d == 0) return out;
    for (int a = 0; a < group->order(); ++a) {
      if (((*this)(a).transpose() * (*this)(a) - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
        out.push_back("matrix of element " + std::to_string(a) + " is not orthogonal");
        break;
      }
    }
    for (int a = 0; a < group->order() && out.size() < 2; ++a)
      for (int b = 0; b < group->order(); ++b)
        if (d > 0 && ((*this)(a) * (*this)(b) - (*this)(group->mul(a, b))).cwiseAbs().maxCoeff() > tol) {
          out.push_back("not a homomorphism at (" + std::to_string(a) + "," + std::to_string(b) + ")");
          break;
        }
    return out;
  }
};

struct ComplexRepresentation {
  GroupPtr group;
  std::vector<CMat> matrices;

  int dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
  const CMat& operator()(int g) const { return matrices[static_cast<std::size_t>(g)]; }

  static ComplexRepresentation trivial(GroupPtr g, int dim) {
    return {g, std::vector<CMat>(static_cast<std::size_t>(g->order()), CMat::Identity(dim, dim))};
  }
  // Z_n acting on C by exp(2 pi i k g / n).
  static ComplexRepresentation character(GroupPtr g, int k = 1) {
    int n = g->order();
    ComplexRepresentation r{g, {}};
    for (int e = 0; e < n; ++e) {
      double t = 2.0 * std::numbers::pi * static_cast<double>(k * e % n) / n;
      CMat m(1, 1);
      m(0, 0) = std::polar(1.0, t);
      r.matrices.push_back(m);
    }
    return r;
  }

  std::vector<std::string> problems(double tol = kMatrixTol) const {
    if (!group) return {"complex representation without a group"};
    if (static_cast<int>(matrices.size()) != group->order()) return {"expected one unitary matrix per group element"};
    int d = dim();
    std::vector<std::string> out;
    if (d == 0) return out;
    for (int a = 0; a < group->order(); ++a)
      if (((*this)(a).adjoint() * (*this)(a) - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
        out.push_back("matrix of element " + std::to_string(a) + " is not unitary");
        break;
      }
    for (int a = 0; a < group->order() && out.empty(); ++a)
      for (int b = 0; b < group->order(); ++b)
        if (d > 0 && ((*this)(a) * (*this)(b) - (*this)(group->mul(a, b))).cwiseAbs().maxCoeff() > 1e-10) {
          out.push_back("complex action is not a homomorphism");
          break;
        }
    (void)tol;
    return out;
  }
};

inline Representation direct_sum(const Representation& a, const Representation& b) {
  if (a.group != b.group && a.group->table() != b.group->table())
    throw InputError("direct sum of representations of different groups");
  Representation r{a.group, {}};
  for (std::size_t g = 0; g < a.matrices.size(); ++g) r.matrices.push_back(block_diag(a.matrices[g], b.matrices[g]));
  return r;
}

inline ComplexRepresentation direct_sum(const ComplexRepresentation& a, const ComplexRepresentation& b) {
  ComplexRepresentation r{a.group, {}};
  for (std::size_t g = 0; g < a.matrices.size(); ++g) r.matrices.push_back(block_diag(a.matrices[g], b.matrices[g]));
  return r;
}

// Elements acting as the identity (within tol).
inline Subgroup action_kernel(const Representation& rep, double tol = kMatrixTol) {
  std::vector<int> k;
  int d = rep.dim();
  for (int g = 0; g < rep.group->order(); ++g)
    if (d == 0 || (rep(g) - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= tol) k.push_back(g);
  return Subgroup(rep.group, std::move(k));
}

// Orthonormal basis (columns) of the fixed subspace ker(M(g) - I). The
// projector onto it is the average of M(g)^j over the cyclic group <g>; its
// columns are orthonormalised in order, so the identity returns the standard
// basis.
inline Mat fixed_subspace(const Mat& m, int order) {
  Eigen::Index d = m.rows();
  Mat p = Mat::Zero(d, d), power = Mat::Identity(d, d);
  for (int j = 0; j < order; ++j) {
    p += power;
    power = power * m;
  }
  p /= order;
  Representation::snap(p);
  return column_space_basis(p, 1e-9);
}

inline Mat fixed_subspace(const Representation& rep, int g) {
  return fixed_subspace(rep(g), rep.group->element_order(g));
}

// Degree-shifting number of g: eigenvalues of the unitary matrix are
// exp(2 pi i m_j / m) with m the order of g and 0 <= m_j < m; the shift is
// sum_j m_j / m.
inline Rational degree_shift(const ComplexRepresentation& rep, int g) {
  int m = rep.group->element_order(g);
  if (rep.dim() == 0) return Rational(0);
  Eigen::ComplexEigenSolver<CMat> es(rep(g));
  if (es.info() != Eigen::Success) throw CertificateError("eigenvalue computation failed");
  Rational total(0);
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    std::complex<double> lam = es.eigenvalues()(j);
    double arg = std::arg(lam);
    long mj = std::lround(m * arg / (2.0 * std::numbers::pi));
    mj = ((mj % m) + m) % m;
    std::complex<double> expect = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(mj) / m);
    if (std::abs(expect - lam) > 1e-8)
      throw CertificateError("eigenvalue of element " + std::to_string(g) + " is not an m-th root of unity for m = " +
                             std::to_string(m));
    total += Rational(mj, m);
  }
  return total;
}

// Number of eigenvalues different from 1: the complex codimension of the
// fixed subspace.
inline int fixed_codimension(const ComplexRepresentation& rep, int g) {
  if (rep.dim() == 0) return 0;
  Eigen::ComplexEigenSolver<CMat> es(rep(g));
  int c = 0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (std::abs(es.eigenvalues()(j) - 1.0) > 1e-8) ++c;
  return c;
}

}  // namespace orbi
