#include "malcev/dg_algebra.hpp"

#include <algorithm>

#include "malcev/chain_complex.hpp"
#include "malcev/errors.hpp"

namespace malcev {

DGAlgebra::DGAlgebra(std::vector<BasisElement> basis, std::string unit_label,
                     std::map<std::pair<size_t, size_t>, Vec> products,
                     std::map<size_t, Vec> differential)
    : basis_(std::move(basis)) {
  const size_t n = basis_.size();
  for (size_t i = 0; i < n; ++i) {
    if (basis_[i].degree < 0)
      throw Error(errc::parse, "negative degree '" + basis_[i].label + "'");
    if (!index_.emplace(basis_[i].label, i).second)
      throw Error(errc::parse, "duplicate label '" + basis_[i].label + "'");
  }
  auto u = index_.find(unit_label);
  if (u == index_.end())
    throw Error(errc::unit_missing, "unit '" + unit_label + "'");
  unit_ = u->second;
  if (basis_[unit_].degree != 0)
    throw Error(errc::unit_missing, "unit has nonzero degree");

  table_.assign(n * n, Vec(n));
  for (auto& [key, v] : products) {
    if (key.first >= n || key.second >= n || v.size() != n)
      throw Error(errc::parse, "product entry out of range");
    table_[key.first * n + key.second] = v;
  }
  for (size_t i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1;
    for (bool left : {true, false}) {
      auto key = left ? std::make_pair(unit_, i) : std::make_pair(i, unit_);
      if (products.count(key)) {
        if (table_[key.first * n + key.second] != e)
          throw Error(errc::unit_missing, "unit law at '" + basis_[i].label + "'");
      } else {
        table_[key.first * n + key.second] = e;
      }
    }
  }
  d_.assign(n, Vec(n));
  for (auto& [i, v] : differential) {
    if (i >= n || v.size() != n)
      throw Error(errc::parse, "differential entry out of range");
    d_[i] = v;
  }
  validate();
}

DGAlgebra DGAlgebra::from_ring(const GradedRing& r) {
  std::vector<BasisElement> basis;
  for (size_t i = 0; i < r.dim(); ++i)
    basis.push_back({r.basis(i).label, r.basis(i).degree});
  std::map<std::pair<size_t, size_t>, Vec> prod;
  for (size_t i = 0; i < r.dim(); ++i)
    for (size_t j = 0; j < r.dim(); ++j) prod[{i, j}] = r.product(i, j);
  return DGAlgebra(std::move(basis), r.basis(r.unit_index()).label,
                   std::move(prod), {});
}

void DGAlgebra::validate() const {
  const size_t n = dim();
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < n; ++k) {
      if (d_[i][k] != 0 && basis_[k].degree != basis_[i].degree + 1)
        throw Error(errc::parse, "differential of '" + basis_[i].label +
                                     "' violates degrees");
    }
    if (i == unit_)
      for (size_t k = 0; k < n; ++k)
        if (d_[i][k] != 0)
          throw Error(errc::parse, "d(1) != 0");
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const Vec& p = product(i, j);
      for (size_t k = 0; k < n; ++k)
        if (p[k] != 0 && basis_[k].degree != basis_[i].degree + basis_[j].degree)
          throw Error(errc::parse, "product degrees at (" + basis_[i].label +
                                       "," + basis_[j].label + ")");
      int sign = (basis_[i].degree * basis_[j].degree) % 2 ? -1 : 1;
      const Vec& q = product(j, i);
      for (size_t k = 0; k < n; ++k)
        if (p[k] != sign * q[k])
          throw Error(errc::not_graded_commutative,
                      "(" + basis_[i].label + "," + basis_[j].label + ")");
    }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) {
        Vec ek(n), ei(n);
        ek[k] = 1;
        ei[i] = 1;
        if (mul(product(i, j), ek) != mul(ei, product(j, k)))
          throw Error(errc::not_associative,
                      "(" + basis_[i].label + "," + basis_[j].label + "," +
                          basis_[k].label + ")");
      }
  // d^2 = 0 and the Leibniz rule
  for (size_t i = 0; i < n; ++i) {
    Vec dd = d(d_[i]);
    for (const auto& c : dd)
      if (c != 0) throw Error(errc::parse, "d^2 != 0 at '" + basis_[i].label + "'");
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec lhs = d(product(i, j));
      Vec ej(n), ei(n);
      ej[j] = 1;
      ei[i] = 1;
      Vec rhs = mul(d_[i], ej);
      Vec t = mul(ei, d_[j]);
      int sign = basis_[i].degree % 2 ? -1 : 1;
      for (size_t k = 0; k < n; ++k) rhs[k] += sign * t[k];
      if (lhs != rhs)
        throw Error(errc::parse, "Leibniz fails at (" + basis_[i].label + "," +
                                     basis_[j].label + ")");
    }
}

int DGAlgebra::top_degree() const {
  int t = 0;
  for (const auto& b : basis_) t = std::max(t, b.degree);
  return t;
}

size_t DGAlgebra::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw Error(errc::unknown_basis_label, label);
  return it->second;
}

std::vector<size_t> DGAlgebra::indices_of_degree(int n) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < dim(); ++i)
    if (basis_[i].degree == n) out.push_back(i);
  return out;
}

Vec DGAlgebra::mul(const Vec& a, const Vec& b) const {
  const size_t n = dim();
  Vec out(n);
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      const Vec& p = product(i, j);
      Rat c = a[i] * b[j];
      for (size_t k = 0; k < n; ++k)
        if (p[k] != 0) out[k] += c * p[k];
    }
  }
  return out;
}

Vec DGAlgebra::d(const Vec& a) const {
  const size_t n = dim();
  Vec out(n);
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (size_t k = 0; k < n; ++k)
      if (d_[i][k] != 0) out[k] += a[i] * d_[i][k];
  }
  return out;
}

std::map<int, size_t> DGAlgebra::betti() const {
  std::map<int, size_t> out;
  for (const auto& b : basis_) ++out[b.degree];
  return out;
}

std::map<int, size_t> DGAlgebra::cohomology_betti() const {
  std::map<int, size_t> out;
  // assemble per-degree differential matrices
  for (int n = 0; n <= top_degree(); ++n) {
    auto src = indices_of_degree(n);
    auto tgt = indices_of_degree(n + 1);
    auto lower = indices_of_degree(n - 1);
    Matrix dn(tgt.size(), src.size());
    for (size_t c = 0; c < src.size(); ++c)
      for (size_t r = 0; r < tgt.size(); ++r) dn(r, c) = d_[src[c]][tgt[r]];
    Matrix dprev(src.size(), lower.size());
    for (size_t c = 0; c < lower.size(); ++c)
      for (size_t r = 0; r < src.size(); ++r) dprev(r, c) = d_[lower[c]][src[r]];
    size_t h = homology_representatives(dn, dprev).cols();
    if (h) out[n] = h;
  }
  return out;
}

bool DGAlgebra::connected() const {
  auto deg0 = indices_of_degree(0);
  auto deg1 = indices_of_degree(1);
  Matrix d0(deg1.size(), deg0.size());
  for (size_t c = 0; c < deg0.size(); ++c)
    for (size_t r = 0; r < deg1.size(); ++r) d0(r, c) = d_[deg0[c]][deg1[r]];
  auto rki = rank_kernel_image(d0);
  return rki.kernel.cols() == 1;  // ker d^0 = <1>
}

std::vector<Vec> DGAlgebra::d_of_degree0() const {
  auto deg0 = indices_of_degree(0);
  auto deg1 = indices_of_degree(1);
  std::vector<Vec> out;
  RowReducer span(deg1.size());
  for (size_t c : deg0) {
    Vec v(deg1.size());
    for (size_t r = 0; r < deg1.size(); ++r) v[r] = d_[c][deg1[r]];
    if (span.add(v)) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace malcev
