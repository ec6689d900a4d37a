#include "malcev/graded_ring.hpp"

#include <algorithm>

#include "malcev/errors.hpp"

namespace malcev {

GradedRing::GradedRing(std::vector<BasisElement> basis, std::string unit_label,
                       std::map<std::pair<size_t, size_t>, Vec> products)
    : basis_(std::move(basis)) {
  const size_t n = basis_.size();
  for (size_t i = 0; i < n; ++i) {
    if (basis_[i].degree < 0)
      throw Error(errc::parse, "negative degree for '" + basis_[i].label + "'");
    if (!index_.emplace(basis_[i].label, i).second)
      throw Error(errc::parse, "duplicate basis label '" + basis_[i].label + "'");
  }
  auto u = index_.find(unit_label);
  if (u == index_.end())
    throw Error(errc::unit_missing, "unit label '" + unit_label + "' not in basis");
  unit_ = u->second;
  if (basis_[unit_].degree != 0)
    throw Error(errc::unit_missing, "unit has nonzero degree");

  table_.assign(n * n, Vec(n));
  for (auto& [key, v] : products) {
    if (key.first >= n || key.second >= n || v.size() != n)
      throw Error(errc::parse, "product entry out of range");
    table_[key.first * n + key.second] = v;
  }
  // Unit products are determined by the axioms; fill the omitted ones and
  // reject explicit contradictions.
  for (size_t i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1;
    for (bool left : {true, false}) {
      auto key = left ? std::make_pair(unit_, i) : std::make_pair(i, unit_);
      if (products.count(key)) {
        if (table_[key.first * n + key.second] != e)
          throw Error(errc::unit_missing,
                      "unit law fails at '" + basis_[i].label + "'");
      } else {
        table_[key.first * n + key.second] = e;
      }
    }
  }
  validate();
}

void GradedRing::validate() const {
  const size_t n = dim();
  for (size_t i = 0; i < n; ++i) {
    if (i != unit_ && basis_[i].degree == 0)
      throw Error(errc::not_connected,
                  "degree-0 element '" + basis_[i].label + "' besides the unit");
  }
  // degree additivity
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const Vec& p = product(i, j);
      for (size_t k = 0; k < n; ++k)
        if (p[k] != 0 && basis_[k].degree != basis_[i].degree + basis_[j].degree)
          throw Error(errc::parse, "product (" + basis_[i].label + "," +
                                       basis_[j].label + ") violates degrees");
    }
  // graded commutativity
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      int sign = (basis_[i].degree * basis_[j].degree) % 2 ? -1 : 1;
      const Vec& ij = product(i, j);
      const Vec& ji = product(j, i);
      for (size_t k = 0; k < n; ++k)
        if (ij[k] != sign * ji[k])
          throw Error(errc::not_graded_commutative,
                      "(" + basis_[i].label + "," + basis_[j].label + ")");
    }
  // associativity on basis triples
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) {
        Vec ek(n);
        ek[k] = 1;
        Vec lhs = cup(product(i, j), ek);
        Vec ei(n);
        ei[i] = 1;
        Vec rhs = cup(ei, product(j, k));
        if (lhs != rhs)
          throw Error(errc::not_associative,
                      "(" + basis_[i].label + "," + basis_[j].label + "," +
                          basis_[k].label + ")");
      }
}

size_t GradedRing::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end())
    throw Error(errc::unknown_basis_label, label);
  return it->second;
}

int GradedRing::top_degree() const {
  int t = 0;
  for (const auto& b : basis_) t = std::max(t, b.degree);
  return t;
}

Vec GradedRing::cup(const Vec& a, const Vec& b) const {
  const size_t n = dim();
  if (a.size() != n || b.size() != n)
    throw Error(errc::degree_mismatch, "cup operand dimension");
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

Vec GradedRing::cup_labels(const std::string& a, const std::string& b) const {
  const size_t n = dim();
  Vec ea(n), eb(n);
  ea[index_of(a)] = 1;
  eb[index_of(b)] = 1;
  return cup(ea, eb);
}

std::map<int, size_t> GradedRing::betti() const {
  std::map<int, size_t> out;
  for (const auto& b : basis_) ++out[b.degree];
  return out;
}

std::vector<size_t> GradedRing::reduced_indices() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < dim(); ++i)
    if (i != unit_) out.push_back(i);
  return out;
}

CoLieData dualize_reduced(const GradedRing& r) {
  CoLieData out;
  std::map<size_t, size_t> pos;  // ring index -> generator index
  for (size_t i : r.reduced_indices()) {
    pos[i] = out.generators.size();
    out.generators.push_back(
        {r.basis(i).label, r.degree(i) - 1, i});
  }
  out.coproduct.assign(out.generators.size(), {});
  for (auto [a, ga] : pos)
    for (auto [b, gb] : pos) {
      const Vec& p = r.product(a, b);
      int sign = r.degree(a) % 2 ? -1 : 1;
      for (auto [c, gc] : pos)
        if (p[c] != 0) out.coproduct[gc].emplace_back(ga, gb, sign * p[c]);
    }
  return out;
}

}  // namespace malcev
