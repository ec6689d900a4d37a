#pragma once

#include <map>
#include <string>
#include <vector>

#include "malcev/graded_ring.hpp"
#include "malcev/matrix.hpp"

namespace malcev {

// Finite-dimensional graded-commutative dg algebra over Q with a chosen
// basis, a sparse product table and a degree +1 differential. Construction
// checks unit, degree additivity, graded commutativity, associativity,
// Leibniz and d^2 = 0.
class DGAlgebra {
public:
  struct BasisElement {
    std::string label;
    int degree;
  };

  DGAlgebra(std::vector<BasisElement> basis, std::string unit_label,
            std::map<std::pair<size_t, size_t>, Vec> products,
            std::map<size_t, Vec> differential);

  static DGAlgebra from_ring(const GradedRing& r);

  size_t dim() const { return basis_.size(); }
  int degree(size_t i) const { return basis_[i].degree; }
  const std::string& label(size_t i) const { return basis_[i].label; }
  size_t unit_index() const { return unit_; }
  int top_degree() const;
  size_t index_of(const std::string& label) const;
  std::vector<size_t> indices_of_degree(int n) const;

  const Vec& product(size_t i, size_t j) const { return table_[i * dim() + j]; }
  Vec mul(const Vec& a, const Vec& b) const;
  Vec d(const Vec& a) const;
  const Vec& d_basis(size_t i) const { return d_[i]; }

  std::map<int, size_t> betti() const;          // dimensions of the basis
  std::map<int, size_t> cohomology_betti() const;
  // ker(d: A^0 -> A^1) must be spanned by the unit.
  bool connected() const;
  // Image of d on the degree-0 part, as vectors in the degree-1 coordinates.
  std::vector<Vec> d_of_degree0() const;

private:
  std::vector<BasisElement> basis_;
  size_t unit_;
  std::vector<Vec> table_;
  std::vector<Vec> d_;
  std::map<std::string, size_t> index_;

  void validate() const;
};

}  // namespace malcev
