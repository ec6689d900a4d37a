#pragma once

#include <map>
#include <string>
#include <vector>

#include "malcev/matrix.hpp"

namespace malcev {

// Finite-dimensional graded-commutative unital Q-algebra given by a basis
// multiplication table. Construction validates the full axiom set (unit law,
// associativity on all basis triples, graded commutativity, degree
// additivity, connectedness) and rejects violations with a witness.
class GradedRing {
public:
  struct BasisElement {
    std::string label;
    int degree;
  };

  GradedRing(std::vector<BasisElement> basis, std::string unit_label,
             std::map<std::pair<size_t, size_t>, Vec> products);

  size_t dim() const { return basis_.size(); }
  const BasisElement& basis(size_t i) const { return basis_[i]; }
  size_t unit_index() const { return unit_; }
  size_t index_of(const std::string& label) const;
  int degree(size_t i) const { return basis_[i].degree; }
  int top_degree() const;

  // Coefficient vector of basis_i * basis_j.
  const Vec& product(size_t i, size_t j) const { return table_[i * dim() + j]; }
  // Bilinear extension of the table.
  Vec cup(const Vec& a, const Vec& b) const;
  Vec cup_labels(const std::string& a, const std::string& b) const;

  std::map<int, size_t> betti() const;

  // Indices of the non-unit basis elements (all have degree >= 1).
  std::vector<size_t> reduced_indices() const;

private:
  std::vector<BasisElement> basis_;
  size_t unit_;
  std::vector<Vec> table_;  // dim x dim coefficient vectors
  std::map<std::string, size_t> index_;

  void validate() const;
};

// Dual data of the reduced part: one generator of homological degree d-1 per
// reduced basis element of cohomological degree d, together with the
// coproduct obtained by transposing the product table with Koszul signs.
// coproduct[g] lists (a, b, coeff) meaning a~ (x) b~ appears in Delta(g~);
// indices refer to positions in `generators`.
struct CoLieData {
  struct Generator {
    std::string label;       // label of the dualized ring basis element
    int degree;              // homological degree (= ring degree - 1)
    size_t ring_index;       // index into the source ring basis
  };
  std::vector<Generator> generators;
  std::vector<std::vector<std::tuple<size_t, size_t, Rat>>> coproduct;
};

// Transpose of the reduced product structure: for c appearing in a*b with
// coefficient l, Delta(c~) picks up a~ (x) b~ with coefficient (-1)^{deg a} l.
CoLieData dualize_reduced(const GradedRing& r);

}  // namespace malcev
