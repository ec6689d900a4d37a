#pragma once

#include <map>
#include <string>
#include <vector>

#include "malcev/matrix.hpp"

namespace malcev {

// Bounded chain complex of finite-dimensional Q-vector spaces with named
// bases. Differentials lower the degree by one; d_n : C_n -> C_{n-1}.
// d о d = 0 is checked at construction.
class ChainComplexQ {
public:
  ChainComplexQ(std::map<int, std::vector<std::string>> labels,
                std::map<int, Matrix> differentials);

  int min_degree() const { return min_deg_; }
  int max_degree() const { return max_deg_; }
  size_t dim(int n) const;
  const std::vector<std::string>& labels(int n) const;
  // The differential leaving degree n (zero matrix when absent).
  Matrix differential(int n) const;

  struct Homology {
    size_t dimension = 0;
    Matrix representatives;  // columns are cycles in the degree-n basis,
                             // independent modulo boundaries
  };
  Homology homology(int n) const;

private:
  std::map<int, std::vector<std::string>> labels_;
  std::map<int, Matrix> diffs_;
  int min_deg_, max_deg_;
  static const std::vector<std::string> empty_;
};

// Representatives of ker(d_out) modulo im(d_in), where d_out leaves and d_in
// enters the same space. Shared by chain and cochain homology.
Matrix homology_representatives(const Matrix& d_out, const Matrix& d_in);

}  // namespace malcev
