#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "malcev/dg_algebra.hpp"
#include "malcev/free_lie.hpp"
#include "malcev/graded_ring.hpp"

namespace malcev {

// Free chain Lie algebra with a degree -1 differential, truncated to the
// window (max_degree, max_weight). The internal context keeps one extra
// bracket weight so that differentials have complete targets at the
// truncation boundary; reported results never exceed the window.
struct FreeDGLie {
  std::shared_ptr<const FreeLieContext> ctx;  // built with weight L+1
  LieDerivation differential;
  Truncation window;
  // true when every differential image is purely quadratic, so that homology
  // splits along the bracket-weight grading
  bool weight_split = false;

  const GradedGenerators& generators() const { return ctx->generators(); }
  // basis of the window (weight <= L, degree <= N)
  std::vector<LieWord> window_basis() const;
  bool verify_square_zero() const { return differential.squares_to_zero(); }
};

// Quillen model of a connected graded-commutative ring: the free graded Lie
// algebra on the shifted reduced dual with differential transposed from the
// cup product. Throws SignConventionFailure if the induced differential does
// not square to zero.
FreeDGLie build_model(const GradedRing& a, const Truncation& t);

// Same construction for a dg algebra with nonzero differential, followed by
// the quotient killing the duals of d(A^0) in degree 0. For d = 0 inputs the
// result coincides with build_model.
FreeDGLie build_model_reduced(const DGAlgebra& a, const Truncation& t);

struct HomotopyEntry {
  int n = 0;
  size_t dim = 0;
  std::map<int, size_t> weights;  // formality weight -> dimension
  bool stable = false;
};

struct HomotopyTable {
  std::vector<HomotopyEntry> entries;           // n >= 2
  std::vector<std::pair<int, size_t>> lcs;      // lower-central-series ranks of
                                                // the degree-0 tower, by weight
  std::map<int, std::vector<std::pair<LieElement, int>>> reps;  // per n
};

HomotopyTable homotopy_groups(const FreeDGLie& m, const Truncation& t);

// Bracket of two cycles, reduced modulo boundaries. Throws NotACycle.
LieElement whitehead_bracket(const FreeDGLie& m, const LieElement& x,
                             const LieElement& y);

// Eliminates contractible pairs of generators (lowest degree first) until the
// differential has no linear part. The returned model has equal
// abelianization homology, which is verified.
FreeDGLie minimal_model(const FreeDGLie& m, const Truncation& t);

struct AdamsPage {
  // column index p = -(bracket weight); total degree p + q
  std::map<std::pair<int, int>, size_t> dims;
  std::map<std::pair<int, int>, std::vector<LieWord>> basis;
  // d1 out of (p,q) into (p-1,q), in the listed bases
  std::map<std::pair<int, int>, Matrix> d1;
};

AdamsPage adams_e1(const GradedRing& a, const Truncation& t);

// Free graded-commutative cochain algebra on the duals of the Lie basis
// words, with differential transposed from the differential and the bracket.
class CEAlgebra {
public:
  using Monomial = std::vector<int>;  // sorted generator indices

  // generators
  std::vector<std::string> gen_labels;
  std::vector<int> gen_degree;  // cohomological
  std::vector<int> gen_weight;  // formality weight (degree + bracket weight)
  std::vector<bool> gen_odd;

  std::vector<Monomial> basis;
  std::vector<int> degree;
  std::vector<int> weight;
  std::map<Monomial, size_t> index;
  std::vector<std::map<size_t, Rat>> d_gen;  // differential of each generator

  int max_degree = 0;
  int weight_cutoff = 0;  // blocks of weight <= cutoff are complete
  bool weighted = false;

  Vec d(const Vec& v) const;
  std::map<size_t, Rat> d_sparse(size_t monomial_index) const;
  Vec mul(const Vec& a, const Vec& b) const;
  bool d_squares_to_zero() const;

  // cohomology dimensions per degree; in weighted mode only the complete
  // (certified) weight blocks are counted
  std::map<int, size_t> cohomology_betti() const;
  std::map<std::pair<int, int>, size_t> cohomology_blocks() const;
};

CEAlgebra ce_cochains(const FreeDGLie& m, const Truncation& t);

}  // namespace malcev
