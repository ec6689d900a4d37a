#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "malcev/graded_module.hpp"
#include "malcev/matrix.hpp"

namespace malcev {

struct Generator {
  std::string label;
  int degree = 0;  // homological degree >= 0
};

// Weighted alphabet of a free graded Lie algebra. The order (by degree, then
// label) is fixed at construction; it defines the Lyndon basis.
class GradedGenerators {
public:
  GradedGenerators() = default;
  explicit GradedGenerators(std::vector<Generator> gens);

  size_t size() const { return gens_.size(); }
  const Generator& operator[](size_t i) const { return gens_[i]; }
  int degree(size_t i) const { return gens_[i].degree; }
  const std::string& label(size_t i) const { return gens_[i].label; }
  int min_degree() const;

private:
  std::vector<Generator> gens_;
};

using Word = std::vector<int>;  // generator indices

// Super-Lyndon basis element: a Lyndon word with its standard bracketing, or
// the square symbol of an odd-degree Lyndon word w (the element (1/2)[w,w],
// so that bracket(w, w) = 2 * symbol).
struct LieWord {
  Word word;
  bool square = false;
  int degree = 0;  // total homological degree
  int weight = 0;  // bracket length (square: twice the word length)

  friend auto operator<=>(const LieWord& a, const LieWord& b) {
    return std::tie(a.degree, a.weight, a.square, a.word) <=>
           std::tie(b.degree, b.weight, b.square, b.word);
  }
  friend bool operator==(const LieWord& a, const LieWord& b) {
    return a.word == b.word && a.square == b.square;
  }
  std::string str(const GradedGenerators& g) const;
};

// Finite linear combination of basis words. Zero coefficients are pruned.
using LieElement = std::map<LieWord, Rat>;

// Element of the weight-truncated tensor algebra.
using TensorPoly = std::map<Word, Rat>;

struct Truncation {
  int max_degree = 0;   // N >= 0
  int max_weight = 1;   // L >= 1
  size_t budget = 4'000'000;  // resource guard on enumerated words
};

// Shared engine: basis enumeration, the embedding into the tensor algebra,
// and the triangular straightening back into the super-Lyndon basis.
class FreeLieContext {
public:
  FreeLieContext(GradedGenerators gens, Truncation t);

  const GradedGenerators& generators() const { return gens_; }
  const Truncation& truncation() const { return trunc_; }

  // Complete basis within the window, sorted; optionally materialized one
  // weight beyond max_weight for use as differential targets.
  const std::vector<LieWord>& basis() const { return basis_; }
  std::vector<LieWord> basis_at(int degree, int weight) const;

  bool is_lyndon(const Word& w) const;
  int word_degree(const Word& w) const;

  // Embedding via iterated commutators; cached per basis word. The leading
  // (lexicographically least) term of rho(b) is b's word with coefficient 1.
  const TensorPoly& rho(const LieWord& b) const;

  LieElement straighten(const TensorPoly& p) const;  // throws on non-Lie input
  TensorPoly expand(const LieElement& x) const;

  LieElement bracket(const LieElement& x, const LieElement& y) const;

  // Tensor algebra helpers (concatenation product; signs live in brackets
  // and derivations only).
  TensorPoly tensor_mul(const TensorPoly& a, const TensorPoly& b) const;
  // Multilinear letter substitution along a linear map into another context.
  static TensorPoly tensor_substitute(const TensorPoly& p,
                                      const std::vector<Vec>& letter_images);
  // Lie algebra map determined by generator images (even, degree 0).
  LieElement substitute(const LieElement& x,
                        const std::vector<LieElement>& images,
                        const FreeLieContext& target) const;

private:
  GradedGenerators gens_;
  Truncation trunc_;
  std::vector<LieWord> basis_;
  mutable std::map<LieWord, TensorPoly> rho_cache_;

  void enumerate_basis();
};

// Graded derivation of the free Lie algebra, given by generator images.
class LieDerivation {
public:
  LieDerivation() = default;
  // shift: homological degree of the derivation (-1 for differentials).
  LieDerivation(std::shared_ptr<const FreeLieContext> ctx,
                std::vector<LieElement> images, int shift);

  int shift() const { return shift_; }
  const std::vector<LieElement>& images() const { return images_; }
  LieElement apply(const LieElement& x) const;
  TensorPoly apply_tensor(const TensorPoly& p) const;
  bool squares_to_zero() const;  // checks D^2 = 0 on all generators

private:
  std::shared_ptr<const FreeLieContext> ctx_;
  std::vector<LieElement> images_;
  int shift_ = 0;
};

// --- spec-level operations -------------------------------------------------

std::vector<LieWord> lyndon_basis(const GradedGenerators& g, const Truncation& t);

LieElement bracket(const GradedGenerators& g, const Truncation& t,
                   const LieElement& x, const LieElement& y);

// Validates degree compatibility of the images and returns the derivation.
LieDerivation extend_derivation(std::shared_ptr<const FreeLieContext> ctx,
                                std::vector<LieElement> images, int shift);

// Dimensions of the weight-p component of the free graded Lie algebra on w,
// per total degree.
std::map<int, size_t> lie_weight_dims(const GradedModule& w, int p,
                                      const Truncation& t);

// Total dimension of the free graded Lie algebra per degree, over all
// weights, from the Hilbert series of the tensor algebra via the super
// Poincare-Birkhoff-Witt factorization. Requires all generator degrees >= 1.
std::map<int, size_t> free_lie_degree_dims(const GradedGenerators& g,
                                           int max_degree);

}  // namespace malcev
