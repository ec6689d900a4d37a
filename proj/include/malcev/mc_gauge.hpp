#pragma once

#include <map>
#include <optional>
#include <string>

#include "malcev/dg_algebra.hpp"
#include "malcev/quillen.hpp"

namespace malcev {

// Element of the universal envelope of the tensor differential graded Lie
// algebra A (x) g, with g free: coefficients in A against words in the Lie
// generators, truncated by bracket weight.
struct EnvElement {
  // key: (algebra basis index, tensor word); empty word = the unit of U(g)
  std::map<std::pair<size_t, Word>, Rat> terms;

  bool zero() const { return terms.empty(); }
};

// Solution candidate of the Maurer-Cartan equation: components in
// A^{n+1} (x) g_n, stored against the super-Lyndon basis.
struct DGMCElement {
  std::map<std::pair<size_t, LieWord>, Rat> terms;
};

// Gauge transformation exp(u) with log in degree 0: components in
// A^n (x) g_n.
struct DGGaugeElement {
  std::map<std::pair<size_t, LieWord>, Rat> log_terms;
};

// Calculus in U(A (x) g). All operations are exact; powers terminate because
// the Lie weight is truncated.
class Envelope {
public:
  Envelope(const DGAlgebra& a, const FreeDGLie& g) : a_(&a), g_(&g) {}

  const DGAlgebra& algebra() const { return *a_; }
  const FreeDGLie& lie() const { return *g_; }

  int total_degree(size_t ai, const Word& w) const;
  EnvElement mul(const EnvElement& x, const EnvElement& y) const;
  // Differential of the tensor complex. The gauge correction term (dU)U^{-1}
  // carries the opposite sign on the Lie-side part; the sign pair is pinned
  // by the normalization transport identities.
  EnvElement d(const EnvElement& x, bool lie_sign_flip = false) const;
  EnvElement exp(const EnvElement& x) const;  // x without constant term
  EnvElement log(const EnvElement& x) const;  // x = 1 + nilpotent

  EnvElement embed(const DGMCElement& w) const;
  EnvElement embed_log(const DGGaugeElement& u) const;
  // Straightens each algebra column back into the Lie basis; throws if some
  // column is not a Lie element.
  std::map<std::pair<size_t, LieWord>, Rat> primitive(const EnvElement& x) const;

private:
  const DGAlgebra* a_;
  const FreeDGLie* g_;
};

struct MCVerdict {
  bool holds = false;
  EnvElement residual;  // d(w) + w*w
};

// Checks the Maurer-Cartan equation exactly within the truncation.
MCVerdict is_mc(const DGAlgebra& a, const FreeDGLie& g, const DGMCElement& w);

// Gauge action exp(u) . w = U w U^{-1} - (dU) U^{-1}. Requires w to satisfy
// the equation (NotMC otherwise); the output is checked as well.
DGMCElement gauge_act(const DGAlgebra& a, const FreeDGLie& g,
                      const DGGaugeElement& u, const DGMCElement& w);

// Composition of gauge transformations: exp(r) = exp(u) exp(v).
DGGaugeElement gauge_compose(const DGAlgebra& a, const FreeDGLie& g,
                             const DGGaugeElement& u, const DGGaugeElement& v);
DGGaugeElement gauge_inverse(const DGGaugeElement& u);

// log(exp(x) exp(y)) in the truncated free Lie algebra.
LieElement bch(const FreeLieContext& ctx, const LieElement& x,
               const LieElement& y);

struct MCSolveOutcome {
  std::optional<DGMCElement> solution;
  int obstruction_degree = -1;  // cochain degree where the extension fails
  std::string note;
};

// Extends a seed (its components stay pinned) to a full Maurer-Cartan
// solution degree by degree, or reports the first obstruction.
MCSolveOutcome mc_solve(const DGAlgebra& a, const FreeDGLie& g,
                        const DGMCElement& seed, const Truncation& t);

}  // namespace malcev
