#pragma once

#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "malcev/dg_algebra.hpp"
#include "malcev/free_lie.hpp"
#include "malcev/mc_gauge.hpp"

namespace malcev {

// Bounded cochain complex presented by dimensions and degree +1 matrices.
struct Cochain {
  std::vector<size_t> dims;   // degrees 0..dims.size()-1
  std::vector<Matrix> d;      // d[n]: degree n -> n+1

  size_t dim(int n) const {
    return n >= 0 && n < static_cast<int>(dims.size()) ? dims[n] : 0;
  }
};

struct CosimplicialModule {
  std::vector<size_t> dims;                  // levels 0..n_max
  std::vector<std::vector<Matrix>> coface;   // coface[n][i]: level n -> n+1
  std::vector<std::vector<Matrix>> codegen;  // codegen[n][i]: level n+1 -> n

  int levels() const { return static_cast<int>(dims.size()) - 1; }
  void validate() const;  // cosimplicial identities, exactly
};

// Basis symbol of the denormalization: an increasing coface word applied to
// a basis element of the underlying complex.
struct DKSymbol {
  int base_degree;
  std::vector<int> word;  // 1 <= j_1 < ... < j_s <= level
  size_t base_index;

  friend auto operator<=>(const DKSymbol&, const DKSymbol&) = default;
};

struct Denormalized {
  CosimplicialModule mod;
  std::vector<std::vector<DKSymbol>> symbols;  // per level, basis order
  // positions of the normalized (empty-word) symbols per level
  std::vector<std::vector<size_t>> normalized;
};

Denormalized denormalize(const Cochain& v, int n_max);

struct Normalized {
  Cochain complex;
  std::vector<Matrix> inclusion;  // N^n -> level n
};

Normalized normalize(const CosimplicialModule& c);

// (p,q)-shuffles with their signs; the one sign routine shared by the
// shuffle product, the shuffle bracket and the transport proofs.
struct Shuffle {
  std::vector<int> mu;  // ascending, |mu| = p
  std::vector<int> nu;  // ascending, |nu| = q
  int sign;
};
std::vector<Shuffle> shuffles(int p, int q);

struct CosimplicialAlgebra {
  Denormalized da;
  // per level: product matrix of shape dim x dim*dim (columns j*dim+k)
  std::vector<Matrix> product;
  std::vector<Vec> unit;  // unit element per level

  Vec mul(int level, const Vec& x, const Vec& y) const;
};

// Denormalization of a graded-commutative dg algebra with the
// Eilenberg-MacLane shuffle product.
CosimplicialAlgebra shuffle_algebra(const DGAlgebra& a, int n_max);

// Simplicial module: levelwise spaces with faces and degeneracies.
struct SimplicialModule {
  std::vector<size_t> dims;
  std::vector<std::vector<Matrix>> face;   // face[n][i]: level n -> n-1
  std::vector<std::vector<Matrix>> degen;  // degen[n][i]: level n -> n+1

  int levels() const { return static_cast<int>(dims.size()) - 1; }
  void validate() const;
};

// Transpose-dual of a cosimplicial module.
SimplicialModule simplicial_dual(const CosimplicialModule& c);

// Simplicial Lie algebra: levelwise nilpotent Lie algebras given by
// structure constants, with matrices for faces and degeneracies. When built
// levelwise-free the generator data is retained for envelope computations.
struct SimplicialLie {
  std::vector<size_t> dims;                  // Lie dimension per level
  std::vector<std::vector<Vec>> bracket;     // per level, table i*dim+j
  std::vector<std::vector<Matrix>> face;     // on the Lie basis
  std::vector<std::vector<Matrix>> degen;

  // free presentation (present when built levelwise-free)
  bool is_free = false;
  int max_weight = 1;
  SimplicialModule generators;
  std::vector<std::shared_ptr<FreeLieContext>> ctx;  // per level

  int levels() const { return static_cast<int>(dims.size()) - 1; }
  void validate() const;  // identities + Lie homomorphism property

  static SimplicialLie constant(size_t dim, const std::vector<Vec>& table,
                                int n_max);
  static SimplicialLie levelwise_free(const SimplicialModule& v, int weight);
};

// Chain Lie algebra assembled from a normalization: the shuffle bracket on
// the normalized complex.
struct ChainLie {
  std::vector<size_t> dims;   // degrees 0..top
  std::vector<Matrix> diff;   // diff[n]: degree n -> n-1 (the 0th face)
  // bracket tables: key (p,q), entry for pair (i,j) at index i*dim_q+j
  std::map<std::pair<int, int>, std::vector<Vec>> bracket;

  size_t dim(int n) const {
    return n >= 0 && n < static_cast<int>(dims.size()) ? dims[n] : 0;
  }
  Vec apply_bracket(int p, int q, const Vec& x, const Vec& y) const;
};

ChainLie normalize_lie(const SimplicialLie& g);

// --- Maurer-Cartan and gauge transport --------------------------------------

// Element of exp(D^{n+1}A (x) U(g_n)) per level, for levelwise-free g:
// coefficients against (cosimplicial symbol, generator word).
struct SimplicialMC {
  std::vector<std::map<std::pair<size_t, Word>, Rat>> level;  // omega_n
};
struct SimplicialGauge {
  std::vector<std::map<std::pair<size_t, Word>, Rat>> log_level;  // log u_n
};

// Maurer-Cartan element of A (x) Ng: keys (algebra index, degree, N index).
struct ChainMC {
  std::map<std::tuple<size_t, int, size_t>, Rat> terms;
};
struct ChainGauge {
  std::map<std::tuple<size_t, int, size_t>, Rat> log_terms;
};

// Maurer-Cartan calculus over a chain Lie algebra presented by structure
// constants: the residual check and the gauge action computed through the
// adjoint series exp(ad_u) w - ((exp(ad_u)-1)/ad_u)(du).
bool chain_mc_holds(const DGAlgebra& a, const ChainLie& ng, const ChainMC& w);
ChainMC chain_gauge_apply(const DGAlgebra& a, const ChainLie& ng,
                          const ChainGauge& u, const ChainMC& w,
                          int nilpotency);

// Bundles one (A, g) pair with its denormalization and normalization data.
class DKTransport {
public:
  DKTransport(DGAlgebra a, SimplicialLie g, int n_max);

  const DGAlgebra& algebra() const { return a_; }
  const CosimplicialAlgebra& da() const { return da_; }
  const SimplicialLie& lie() const { return g_; }
  const ChainLie& ng() const { return ng_; }
  int n_max() const { return n_max_; }

  // exact identity checks
  void verify_mc(const SimplicialMC& w) const;        // throws NotMC
  void verify_gauge(const SimplicialGauge& u) const;  // throws on violation
  bool chain_mc_holds(const ChainMC& w) const;

  // the normalization maps of the two transport theorems
  ChainMC mc_normalize(const SimplicialMC& w) const;
  ChainGauge gauge_normalize(const SimplicialGauge& u) const;

  // gauge actions on both sides
  SimplicialMC gauge_apply(const SimplicialGauge& u, const SimplicialMC& w) const;
  ChainMC chain_gauge_apply(const ChainGauge& u, const ChainMC& w) const;

  // reconstruction: the unique simplicial preimages of chain-side data
  SimplicialMC mc_lift(const ChainMC& w) const;
  SimplicialGauge gauge_lift(const ChainGauge& u) const;

  // abelian-mode bijectivity: dimensions of the two linear solution spaces
  std::pair<size_t, size_t> abelian_mc_dimensions() const;

  // test hook: flips one shuffle sign inside the bracket transport
  void inject_sign_fault() { sign_fault_ = true; rebuild_bracket(); }

private:
  DGAlgebra a_;
  CosimplicialAlgebra da_;
  SimplicialLie g_;
  ChainLie ng_;
  int n_max_;
  bool sign_fault_ = false;

  // N_n(g) inclusion and the projection of g_n onto N_n along degeneracies
  std::vector<Matrix> n_incl_;  // N_n -> g_n (Lie basis coordinates)
  std::vector<Matrix> n_proj_;  // g_n -> N_n

  // factorized lift systems, keyed by level (the matrices do not depend on
  // the lifted element)
  mutable std::map<int, std::shared_ptr<LinearSolver>> mc_sys_;
  mutable std::map<int, std::shared_ptr<LinearSolver>> gauge_sys_;

  void rebuild_bracket();
  Vec lie_coords(int level, const TensorPoly& p) const;
  std::map<std::pair<size_t, Word>, Rat> level_mul(
      int alevel, int glevel,
      const std::map<std::pair<size_t, Word>, Rat>& x,
      const std::map<std::pair<size_t, Word>, Rat>& y) const;
  std::map<std::pair<size_t, Word>, Rat> level_exp(
      int alevel, int glevel,
      const std::map<std::pair<size_t, Word>, Rat>& x) const;
  std::map<std::pair<size_t, Word>, Rat> level_log(
      int alevel, int glevel,
      const std::map<std::pair<size_t, Word>, Rat>& x) const;

  friend struct DKTransportTestAccess;
};

}  // namespace malcev
