#include "doctest.h"

#include <map>
#include <random>
#include <vector>

#include "malcev/errors.hpp"
#include "malcev/free_lie.hpp"
#include "malcev/matrix.hpp"

using namespace malcev;

namespace {

// Independent tensor-commutator oracle: left-normed brackets expanded with
// graded commutators directly, no Lyndon machinery involved.
struct OraclePoly {
  std::map<Word, Rat> terms;
  int degree = 0;
};

OraclePoly oracle_gen(int i, int deg) {
  OraclePoly p;
  p.terms[{i}] = 1;
  p.degree = deg;
  return p;
}

OraclePoly oracle_bracket(const OraclePoly& a, const OraclePoly& b) {
  OraclePoly out;
  out.degree = a.degree + b.degree;
  int sign = (a.degree * b.degree) % 2 ? -1 : 1;
  for (const auto& [wa, ca] : a.terms)
    for (const auto& [wb, cb] : b.terms) {
      Word ab = wa;
      ab.insert(ab.end(), wb.begin(), wb.end());
      Word ba = wb;
      ba.insert(ba.end(), wa.begin(), wa.end());
      out.terms[ab] += ca * cb;
      out.terms[ba] -= sign * ca * cb;
    }
  for (auto it = out.terms.begin(); it != out.terms.end();)
    it = it->second == 0 ? out.terms.erase(it) : std::next(it);
  return out;
}

// Dimension of the weight-w component by brute-force span of all left-normed
// bracket monomials, graded by total degree.
std::map<int, size_t> bruteforce_weight_dims(const std::vector<int>& degs,
                                             int w) {
  std::map<int, std::vector<OraclePoly>> by_degree;
  std::vector<std::vector<int>> seqs{{}};
  for (int i = 0; i < w; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& s : seqs)
      for (size_t g = 0; g < degs.size(); ++g) {
        auto t = s;
        t.push_back(static_cast<int>(g));
        next.push_back(t);
      }
    seqs = std::move(next);
  }
  for (const auto& s : seqs) {
    OraclePoly p = oracle_gen(s.back(), degs[s.back()]);
    for (int i = static_cast<int>(s.size()) - 2; i >= 0; --i)
      p = oracle_bracket(oracle_gen(s[i], degs[s[i]]), p);
    by_degree[p.degree].push_back(p);
  }
  std::map<int, size_t> dims;
  for (auto& [deg, polys] : by_degree) {
    std::map<Word, size_t> coords;
    for (const auto& p : polys)
      for (const auto& [word, c] : p.terms)
        coords.emplace(word, coords.size());
    RowReducer span(coords.size());
    for (const auto& p : polys) {
      if (p.terms.empty()) continue;
      Vec v(coords.size());
      for (const auto& [word, c] : p.terms) v[coords[word]] = c;
      span.add(v);
    }
    if (span.rank()) dims[deg] = span.rank();
  }
  return dims;
}

GradedGenerators gens(std::initializer_list<Generator> g) {
  return GradedGenerators(std::vector<Generator>(g));
}

LieElement gen_elt(const FreeLieContext& ctx, int i) {
  LieWord w{{i}, false, ctx.generators().degree(i), 1};
  return LieElement{{w, rat(1)}};
}

}  // namespace

TEST_CASE("single even generator: no brackets survive") {
  auto b = lyndon_basis(gens({{"v", 2}}), {10, 4});
  REQUIRE(b.size() == 1);
  CHECK(b[0].weight == 1);
}

TEST_CASE("single odd generator: v and the square only") {
  auto b = lyndon_basis(gens({{"v", 1}}), {10, 4});
  REQUIRE(b.size() == 2);
  CHECK(b[0].weight == 1);
  CHECK(b[1].square);
  CHECK(b[1].degree == 2);
}

TEST_CASE("two even degree-0 generators match the Witt numbers 2,1,2,3") {
  auto b = lyndon_basis(gens({{"a", 0}, {"b", 0}}), {4, 4});
  std::map<int, int> by_weight;
  for (const auto& w : b) ++by_weight[w.weight];
  CHECK(by_weight[1] == 2);
  CHECK(by_weight[2] == 1);
  CHECK(by_weight[3] == 2);
  CHECK(by_weight[4] == 3);
}

TEST_CASE("basis counts match the brute-force tensor span") {
  std::vector<std::vector<int>> generator_sets{
      {0, 0}, {1}, {1, 1}, {0, 1, 2}, {1, 2}, {2, 2, 2}};
  for (const auto& degs : generator_sets) {
    std::vector<Generator> gl;
    for (size_t i = 0; i < degs.size(); ++i)
      gl.push_back({"g" + std::to_string(i), degs[i]});
    FreeLieContext ctx(GradedGenerators(gl), {24, 4});
    for (int w = 1; w <= 4; ++w) {
      auto expect = bruteforce_weight_dims(degs, w);
      std::map<int, size_t> got;
      for (const auto& b : ctx.basis())
        if (b.weight == w) ++got[b.degree];
      CHECK(got == expect);
    }
  }
}

TEST_CASE("bracket of an even generator with itself vanishes") {
  FreeLieContext ctx(gens({{"v", 2}}), {10, 4});
  auto v = gen_elt(ctx, 0);
  CHECK(ctx.bracket(v, v).empty());
}

TEST_CASE("bracket(v,v) for odd v is twice the square symbol") {
  FreeLieContext ctx(gens({{"v", 1}}), {10, 4});
  auto v = gen_elt(ctx, 0);
  auto sq = ctx.bracket(v, v);
  REQUIRE(sq.size() == 1);
  CHECK(sq.begin()->first.square);
  CHECK(sq.begin()->second == 2);
}

TEST_CASE("bracket(a,[a,b]) is the Lyndon word aab with coefficient 1") {
  FreeLieContext ctx(gens({{"a", 0}, {"b", 0}}), {8, 4});
  auto a = gen_elt(ctx, 0), b = gen_elt(ctx, 1);
  auto ab = ctx.bracket(a, b);
  REQUIRE(ab.size() == 1);
  CHECK(ab.begin()->first.word == Word{0, 1});
  auto aab = ctx.bracket(a, ab);
  REQUIRE(aab.size() == 1);
  CHECK(aab.begin()->first.word == Word{0, 0, 1});
  CHECK(aab.begin()->second == 1);
  // matches the free-associative commutator expansion
  OraclePoly oracle = oracle_bracket(
      oracle_gen(0, 0), oracle_bracket(oracle_gen(0, 0), oracle_gen(1, 0)));
  TensorPoly mine = ctx.expand(aab);
  CHECK(mine.size() == oracle.terms.size());
  for (const auto& [w, c] : oracle.terms) CHECK(mine[w] == c);
}

TEST_CASE("straighten o rho is the identity on the basis") {
  // exhaustive on <= 3 generators, degree <= 6, weight <= 4
  FreeLieContext ctx(gens({{"a", 0}, {"b", 1}, {"c", 2}}), {6, 4});
  for (const auto& b : ctx.basis()) {
    if (b.degree > 6) continue;
    LieElement e = ctx.straighten(ctx.rho(b));
    REQUIRE(e.size() == 1);
    CHECK(e.begin()->first == b);
    CHECK(e.begin()->second == 1);
  }
}

TEST_CASE("bracket corresponds to the associative commutator exhaustively") {
  FreeLieContext ctx(gens({{"a", 0}, {"b", 1}, {"c", 2}}), {6, 4});
  std::vector<LieWord> small;
  for (const auto& b : ctx.basis())
    if (b.weight <= 2 && b.degree <= 4) small.push_back(b);
  for (const auto& x : small)
    for (const auto& y : small) {
      if (x.weight + y.weight > 4) continue;
      LieElement ex{{x, rat(1)}}, ey{{y, rat(1)}};
      TensorPoly lhs = ctx.expand(ctx.bracket(ex, ey));
      TensorPoly px = ctx.expand(ex), py = ctx.expand(ey);
      int sign = (x.degree * y.degree) % 2 ? -1 : 1;
      TensorPoly rhs = ctx.tensor_mul(px, py);
      for (const auto& [w, c] : ctx.tensor_mul(py, px)) {
        rhs[w] -= sign * c;
        if (rhs[w] == 0) rhs.erase(w);
      }
      CHECK(lhs == rhs);
    }
}

namespace {

LieElement random_homogeneous(const FreeLieContext& ctx, std::mt19937_64& rng,
                              int degree, int max_weight) {
  std::uniform_int_distribution<long> val(-3, 3);
  LieElement out;
  for (const auto& b : ctx.basis())
    if (b.degree == degree && b.weight <= max_weight) {
      Rat c = rat(val(rng));
      if (c != 0) out[b] = c;
    }
  return out;
}

}  // namespace

TEST_CASE("antisymmetry and graded Jacobi on random homogeneous elements") {
  FreeLieContext ctx(gens({{"a", 0}, {"b", 1}, {"c", 2}}), {8, 5});
  std::mt19937_64 rng(42);
  auto add_scaled = [](LieElement& acc, const LieElement& x, int s) {
    for (const auto& [b, c] : x) {
      acc[b] += s * c;
      if (acc[b] == 0) acc.erase(b);
    }
  };
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    int dx = trial % 3, dy = (trial / 3) % 3, dz = (trial / 9) % 3;
    auto x = random_homogeneous(ctx, rng, dx, 2);
    auto y = random_homogeneous(ctx, rng, dy, 2);
    auto z = random_homogeneous(ctx, rng, dz, 1);
    if (x.empty() || y.empty() || z.empty()) continue;
    ++checked;
    // antisymmetry
    LieElement anti = ctx.bracket(x, y);
    add_scaled(anti, ctx.bracket(y, x), (dx * dy) % 2 ? -1 : 1);
    CHECK(anti.empty());
    // graded Jacobi: (-1)^{zx}[x,[y,z]] + (-1)^{xy}[y,[z,x]] + (-1)^{yz}[z,[x,y]]
    LieElement jac;
    add_scaled(jac, ctx.bracket(x, ctx.bracket(y, z)), (dz * dx) % 2 ? -1 : 1);
    add_scaled(jac, ctx.bracket(y, ctx.bracket(z, x)), (dx * dy) % 2 ? -1 : 1);
    add_scaled(jac, ctx.bracket(z, ctx.bracket(x, y)), (dy * dz) % 2 ? -1 : 1);
    CHECK(jac.empty());
  }
  CHECK(checked > 20);
}

TEST_CASE("derivations: zero, Leibniz on a CP^2-style differential") {
  auto ctx = std::make_shared<FreeLieContext>(gens({{"v", 1}, {"w", 3}}),
                                              Truncation{10, 4});
  auto v = gen_elt(*ctx, 0), w = gen_elt(*ctx, 1);
  // zero derivation
  auto zero = extend_derivation(ctx, {LieElement{}, LieElement{}}, -1);
  CHECK(zero.apply(ctx->bracket(v, w)).empty());
  CHECK(zero.squares_to_zero());

  // Dw = [v,v] (= 2 * square), Dv = 0
  auto d = extend_derivation(ctx, {LieElement{}, ctx->bracket(v, v)}, -1);
  CHECK(d.squares_to_zero());
  // D[v,w] = ±[v,[v,v]] = 0 by the graded Jacobi identity
  CHECK(d.apply(ctx->bracket(v, w)).empty());
  // Leibniz on all basis pairs within the window
  for (const auto& bx : ctx->basis())
    for (const auto& by : ctx->basis()) {
      if (bx.weight + by.weight > 4) continue;
      LieElement x{{bx, rat(1)}}, y{{by, rat(1)}};
      LieElement lhs = d.apply(ctx->bracket(x, y));
      LieElement rhs = ctx->bracket(d.apply(x), y);
      int sign = bx.degree % 2 ? -1 : 1;
      for (const auto& [b, c] : ctx->bracket(x, d.apply(y))) {
        rhs[b] += sign * c;
        if (rhs[b] == 0) rhs.erase(b);
      }
      CHECK(lhs == rhs);
    }

  // degree mismatch is rejected
  CHECK_THROWS_AS(extend_derivation(ctx, {LieElement{}, gen_elt(*ctx, 0)}, -1),
                  Error);
}

TEST_CASE("a derivation with D^2 != 0 is reported") {
  auto ctx = std::make_shared<FreeLieContext>(gens({{"a", 0}, {"b", 1}}),
                                              Truncation{6, 3});
  auto a = gen_elt(*ctx, 0);
  // D b = a, D a = [a,a]?? even a gives zero; use Db = a, Da = 0 is fine.
  // Build a failing one: Db = a and Da requires degree -1, so instead use
  // shift 0: Da = b is degree-mismatched; construct D with Db = a twice
  // composed against itself via a shift-(-1) derivation on three generators.
  auto ctx3 = std::make_shared<FreeLieContext>(
      gens({{"a", 0}, {"b", 1}, {"c", 2}}), Truncation{6, 3});
  LieElement ia = gen_elt(*ctx3, 0), ib = gen_elt(*ctx3, 1);
  auto d = extend_derivation(ctx3, {LieElement{}, ia, ib}, -1);
  CHECK(!d.squares_to_zero());
}

TEST_CASE("lie_weight_dims oracle values") {
  GradedModule odd1{{{1, {"v"}}}};
  auto d1 = lie_weight_dims(odd1, 2, {8, 4});
  CHECK(d1[2] == 1);
  GradedModule even2{{{2, {"v"}}}};
  auto d2 = lie_weight_dims(even2, 2, {8, 4});
  CHECK(d2.empty());
  GradedModule four0{{{0, {"e1", "e2", "e3", "e4"}}}};
  auto d3 = lie_weight_dims(four0, 3, {8, 4});
  CHECK(d3[0] == 20);  // (4^3 - 4)/3
}

TEST_CASE("truncation guard throws") {
  std::vector<Generator> many;
  for (int i = 0; i < 6; ++i) many.push_back({"g" + std::to_string(i), 0});
  Truncation t{4, 9};
  t.budget = 1000;
  CHECK_THROWS_AS(FreeLieContext(GradedGenerators(many), t), Error);
}
