#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "malcev/errors.hpp"
#include "malcev/mc_gauge.hpp"

using namespace malcev;

namespace {

LieElement gen_elt(const FreeLieContext& ctx, int i) {
  return LieElement{{LieWord{{i}, false, ctx.generators().degree(i), 1},
                     rat(1)}};
}

// A = <1, p, q> with dp = q: the smallest algebra with a differential.
DGAlgebra contractible_algebra() {
  std::vector<DGAlgebra::BasisElement> basis{{"1", 0}, {"p", 1}, {"q", 2}};
  Vec dq(3);
  dq[2] = 1;
  return DGAlgebra(basis, "1", {}, {{1, dq}});
}

FreeDGLie abelian_line(int degree) {
  auto ctx = std::make_shared<FreeLieContext>(
      GradedGenerators({{"e", degree}}), Truncation{8, 1});
  FreeDGLie g;
  g.ctx = ctx;
  g.differential = extend_derivation(ctx, {LieElement{}}, -1);
  g.window = {8, 1};
  g.weight_split = true;
  return g;
}

bool same_terms(const DGMCElement& a, const DGMCElement& b) {
  return a.terms == b.terms;
}

}  // namespace

TEST_CASE("bch truncated at weight 1 is addition") {
  FreeLieContext ctx(GradedGenerators({{"a", 0}, {"b", 0}}), {4, 1});
  auto z = bch(ctx, gen_elt(ctx, 0), gen_elt(ctx, 1));
  REQUIRE(z.size() == 2);
  for (const auto& [w, c] : z) CHECK(c == 1);
}

TEST_CASE("bch at weight 2: x + y + [x,y]/2") {
  FreeLieContext ctx(GradedGenerators({{"a", 0}, {"b", 0}}), {4, 2});
  auto z = bch(ctx, gen_elt(ctx, 0), gen_elt(ctx, 1));
  REQUIRE(z.size() == 3);
  for (const auto& [w, c] : z) {
    if (w.weight == 1) CHECK(c == 1);
    if (w.weight == 2) CHECK(c == rat(1, 2));
  }
}

TEST_CASE("bch(x, -x) = 0 and exp/log round trips at weight 6") {
  FreeLieContext ctx(GradedGenerators({{"a", 0}, {"b", 0}}), {6, 6});
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<long> val(-2, 2);
  for (int trial = 0; trial < 8; ++trial) {
    LieElement x;
    for (const auto& b : ctx.basis()) {
      Rat c = rat(val(rng));
      if (c != 0) x[b] = c;
    }
    LieElement nx = x;
    for (auto& [w, c] : nx) c = -c;
    CHECK(bch(ctx, x, nx).empty());
    // log(exp(x) * 1) recovers x exactly
    CHECK(bch(ctx, x, LieElement{}) == x);
    CHECK(bch(ctx, LieElement{}, x) == x);
  }
}

TEST_CASE("bch associativity within the truncation") {
  FreeLieContext ctx(GradedGenerators({{"a", 0}, {"b", 0}, {"c", 0}}), {5, 5});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> val(-2, 2);
  auto rand_elt = [&]() {
    LieElement x;
    for (const auto& b : ctx.basis())
      if (b.weight <= 2) {
        Rat c = rat(val(rng));
        if (c != 0) x[b] = c;
      }
    return x;
  };
  for (int trial = 0; trial < 6; ++trial) {
    auto x = rand_elt(), y = rand_elt(), z = rand_elt();
    CHECK(bch(ctx, x, bch(ctx, y, z)) == bch(ctx, bch(ctx, x, y), z));
  }
}

TEST_CASE("zero is a Maurer-Cartan element") {
  auto a = DGAlgebra::from_ring(fixtures::sphere(2));
  auto g = build_model(fixtures::sphere(2), {8, 3});
  CHECK(is_mc(a, g, DGMCElement{}).holds);
}

TEST_CASE("abelian target: closed elements are Maurer-Cartan") {
  auto a = contractible_algebra();
  auto g = abelian_line(1);
  DGMCElement w;
  w.terms[{2, LieWord{{0}, false, 1, 1}}] = rat(3);  // q (x) e, dq = 0
  CHECK(is_mc(a, g, w).holds);
  // p (x) e' with e' in degree 0 picks up dp
  auto g0 = abelian_line(0);
  DGMCElement w2;
  w2.terms[{1, LieWord{{0}, false, 0, 1}}] = rat(1);  // p (x) e
  auto verdict = is_mc(a, g0, w2);
  CHECK(!verdict.holds);
  CHECK(!verdict.residual.zero());
}

TEST_CASE("degree-mismatched components are rejected") {
  auto a = DGAlgebra::from_ring(fixtures::cp2());
  auto g = build_model(fixtures::cp2(), {8, 3});
  DGMCElement w;
  w.terms[{1, LieWord{{1}, false, 3, 1}}] = rat(1);  // x (x) w: 2 != 3+1
  CHECK_THROWS_AS((void)is_mc(a, g, w), Error);
}

TEST_CASE("mc_solve: zero seed stays zero; closed abelian seed is returned") {
  auto a = contractible_algebra();
  auto g = abelian_line(1);
  auto out = mc_solve(a, g, DGMCElement{}, {8, 1});
  REQUIRE(out.solution.has_value());
  CHECK(out.solution->terms.empty());

  DGMCElement seed;
  seed.terms[{2, LieWord{{0}, false, 1, 1}}] = rat(5);
  auto out2 = mc_solve(a, g, seed, {8, 1});
  REQUIRE(out2.solution.has_value());
  CHECK(same_terms(*out2.solution, seed));
}

TEST_CASE("mc_solve completes the tautological pairing for CP^2") {
  auto ring = fixtures::cp2();
  auto a = DGAlgebra::from_ring(ring);
  auto g = build_model(ring, {8, 4});
  DGMCElement seed;
  seed.terms[{a.index_of("x"), LieWord{{0}, false, 1, 1}}] = rat(1);
  auto out = mc_solve(a, g, seed, {8, 4});
  REQUIRE(out.solution.has_value());
  CHECK(is_mc(a, g, *out.solution).holds);
  // the completion pairs y with the degree-3 generator
  Rat yw = out.solution->terms.at({a.index_of("y"), LieWord{{1}, false, 3, 1}});
  CHECK(yw == -1);
}

TEST_CASE("mc_solve reports the obstruction when the pairing cannot close") {
  // same ring but the target has only the degree-1 generator
  auto ring = fixtures::cp2();
  auto a = DGAlgebra::from_ring(ring);
  auto ctx = std::make_shared<FreeLieContext>(GradedGenerators({{"v", 1}}),
                                              Truncation{8, 5});
  FreeDGLie g;
  g.ctx = ctx;
  g.differential = extend_derivation(ctx, {LieElement{}}, -1);
  g.window = {8, 4};
  g.weight_split = true;
  DGMCElement seed;
  seed.terms[{a.index_of("x"), LieWord{{0}, false, 1, 1}}] = rat(1);
  auto out = mc_solve(a, g, seed, {8, 4});
  CHECK(!out.solution.has_value());
  CHECK(out.obstruction_degree == 4);
}

TEST_CASE("gauge action: identity, abelian formula, inverse and composition") {
  // abelian case: exp(u) . w = w - du
  {
    auto a = contractible_algebra();
    auto g = abelian_line(1);
    DGMCElement w;
    w.terms[{2, LieWord{{0}, false, 1, 1}}] = rat(2);
    DGGaugeElement u;
    u.log_terms[{1, LieWord{{0}, false, 1, 1}}] = rat(3);  // p (x) e
    auto moved = gauge_act(a, g, u, w);
    DGMCElement expect = w;
    expect.terms[{2, LieWord{{0}, false, 1, 1}}] = rat(2) - rat(3);
    CHECK(same_terms(moved, expect));
    // identity gauge
    CHECK(same_terms(gauge_act(a, g, DGGaugeElement{}, w), w));
  }
  // nonabelian: torus model at weight 3
  {
    auto ring = fixtures::torus();
    auto a = DGAlgebra::from_ring(ring);
    auto g = build_model(ring, {6, 3});
    DGMCElement seed;
    seed.terms[{a.index_of("a"), LieWord{{0}, false, 0, 1}}] = rat(1);
    seed.terms[{a.index_of("b"), LieWord{{1}, false, 0, 1}}] = rat(1);
    auto out = mc_solve(a, g, seed, {6, 3});
    REQUIRE(out.solution.has_value());
    DGMCElement w = *out.solution;

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<long> val(-2, 2);
    for (int trial = 0; trial < 6; ++trial) {
      DGGaugeElement u, v;
      for (size_t ai = 0; ai < a.dim(); ++ai)
        for (const auto& b : g.ctx->basis()) {
          if (b.weight > 3 || a.degree(ai) != b.degree) continue;
          Rat cu = rat(val(rng)), cv = rat(val(rng));
          if (cu != 0) u.log_terms[{ai, b}] = cu;
          if (cv != 0) v.log_terms[{ai, b}] = cv;
        }
      auto moved = gauge_act(a, g, u, w);
      CHECK(is_mc(a, g, moved).holds);
      // inverse law
      auto back = gauge_act(a, g, gauge_inverse(u), moved);
      CHECK(same_terms(back, w));
      // composition law
      auto uv = gauge_compose(a, g, u, v);
      auto lhs = gauge_act(a, g, uv, w);
      auto rhs = gauge_act(a, g, u, gauge_act(a, g, v, w));
      CHECK(same_terms(lhs, rhs));
    }
  }
}

TEST_CASE("gauge action rejects non-solutions") {
  auto ring = fixtures::cp2();
  auto a = DGAlgebra::from_ring(ring);
  auto g = build_model(ring, {8, 3});
  DGMCElement w;
  w.terms[{a.index_of("x"), LieWord{{0}, false, 1, 1}}] = rat(1);  // not MC
  CHECK_THROWS_AS((void)gauge_act(a, g, DGGaugeElement{}, w), Error);
}
