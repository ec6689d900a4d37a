#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "malcev/dold_kan.hpp"
#include "malcev/chain_complex.hpp"
#include "malcev/errors.hpp"

using namespace malcev;

namespace {

Cochain point_cochain() {
  Cochain v;
  v.dims = {1};
  return v;
}

Cochain line(int degree) {
  Cochain v;
  v.dims.assign(degree + 1, 0);
  v.dims[degree] = 1;
  for (int n = 0; n < degree; ++n) v.d.push_back(Matrix(v.dims[n + 1], v.dims[n]));
  return v;
}

Cochain random_cochain(std::mt19937_64& rng, int max_degree, int max_dim) {
  std::uniform_int_distribution<int> dim(0, max_dim), val(-3, 3);
  Cochain v;
  for (int n = 0; n <= max_degree; ++n) v.dims.push_back(dim(rng));
  if (std::all_of(v.dims.begin(), v.dims.end(), [](size_t d) { return d == 0; }))
    v.dims[0] = 1;
  // arbitrary d with d^2 = 0: choose alternate-degree maps and compose-zero
  // by construction: d on even degrees arbitrary, on odd degrees zero
  for (int n = 0; n < max_degree; ++n) {
    Matrix d(v.dims[n + 1], v.dims[n]);
    if (n % 2 == 0)
      for (size_t r = 0; r < d.rows(); ++r)
        for (size_t c = 0; c < d.cols(); ++c) d(r, c) = rat(val(rng));
    v.d.push_back(std::move(d));
  }
  return v;
}

DGAlgebra contractible_algebra() {
  std::vector<DGAlgebra::BasisElement> basis{{"1", 0}, {"p", 1}, {"q", 2}};
  Vec dq(3);
  dq[2] = 1;
  return DGAlgebra(basis, "1", {}, {{1, dq}});
}

// simplicial vector space with normalized chain Q[0] (+) Q[1]
SimplicialModule standard_module(int n_max) {
  Cochain w;
  w.dims = {1, 1};
  w.d.push_back(Matrix(1, 1));
  return simplicial_dual(denormalize(w, n_max).mod);
}

}  // namespace

TEST_CASE("denormalization dimensions follow the binomial counts") {
  auto d0 = denormalize(point_cochain(), 5);
  for (int n = 0; n <= 5; ++n) CHECK(d0.mod.dims[n] == 1);
  auto d1 = denormalize(line(1), 6);
  for (int n = 0; n <= 6; ++n) CHECK(d1.mod.dims[n] == static_cast<size_t>(n));
  auto d2 = denormalize(line(2), 6);
  for (int n = 0; n <= 6; ++n)
    CHECK(d2.mod.dims[n] == static_cast<size_t>(n * (n - 1) / 2));
}

TEST_CASE("normalize after denormalize is the identity, exactly") {
  std::mt19937_64 rng(314159);
  for (int trial = 0; trial < 25; ++trial) {
    Cochain v = random_cochain(rng, 6, 4);
    auto dn = denormalize(v, 7);
    // the normalized subspace is spanned by the empty-word symbols, and the
    // cochain differential restricted to them is the original differential
    for (int n = 0; n <= 6; ++n) {
      REQUIRE(dn.normalized[n].size() == v.dim(n));
      for (size_t k = 0; k < dn.normalized[n].size(); ++k) {
        Vec e(dn.mod.dims[n]);
        e[dn.normalized[n][k]] = 1;
        for (int i = 0; i < n; ++i) {
          Vec s = dn.mod.codegen[n - 1][i].apply(e);
          for (const auto& c : s) CHECK(c == 0);
        }
        Vec d(dn.mod.dims[n + 1]);
        for (int i = 0; i <= n + 1; ++i) {
          Vec t = dn.mod.coface[n][i].apply(e);
          for (size_t r = 0; r < t.size(); ++r)
            d[r] += (i % 2 ? -t[r] : t[r]);
        }
        Vec expect(dn.mod.dims[n + 1]);
        if (n < 6) {
          const Matrix& dv = v.d[n];
          for (size_t r = 0; r < dv.rows(); ++r)
            if (dv(r, k) != 0) expect[dn.normalized[n + 1][r]] = dv(r, k);
        }
        CHECK(d == expect);
      }
    }
    // and the normalization functor returns matching dimensions
    auto norm = normalize(dn.mod);
    for (int n = 0; n <= 6; ++n) CHECK(norm.complex.dims[n] == v.dim(n));
  }
}

TEST_CASE("shuffle algebra: levelwise commutative, associative, unital") {
  for (int pick = 0; pick < 2; ++pick) {
    DGAlgebra a = pick == 0 ? DGAlgebra::from_ring(fixtures::sphere(2))
                            : contractible_algebra();
    auto ca = shuffle_algebra(a, 5);
    for (int n = 0; n <= 5; ++n) {
      const size_t dn = ca.da.mod.dims[n];
      for (size_t i = 0; i < dn; ++i) {
        Vec ei(dn);
        ei[i] = 1;
        CHECK(ca.mul(n, ca.unit[n], ei) == ei);
        CHECK(ca.mul(n, ei, ca.unit[n]) == ei);
        for (size_t j = 0; j < dn; ++j) {
          Vec ej(dn);
          ej[j] = 1;
          Vec ij = ca.mul(n, ei, ej);
          CHECK(ij == ca.mul(n, ej, ei));
          for (size_t k = 0; k < dn; ++k) {
            Vec ek(dn);
            ek[k] = 1;
            CHECK(ca.mul(n, ij, ek) == ca.mul(n, ei, ca.mul(n, ej, ek)));
          }
        }
      }
    }
    // structure maps are algebra homomorphisms
    for (int n = 0; n + 1 <= 5; ++n) {
      const size_t dn = ca.da.mod.dims[n];
      for (size_t i = 0; i < dn; ++i)
        for (size_t j = 0; j < dn; ++j) {
          Vec ei(dn), ej(dn);
          ei[i] = 1;
          ej[j] = 1;
          Vec prod = ca.mul(n, ei, ej);
          for (int f = 0; f <= n + 1; ++f) {
            const Matrix& cf = ca.da.mod.coface[n][f];
            CHECK(cf.apply(prod) ==
                  ca.mul(n + 1, cf.apply(ei), cf.apply(ej)));
          }
        }
    }
  }
}

TEST_CASE("level-2 squares of normalized lifts vanish (S^2)") {
  auto ca = shuffle_algebra(DGAlgebra::from_ring(fixtures::sphere(2)), 4);
  // x sits at level 2 as the unique empty-word symbol of degree 2
  const size_t dn = ca.da.mod.dims[2];
  Vec x(dn);
  REQUIRE(ca.da.normalized[2].size() == 1);  // just the degree-2 class
  x[ca.da.normalized[2][0]] = 1;
  Vec sq = ca.mul(2, x, x);
  for (const auto& c : sq) CHECK(c == 0);
}

TEST_CASE("cup product through the denormalization recovers the torus ring") {
  auto ring = fixtures::torus();
  DGAlgebra a = DGAlgebra::from_ring(ring);
  auto ca = shuffle_algebra(a, 4);
  // lift a degree-1 class to level 2 via front and back cofaces and multiply
  auto embed = [&](int level, size_t ai) {
    // ai indexes the algebra basis; find its normalized position
    auto idxs = a.indices_of_degree(a.degree(ai));
    size_t pos = 0;
    for (size_t k = 0; k < idxs.size(); ++k)
      if (idxs[k] == ai) pos = k;
    Vec e(ca.da.mod.dims[a.degree(ai)]);
    e[ca.da.normalized[a.degree(ai)][pos]] = 1;
    return e;
  };
  auto cup11 = [&](size_t ai, size_t bi) {
    Vec front = ca.da.mod.coface[1][2].apply(embed(1, ai));
    Vec back = ca.da.mod.coface[1][0].apply(embed(1, bi));
    Vec prod = ca.mul(2, front, back);
    // read the normalized degree-2 coordinates
    auto idxs = a.indices_of_degree(2);
    Vec out(idxs.size());
    for (size_t k = 0; k < idxs.size(); ++k)
      out[k] = prod[ca.da.normalized[2][k]];
    return out;
  };
  size_t ia = a.index_of("a"), ib = a.index_of("b");
  Vec ab = cup11(ia, ib);
  Vec ba = cup11(ib, ia);
  REQUIRE(ab.size() == 1);  // the fundamental class w
  CHECK(ab[0] == 1);
  CHECK(ba[0] == -1);  // 2-shuffle signs reproduce the antisymmetry
  Vec aa = cup11(ia, ia);
  CHECK(aa[0] == 0);
}

TEST_CASE("constant simplicial Lie normalizes to degree 0") {
  // Heisenberg: [e1,e2] = e3
  std::vector<Vec> table(9, Vec(3));
  table[0 * 3 + 1][2] = 1;
  table[1 * 3 + 0][2] = -1;
  auto g = SimplicialLie::constant(3, table, 4);
  auto ng = normalize_lie(g);
  CHECK(ng.dims[0] == 3);
  for (size_t n = 1; n < ng.dims.size(); ++n) CHECK(ng.dims[n] == 0);
  // bracket at (0,0) is the original one
  Vec e1(3), e2(3);
  e1[0] = 1;
  e2[1] = 1;
  Vec br = ng.apply_bracket(0, 0, e1, e2);
  CHECK(br[2] == 1);
}

TEST_CASE("levelwise-free simplicial Lie: chain axioms for the shuffle bracket") {
  auto v = standard_module(4);
  for (int weight : {1, 2, 3}) {
    auto g = SimplicialLie::levelwise_free(v, weight);
    auto ng = normalize_lie(g);
    if (weight == 1)
      for (const auto& [key, table] : ng.bracket)
        for (const auto& col : table)
          for (const auto& c : col) CHECK(c == 0);
    // d^2 = 0
    for (size_t n = 2; n < ng.dims.size(); ++n)
      CHECK((ng.diff[n - 1] * ng.diff[n]).is_zero());
    // antisymmetry, Leibniz, Jacobi on basis elements
    int top = static_cast<int>(ng.dims.size()) - 1;
    for (int p = 0; p <= top; ++p)
      for (int q = 0; p + q <= top; ++q) {
        for (size_t i = 0; i < ng.dim(p); ++i)
          for (size_t j = 0; j < ng.dim(q); ++j) {
            Vec x(ng.dim(p)), y(ng.dim(q));
            x[i] = 1;
            y[j] = 1;
            Vec xy = ng.apply_bracket(p, q, x, y);
            Vec yx = ng.apply_bracket(q, p, y, x);
            int sign = (p * q) % 2 ? -1 : 1;
            for (size_t r = 0; r < xy.size(); ++r)
              CHECK(xy[r] == -sign * yx[r]);
            // Leibniz
            if (p + q >= 1 && p + q <= top) {
              Vec lhs = ng.diff[p + q].apply(xy);
              Vec rhs(ng.dim(p + q - 1));
              if (p >= 1) {
                Vec dx = ng.diff[p].apply(x);
                Vec t = ng.apply_bracket(p - 1, q, dx, y);
                for (size_t r = 0; r < rhs.size(); ++r) rhs[r] += t[r];
              }
              if (q >= 1) {
                Vec dy = ng.diff[q].apply(y);
                Vec t = ng.apply_bracket(p, q - 1, x, dy);
                int s = p % 2 ? -1 : 1;
                for (size_t r = 0; r < rhs.size(); ++r) rhs[r] += s * t[r];
              }
              CHECK(lhs == rhs);
            }
          }
      }
    // graded Jacobi on a few triples
    for (int p = 0; p <= 1; ++p)
      for (int q = 0; q <= 1; ++q)
        for (int s = 0; s <= 1; ++s) {
          if (p + q + s > top) continue;
          for (size_t i = 0; i < ng.dim(p); ++i)
            for (size_t j = 0; j < ng.dim(q); ++j)
              for (size_t k = 0; k < ng.dim(s); ++k) {
                Vec x(ng.dim(p)), y(ng.dim(q)), z(ng.dim(s));
                x[i] = 1;
                y[j] = 1;
                z[k] = 1;
                Vec acc(ng.dim(p + q + s));
                auto add = [&](const Vec& t, int sgn) {
                  for (size_t r = 0; r < acc.size(); ++r) acc[r] += sgn * t[r];
                };
                add(ng.apply_bracket(p, q + s, x, ng.apply_bracket(q, s, y, z)),
                    (s * p) % 2 ? -1 : 1);
                add(ng.apply_bracket(q, s + p, y, ng.apply_bracket(s, p, z, x)),
                    (p * q) % 2 ? -1 : 1);
                add(ng.apply_bracket(s, p + q, z, ng.apply_bracket(p, q, x, y)),
                    (q * s) % 2 ? -1 : 1);
                for (const auto& c : acc) CHECK(c == 0);
              }
        }
  }
}

TEST_CASE("homology of the normalized levelwise-free Lie is the free Lie") {
  // pi of the levelwise-free simplicial Lie algebra on V is the free graded
  // Lie algebra on pi(V); checked through the weight truncation
  auto v = standard_module(4);
  for (int weight : {1, 2, 3}) {
    auto g = SimplicialLie::levelwise_free(v, weight);
    auto ng = normalize_lie(g);
    GradedGenerators gens({{"x", 0}, {"e", 1}});
    FreeLieContext ctx(gens, {4, weight});
    std::map<int, size_t> expect;
    for (const auto& b : ctx.basis()) ++expect[b.degree];
    for (int n = 0; n + 1 < static_cast<int>(ng.dims.size()); ++n) {
      size_t want = expect.count(n) ? expect[n] : 0;
      size_t got =
          homology_representatives(ng.diff[n], ng.diff[n + 1]).cols();
      CHECK(got == want);
    }
    // the induced bracket on degree-0 homology classes is the free bracket:
    // [x-class, e-class] is nonzero once brackets are allowed
    if (weight >= 2) {
      Vec x0(ng.dim(0));
      x0[0] = 1;
      bool nonzero = false;
      for (size_t j = 0; j < ng.dim(1); ++j) {
        Vec e1(ng.dim(1));
        e1[j] = 1;
        for (const auto& c : ng.apply_bracket(0, 1, x0, e1))
          if (c != 0) nonzero = true;
      }
      CHECK(nonzero);
    }
  }
}

namespace {

struct Instance {
  std::shared_ptr<DKTransport> t;
};

Instance make_instance(const DGAlgebra& a, int weight, int n_max) {
  Cochain w;
  w.dims = {1, 1};
  w.d.push_back(Matrix(1, 1));
  auto v = simplicial_dual(denormalize(w, n_max + 1).mod);
  auto g = SimplicialLie::levelwise_free(v, weight);
  Instance inst;
  inst.t = std::make_shared<DKTransport>(a, g, n_max);
  return inst;
}

ChainGauge random_chain_gauge(const DKTransport& t, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> val(-2, 2);
  ChainGauge u;
  const auto& a = t.algebra();
  for (size_t ai = 0; ai < a.dim(); ++ai) {
    int n = a.degree(ai);
    if (n >= static_cast<int>(t.ng().dims.size())) continue;
    for (size_t k = 0; k < t.ng().dims[n]; ++k) {
      Rat c = rat(val(rng));
      if (c != 0) u.log_terms[{ai, n, k}] = c;
    }
  }
  return u;
}

}  // namespace

TEST_CASE("transport: gauge orbits of zero satisfy both equations") {
  std::mt19937_64 rng(4711);
  auto a = contractible_algebra();
  for (int weight : {1, 2, 3}) {
    auto inst = make_instance(a, weight, 3);
    const DKTransport& t = *inst.t;
    for (int trial = 0; trial < 4; ++trial) {
      ChainGauge uc = random_chain_gauge(t, rng);
      // chain side: act on zero
      ChainMC zero;
      ChainMC moved = t.chain_gauge_apply(uc, zero);
      CHECK(t.chain_mc_holds(moved));
      // lift the gauge, act simplicially on zero, and compare transports
      SimplicialGauge u = t.gauge_lift(uc);
      ChainGauge back = t.gauge_normalize(u);
      CHECK(back.log_terms == uc.log_terms);
      SimplicialMC zero_s;
      for (int n = 0; n < 3; ++n) {
        std::map<std::pair<size_t, Word>, Rat> lvl;
        for (size_t k = 0; k < t.da().unit[n + 1].size(); ++k)
          if (t.da().unit[n + 1][k] != 0)
            lvl[{k, Word{}}] = t.da().unit[n + 1][k];
        zero_s.level.push_back(std::move(lvl));
      }
      t.verify_mc(zero_s);
      CHECK(t.mc_normalize(zero_s).terms.empty());
      SimplicialMC moved_s = t.gauge_apply(u, zero_s);
      t.verify_mc(moved_s);
      // the compatibility identity of the two transports
      ChainMC lhs = t.chain_gauge_apply(t.gauge_normalize(u),
                                        t.mc_normalize(zero_s));
      ChainMC rhs = t.mc_normalize(moved_s);
      CHECK(lhs.terms == rhs.terms);
    }
  }
}

TEST_CASE("transport: lift of a chain solution round-trips") {
  std::mt19937_64 rng(1618);
  auto a = contractible_algebra();
  for (int weight : {1, 2}) {
    auto inst = make_instance(a, weight, 3);
    const DKTransport& t = *inst.t;
    for (int trial = 0; trial < 3; ++trial) {
      ChainGauge uc = random_chain_gauge(t, rng);
      ChainMC zero;
      ChainMC wc = t.chain_gauge_apply(uc, zero);
      REQUIRE(t.chain_mc_holds(wc));
      SimplicialMC ws = t.mc_lift(wc);
      t.verify_mc(ws);
      ChainMC back = t.mc_normalize(ws);
      CHECK(back.terms == wc.terms);
    }
  }
}

TEST_CASE("transport: full gauge compatibility on nontrivial pairs") {
  std::mt19937_64 rng(2718);
  auto a = contractible_algebra();
  auto inst = make_instance(a, 3, 3);
  const DKTransport& t = *inst.t;
  for (int trial = 0; trial < 5; ++trial) {
    ChainGauge uc = random_chain_gauge(t, rng);
    ChainGauge vc = random_chain_gauge(t, rng);
    ChainMC zero;
    ChainMC wc = t.chain_gauge_apply(vc, zero);
    SimplicialMC ws = t.mc_lift(wc);
    SimplicialGauge u = t.gauge_lift(uc);
    SimplicialMC moved = t.gauge_apply(u, ws);
    t.verify_mc(moved);
    ChainMC lhs = t.chain_gauge_apply(uc, wc);
    ChainMC rhs = t.mc_normalize(moved);
    CHECK(lhs.terms == rhs.terms);
    CHECK(t.chain_mc_holds(rhs));
  }
}

TEST_CASE("abelian bijectivity: the two solution spaces have equal dimension") {
  auto a = contractible_algebra();
  auto inst = make_instance(a, 1, 3);
  auto [simp, chain] = inst.t->abelian_mc_dimensions();
  CHECK(simp == chain);

  auto ring_inst = make_instance(DGAlgebra::from_ring(fixtures::sphere(2)), 1, 3);
  auto [s2, c2] = ring_inst.t->abelian_mc_dimensions();
  CHECK(s2 == c2);
}

TEST_CASE("an injected sign fault breaks the transport identity") {
  std::mt19937_64 rng(13);
  auto a = contractible_algebra();
  auto inst = make_instance(a, 2, 3);
  inst.t->inject_sign_fault();
  bool failed = false;
  for (int trial = 0; trial < 10 && !failed; ++trial) {
    ChainGauge uc = random_chain_gauge(*inst.t, rng);
    ChainMC zero;
    try {
      ChainMC moved = inst.t->chain_gauge_apply(uc, zero);
      if (!inst.t->chain_mc_holds(moved)) failed = true;
      if (!failed) {
        SimplicialGauge u = inst.t->gauge_lift(uc);
        SimplicialMC zs;
        for (int n = 0; n < 3; ++n) {
          std::map<std::pair<size_t, Word>, Rat> lvl;
          for (size_t k = 0; k < inst.t->da().unit[n + 1].size(); ++k)
            if (inst.t->da().unit[n + 1][k] != 0)
              lvl[{k, Word{}}] = inst.t->da().unit[n + 1][k];
          zs.level.push_back(std::move(lvl));
        }
        SimplicialMC moved_s = inst.t->gauge_apply(u, zs);
        ChainMC lhs = inst.t->chain_gauge_apply(inst.t->gauge_normalize(u),
                                                inst.t->mc_normalize(zs));
        ChainMC rhs = inst.t->mc_normalize(moved_s);
        if (lhs.terms != rhs.terms) failed = true;
      }
    } catch (const Error&) {
      failed = true;
    }
  }
  CHECK(failed);
}

TEST_CASE("transport requires a free presentation") {
  std::vector<Vec> table(1, Vec(1));
  auto g = SimplicialLie::constant(1, table, 3);
  CHECK_THROWS_AS(DKTransport(contractible_algebra(), g, 2), Error);
}

TEST_CASE("chain gauge action agrees with the envelope implementation") {
  // free chain Lie algebra of the torus ring, expressed both ways
  auto ring = fixtures::torus();
  DGAlgebra a = DGAlgebra::from_ring(ring);
  auto m = build_model(ring, {6, 3});
  auto words = m.window_basis();
  std::map<int, std::vector<LieWord>> bydeg;
  for (const auto& b : words) bydeg[b.degree].push_back(b);
  int top = 0;
  for (const auto& [d, v] : bydeg) top = std::max(top, d);
  ChainLie ng;
  std::map<LieWord, std::pair<int, size_t>> pos;
  for (int n = 0; n <= top; ++n) {
    auto& v = bydeg[n];
    for (size_t k = 0; k < v.size(); ++k) pos[v[k]] = {n, k};
    ng.dims.push_back(v.size());
  }
  auto coords = [&](int deg, const LieElement& e) {
    Vec out(ng.dims[deg]);
    for (const auto& [b, c] : e) {
      auto it = pos.find(b);
      if (it != pos.end() && it->second.first == deg) out[it->second.second] = c;
    }
    return out;
  };
  ng.diff.resize(top + 1);
  ng.diff[0] = Matrix(0, ng.dims[0]);
  for (int n = 1; n <= top; ++n) {
    Matrix d(ng.dims[n - 1], ng.dims[n]);
    for (size_t c = 0; c < ng.dims[n]; ++c) {
      Vec img = coords(
          n - 1, m.differential.apply(LieElement{{bydeg[n][c], rat(1)}}));
      for (size_t r = 0; r < d.rows(); ++r) d(r, c) = img[r];
    }
    ng.diff[n] = d;
  }
  for (int p = 0; p <= top; ++p)
    for (int q = 0; p + q <= top; ++q) {
      if (!ng.dims[p] || !ng.dims[q]) continue;
      std::vector<Vec> table(ng.dims[p] * ng.dims[q], Vec(ng.dims[p + q]));
      for (size_t i = 0; i < ng.dims[p]; ++i)
        for (size_t j = 0; j < ng.dims[q]; ++j)
          table[i * ng.dims[q] + j] =
              coords(p + q, m.ctx->bracket(LieElement{{bydeg[p][i], rat(1)}},
                                           LieElement{{bydeg[q][j], rat(1)}}));
      ng.bracket[{p, q}] = table;
    }

  DGMCElement seed;
  seed.terms[{a.index_of("a"), LieWord{{0}, false, 0, 1}}] = rat(1);
  seed.terms[{a.index_of("b"), LieWord{{1}, false, 0, 1}}] = rat(1);
  auto out = mc_solve(a, m, seed, {6, 3});
  REQUIRE(out.solution.has_value());
  DGMCElement big_w = *out.solution;
  ChainMC wc;
  for (const auto& [key, c] : big_w.terms) {
    auto [deg, idx] = pos.at(key.second);
    wc.terms[{key.first, deg, idx}] = c;
  }
  REQUIRE(chain_mc_holds(a, ng, wc));

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> val(-2, 2);
  for (int trial = 0; trial < 6; ++trial) {
    DGGaugeElement u;
    ChainGauge uc;
    for (size_t ai = 0; ai < a.dim(); ++ai)
      for (const auto& b : words) {
        if (a.degree(ai) != b.degree) continue;
        Rat c = rat(val(rng));
        if (c != 0) {
          u.log_terms[{ai, b}] = c;
          auto [deg, idx] = pos.at(b);
          uc.log_terms[{ai, deg, idx}] = c;
        }
      }
    DGMCElement env = gauge_act(a, m, u, big_w);
    ChainMC ad = chain_gauge_apply(a, ng, uc, wc, 3);
    ChainMC envc;
    for (const auto& [key, c] : env.terms) {
      auto it = pos.find(key.second);
      if (it == pos.end()) continue;  // beyond the window
      auto [deg, idx] = it->second;
      envc.terms[{key.first, deg, idx}] = c;
    }
    CHECK(envc.terms == ad.terms);
    CHECK(chain_mc_holds(a, ng, ad));
  }
}
