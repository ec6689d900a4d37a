#include "malcev/mc_gauge.hpp"

#include <algorithm>

#include "malcev/errors.hpp"

namespace malcev {

namespace {

void add_term(std::map<std::pair<size_t, Word>, Rat>& acc,
              const std::pair<size_t, Word>& key, const Rat& c) {
  if (c == 0) return;
  Rat& v = acc[key];
  v += c;
  if (v == 0) acc.erase(key);
}

}  // namespace

int Envelope::total_degree(size_t ai, const Word& w) const {
  int gdeg = 0;
  for (int l : w) gdeg += g_->generators().degree(l);
  return a_->degree(ai) - gdeg;
}

EnvElement Envelope::mul(const EnvElement& x, const EnvElement& y) const {
  EnvElement out;
  const int maxw = g_->ctx->truncation().max_weight;
  for (const auto& [kx, cx] : x.terms) {
    int gdeg_x = 0, gpar_x = 0;
    for (int l : kx.second) gdeg_x += g_->generators().degree(l);
    gpar_x = gdeg_x % 2;
    for (const auto& [ky, cy] : y.terms) {
      if (static_cast<int>(kx.second.size() + ky.second.size()) > maxw)
        continue;
      int sign = (gpar_x * a_->degree(ky.first)) % 2 ? -1 : 1;
      const Vec& prod = a_->product(kx.first, ky.first);
      Word w = kx.second;
      w.insert(w.end(), ky.second.begin(), ky.second.end());
      for (size_t k = 0; k < prod.size(); ++k)
        if (prod[k] != 0) add_term(out.terms, {k, w}, sign * prod[k] * cx * cy);
    }
  }
  return out;
}

EnvElement Envelope::d(const EnvElement& x, bool lie_sign_flip) const {
  EnvElement out;
  for (const auto& [key, c] : x.terms) {
    const Vec& da = a_->d_basis(key.first);
    for (size_t k = 0; k < da.size(); ++k)
      if (da[k] != 0) add_term(out.terms, {k, key.second}, da[k] * c);
    int sign = lie_sign_flip == (a_->degree(key.first) % 2 != 0) ? 1 : -1;
    TensorPoly img =
        g_->differential.apply_tensor(TensorPoly{{key.second, rat(1)}});
    for (const auto& [w, cw] : img)
      add_term(out.terms, {key.first, w}, sign * cw * c);
  }
  return out;
}

EnvElement Envelope::exp(const EnvElement& x) const {
  for (const auto& [key, c] : x.terms)
    if (key.second.empty())
      throw Error(errc::degree_mismatch, "exp needs a constant-free argument");
  EnvElement out;
  add_term(out.terms, {a_->unit_index(), Word{}}, rat(1));
  EnvElement power = x;
  Rat factorial = 1;
  for (int k = 1; !power.zero(); ++k) {
    factorial *= k;
    for (const auto& [key, c] : power.terms)
      add_term(out.terms, key, c / factorial);
    power = mul(power, x);
    if (k > g_->ctx->truncation().max_weight + 1) break;
  }
  return out;
}

EnvElement Envelope::log(const EnvElement& x) const {
  EnvElement y = x;  // x - 1
  auto unit = std::make_pair(a_->unit_index(), Word{});
  auto it = y.terms.find(unit);
  if (it == y.terms.end() || it->second != 1)
    throw Error(errc::degree_mismatch, "log needs unit constant term");
  y.terms.erase(unit);
  for (const auto& [key, c] : y.terms)
    if (key.second.empty())
      throw Error(errc::degree_mismatch, "log: constant term not the unit");
  EnvElement out;
  EnvElement power = y;
  for (int k = 1; !power.zero(); ++k) {
    Rat coeff = rat(k % 2 ? 1 : -1, k);
    for (const auto& [key, c] : power.terms)
      add_term(out.terms, key, coeff * c);
    power = mul(power, y);
    if (k > g_->ctx->truncation().max_weight + 1) break;
  }
  return out;
}

EnvElement Envelope::embed(const DGMCElement& w) const {
  EnvElement out;
  for (const auto& [key, c] : w.terms)
    for (const auto& [word, cw] : g_->ctx->rho(key.second))
      add_term(out.terms, {key.first, word}, c * cw);
  return out;
}

EnvElement Envelope::embed_log(const DGGaugeElement& u) const {
  EnvElement out;
  for (const auto& [key, c] : u.log_terms)
    for (const auto& [word, cw] : g_->ctx->rho(key.second))
      add_term(out.terms, {key.first, word}, c * cw);
  return out;
}

std::map<std::pair<size_t, LieWord>, Rat> Envelope::primitive(
    const EnvElement& x) const {
  std::map<size_t, TensorPoly> columns;
  for (const auto& [key, c] : x.terms) columns[key.first][key.second] = c;
  std::map<std::pair<size_t, LieWord>, Rat> out;
  for (const auto& [ai, poly] : columns) {
    LieElement e = g_->ctx->straighten(poly);
    for (const auto& [b, c] : e) out[{ai, b}] = c;
  }
  return out;
}

MCVerdict is_mc(const DGAlgebra& a, const FreeDGLie& g, const DGMCElement& w) {
  for (const auto& [key, c] : w.terms)
    if (a.degree(key.first) != key.second.degree + 1)
      throw Error(errc::degree_mismatch,
                  "component (" + a.label(key.first) + ", " +
                      key.second.str(g.generators()) + ")");
  Envelope env(a, g);
  EnvElement ew = env.embed(w);
  EnvElement residual = env.d(ew);
  for (const auto& [key, c] : env.mul(ew, ew).terms)
    add_term(residual.terms, key, c);
  return MCVerdict{residual.zero(), std::move(residual)};
}

DGMCElement gauge_act(const DGAlgebra& a, const FreeDGLie& g,
                      const DGGaugeElement& u, const DGMCElement& w) {
  if (!is_mc(a, g, w).holds)
    throw Error(errc::not_mc, "gauge action input");
  Envelope env(a, g);
  EnvElement lu = env.embed_log(u);
  for (const auto& [key, c] : lu.terms)
    if (env.total_degree(key.first, key.second) != 0)
      throw Error(errc::degree_mismatch, "gauge element must have degree 0");
  EnvElement big_u = env.exp(lu);
  EnvElement neg = lu;
  for (auto& [key, c] : neg.terms) c = -c;
  EnvElement big_u_inv = env.exp(neg);

  EnvElement ew = env.embed(w);
  EnvElement result = env.mul(env.mul(big_u, ew), big_u_inv);
  EnvElement correction = env.mul(env.d(big_u), big_u_inv);
  for (const auto& [key, c] : correction.terms)
    add_term(result.terms, key, -c);

  DGMCElement out;
  out.terms = env.primitive(result);
  if (!is_mc(a, g, out).holds)
    throw Error(errc::sign_convention_failure,
                "gauge action left the Maurer-Cartan set");
  return out;
}

DGGaugeElement gauge_compose(const DGAlgebra& a, const FreeDGLie& g,
                             const DGGaugeElement& u, const DGGaugeElement& v) {
  Envelope env(a, g);
  EnvElement prod = env.mul(env.exp(env.embed_log(u)),
                            env.exp(env.embed_log(v)));
  DGGaugeElement out;
  out.log_terms = env.primitive(env.log(prod));
  return out;
}

DGGaugeElement gauge_inverse(const DGGaugeElement& u) {
  DGGaugeElement out = u;
  for (auto& [key, c] : out.log_terms) c = -c;
  return out;
}

LieElement bch(const FreeLieContext& ctx, const LieElement& x,
               const LieElement& y) {
  TensorPoly px = ctx.expand(x), py = ctx.expand(y);
  auto texp = [&](const TensorPoly& p) {
    TensorPoly out{{Word{}, rat(1)}};
    TensorPoly power = p;
    Rat factorial = 1;
    for (int k = 1; !power.empty(); ++k) {
      factorial *= k;
      for (const auto& [w, c] : power) {
        Rat& v = out[w];
        v += c / factorial;
        if (v == 0) out.erase(w);
      }
      power = ctx.tensor_mul(power, p);
      if (k > ctx.truncation().max_weight + 1) break;
    }
    return out;
  };
  TensorPoly prod = ctx.tensor_mul(texp(px), texp(py));
  // log(1 + q)
  TensorPoly q = prod;
  q.erase(Word{});
  TensorPoly out;
  TensorPoly power = q;
  for (int k = 1; !power.empty(); ++k) {
    Rat coeff = rat(k % 2 ? 1 : -1, k);
    for (const auto& [w, c] : power) {
      Rat& v = out[w];
      v += coeff * c;
      if (v == 0) out.erase(w);
    }
    power = ctx.tensor_mul(power, q);
    if (k > ctx.truncation().max_weight + 1) break;
  }
  return ctx.straighten(out);
}

MCSolveOutcome mc_solve(const DGAlgebra& a, const FreeDGLie& g,
                        const DGMCElement& seed, const Truncation& t) {
  // The solution is extended along the cochain degree: the residual lives on
  // the line A^{n+2} (x) g_n, and the block at g-degree m-2 is linear in the
  // unknown components from A^m (x) g_{m-1} through the Lie differential.
  Envelope env(a, g);
  DGMCElement omega = seed;
  const int top = a.top_degree();

  for (int m = 2; m <= top; ++m) {
    auto verdict = is_mc(a, g, omega);
    if (verdict.holds) break;
    // residual block at (A-degree m, g-degree m-2)
    EnvElement rhs;
    for (const auto& [key, c] : verdict.residual.terms)
      if (a.degree(key.first) == m) rhs.terms[key] = c;

    std::vector<std::pair<size_t, LieWord>> unknowns;
    for (const auto& b : g.ctx->basis()) {
      if (b.degree != m - 1 || b.weight > std::min(t.max_weight,
                                                   g.window.max_weight))
        continue;
      for (size_t ai = 0; ai < a.dim(); ++ai) {
        if (a.degree(ai) != m) continue;
        if (omega.terms.count({ai, b})) continue;  // pinned by the seed
        unknowns.emplace_back(ai, b);
      }
    }
    if (unknowns.empty() && rhs.zero()) continue;

    std::map<std::pair<size_t, Word>, size_t> target_index;
    std::vector<EnvElement> columns(unknowns.size());
    for (size_t j = 0; j < unknowns.size(); ++j) {
      DGMCElement unit;
      unit.terms[{unknowns[j].first, unknowns[j].second}] = 1;
      // only the Lie-differential part stays in this block
      EnvElement img = env.d(env.embed(unit));
      EnvElement lin;
      for (const auto& [key, c] : img.terms)
        if (a.degree(key.first) == m) lin.terms[key] = c;
      columns[j] = lin;
      for (const auto& [key, c] : lin.terms)
        target_index.emplace(key, target_index.size());
    }
    for (const auto& [key, c] : rhs.terms)
      target_index.emplace(key, target_index.size());
    Matrix mat(target_index.size(), unknowns.size());
    for (size_t j = 0; j < unknowns.size(); ++j)
      for (const auto& [key, c] : columns[j].terms)
        mat(target_index[key], j) = c;
    Vec b(target_index.size());
    for (const auto& [key, c] : rhs.terms) b[target_index[key]] = -c;
    auto sol = solve(mat, b);
    if (!sol) {
      MCSolveOutcome out;
      out.obstruction_degree = m;
      out.note = "obstruction at cochain degree " + std::to_string(m);
      return out;
    }
    for (size_t j = 0; j < unknowns.size(); ++j)
      if ((*sol)[j] != 0) omega.terms[unknowns[j]] = (*sol)[j];
  }

  auto verdict = is_mc(a, g, omega);
  if (!verdict.holds) {
    MCSolveOutcome out;
    int deg = -1;
    for (const auto& [key, c] : verdict.residual.terms) {
      int k = a.degree(key.first);
      if (deg < 0 || k < deg) deg = k;
    }
    out.obstruction_degree = deg;
    out.note = "residual persists within the truncation";
    return out;
  }
  MCSolveOutcome out;
  out.solution = std::move(omega);
  return out;
}

}  // namespace malcev
