#include "malcev/dold_kan.hpp"

#include <algorithm>

#include "malcev/chain_complex.hpp"
#include "malcev/errors.hpp"

namespace malcev {

namespace {

using SymVec = std::map<DKSymbol, Rat>;

void sym_add(SymVec& acc, const DKSymbol& s, const Rat& c) {
  if (c == 0) return;
  Rat& v = acc[s];
  v += c;
  if (v == 0) acc.erase(s);
}

// Coface and codegeneracy on denormalization symbols, reduced to the normal
// form (strictly increasing words applied to base elements, sigma annihilates
// bases, and a del^0 on a base expands through the differential).
struct SymbolCalculus {
  const Cochain* v;

  SymVec coface(const DKSymbol& s, int i) const {
    SymVec out;
    if (s.word.empty()) {
      if (i == 0) {
        if (s.base_degree < static_cast<int>(v->d.size())) {
          const Matrix& d = v->d[s.base_degree];
          for (size_t r = 0; r < d.rows(); ++r)
            if (d(r, s.base_index) != 0)
              sym_add(out, {s.base_degree + 1, {}, r}, d(r, s.base_index));
        }
        for (int k = 1; k <= s.base_degree + 1; ++k)
          sym_add(out, {s.base_degree, {k}, s.base_index},
                  (k % 2) ? rat(1) : rat(-1));
      } else {
        sym_add(out, {s.base_degree, {i}, s.base_index}, rat(1));
      }
      return out;
    }
    int j = s.word.back();
    if (i > j) {
      DKSymbol t = s;
      t.word.push_back(i);
      sym_add(out, t, rat(1));
      return out;
    }
    DKSymbol inner = s;
    inner.word.pop_back();
    for (const auto& [t, c] : coface(inner, i))
      for (const auto& [u, cu] : coface(t, j + 1)) sym_add(out, u, c * cu);
    return out;
  }

  SymVec codegen(const DKSymbol& s, int i) const {
    SymVec out;
    if (s.word.empty()) return out;  // sigma^i annihilates base elements
    int j = s.word.back();
    DKSymbol inner = s;
    inner.word.pop_back();
    if (j == i || j == i + 1) {
      sym_add(out, inner, rat(1));
      return out;
    }
    if (j < i) {
      for (const auto& [t, c] : codegen(inner, i - 1))
        for (const auto& [u, cu] : coface(t, j)) sym_add(out, u, c * cu);
      return out;
    }
    for (const auto& [t, c] : codegen(inner, i))
      for (const auto& [u, cu] : coface(t, j - 1)) sym_add(out, u, c * cu);
    return out;
  }
};

}  // namespace

void CosimplicialModule::validate() const {
  auto at = [&](const std::vector<std::vector<Matrix>>& v, int n,
                int i) -> const Matrix& { return v[n][i]; };
  const int top = levels();
  for (int n = 0; n + 2 <= top; ++n)
    for (int i = 0; i <= n + 1; ++i)
      for (int j = i + 1; j <= n + 2; ++j)
        if (!(at(coface, n + 1, j) * at(coface, n, i) ==
              at(coface, n + 1, i) * at(coface, n, j - 1)))
          throw Error(errc::simplicial_identity, "coface identity");
  for (int n = 0; n + 1 <= top; ++n)
    for (int i = 0; i <= n + 1; ++i)
      for (int j = 0; j <= n; ++j) {
        Matrix lhs = at(codegen, n, j) * at(coface, n, i);
        Matrix rhs;
        if (i < j)
          rhs = at(coface, n - 1, i) * at(codegen, n - 1, j - 1);
        else if (i == j || i == j + 1)
          rhs = Matrix::identity(dims[n]);
        else
          rhs = at(coface, n - 1, i - 1) * at(codegen, n - 1, j);
        if (!(lhs == rhs))
          throw Error(errc::simplicial_identity, "mixed identity");
      }
  for (int n = 0; n + 2 <= top; ++n)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i)
        if (!(at(codegen, n, i) * at(codegen, n + 1, j + 1) ==
              at(codegen, n, j) * at(codegen, n + 1, i)))
          throw Error(errc::simplicial_identity, "codegeneracy identity");
}

Denormalized denormalize(const Cochain& v, int n_max) {
  Denormalized out;
  SymbolCalculus calc{&v};
  std::vector<std::map<DKSymbol, size_t>> index(n_max + 1);
  out.symbols.resize(n_max + 1);
  out.normalized.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (int m = std::max(0, 0); m <= n; ++m) {
      if (v.dim(m) == 0) continue;
      // increasing words of length n-m inside {1..n}
      std::vector<std::vector<int>> words;
      std::vector<int> cur;
      auto rec = [&](auto&& self, int start, int need) -> void {
        if (need == 0) {
          words.push_back(cur);
          return;
        }
        for (int j = start; j <= n; ++j) {
          cur.push_back(j);
          self(self, j + 1, need - 1);
          cur.pop_back();
        }
      };
      rec(rec, 1, n - m);
      for (const auto& w : words)
        for (size_t b = 0; b < v.dim(m); ++b) {
          DKSymbol s{m, w, b};
          index[n][s] = out.symbols[n].size();
          out.symbols[n].push_back(s);
          if (w.empty()) out.normalized[n].push_back(out.symbols[n].size() - 1);
        }
    }
    out.mod.dims.push_back(out.symbols[n].size());
  }
  out.mod.coface.resize(n_max);
  out.mod.codegen.resize(n_max);
  for (int n = 0; n < n_max; ++n) {
    out.mod.coface[n].resize(n + 2);
    for (int i = 0; i <= n + 1; ++i) {
      Matrix m(out.mod.dims[n + 1], out.mod.dims[n]);
      for (size_t c = 0; c < out.symbols[n].size(); ++c)
        for (const auto& [s, coeff] : calc.coface(out.symbols[n][c], i))
          m(index[n + 1].at(s), c) = coeff;
      out.mod.coface[n][i] = std::move(m);
    }
    out.mod.codegen[n].resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      Matrix m(out.mod.dims[n], out.mod.dims[n + 1]);
      for (size_t c = 0; c < out.symbols[n + 1].size(); ++c)
        for (const auto& [s, coeff] : calc.codegen(out.symbols[n + 1][c], i))
          m(index[n].at(s), c) = coeff;
      out.mod.codegen[n][i] = std::move(m);
    }
  }
  out.mod.validate();
  return out;
}

Normalized normalize(const CosimplicialModule& c) {
  Normalized out;
  const int top = c.levels();
  std::vector<Matrix> incl(top + 1);
  for (int n = 0; n <= top; ++n) {
    if (n == 0) {
      incl[0] = Matrix::identity(c.dims[0]);
    } else {
      // intersection of the kernels of sigma^0..sigma^{n-1}
      size_t rows = 0;
      for (int i = 0; i < n; ++i) rows += c.dims[n - 1];
      Matrix stacked(rows, c.dims[n]);
      size_t r0 = 0;
      for (int i = 0; i < n; ++i) {
        const Matrix& s = c.codegen[n - 1][i];
        for (size_t r = 0; r < s.rows(); ++r)
          for (size_t cc = 0; cc < s.cols(); ++cc)
            stacked(r0 + r, cc) = s(r, cc);
        r0 += c.dims[n - 1];
      }
      incl[n] = rank_kernel_image(stacked).kernel;
    }
    out.complex.dims.push_back(incl[n].cols());
  }
  out.inclusion = incl;
  for (int n = 0; n < top; ++n) {
    Matrix d(c.dims[n + 1], c.dims[n]);
    for (int i = 0; i <= n + 1; ++i) {
      const Matrix& f = c.coface[n][i];
      for (size_t r = 0; r < d.rows(); ++r)
        for (size_t cc = 0; cc < d.cols(); ++cc)
          d(r, cc) += (i % 2 ? -f(r, cc) : f(r, cc));
    }
    Matrix dn(incl[n + 1].cols(), incl[n].cols());
    LinearSolver solver(incl[n + 1]);
    for (size_t cc = 0; cc < incl[n].cols(); ++cc) {
      auto x = solver.solve(d.apply(incl[n].column(cc)));
      if (!x)
        throw Error(errc::simplicial_identity,
                    "cochain differential leaves the normalized part");
      for (size_t r = 0; r < dn.rows(); ++r) dn(r, cc) = (*x)[r];
    }
    out.complex.d.push_back(std::move(dn));
  }
  return out;
}

std::vector<Shuffle> shuffles(int p, int q) {
  std::vector<Shuffle> out;
  std::vector<int> mu;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(mu.size()) == p) {
      Shuffle s;
      s.mu = mu;
      std::vector<bool> in_mu(p + q, false);
      for (int m : mu) in_mu[m] = true;
      for (int i = 0; i < p + q; ++i)
        if (!in_mu[i]) s.nu.push_back(i);
      int inv = 0;
      for (int m : s.mu)
        for (int nvi : s.nu)
          if (nvi < m) ++inv;
      s.sign = inv % 2 ? -1 : 1;
      out.push_back(std::move(s));
      return;
    }
    for (int j = start; j < p + q; ++j) {
      mu.push_back(j);
      self(self, j + 1);
      mu.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

Vec CosimplicialAlgebra::mul(int level, const Vec& x, const Vec& y) const {
  const size_t n = da.mod.dims[level];
  Vec out(n);
  const Matrix& p = product[level];
  for (size_t j = 0; j < n; ++j) {
    if (x[j] == 0) continue;
    for (size_t k = 0; k < n; ++k) {
      if (y[k] == 0) continue;
      Rat c = x[j] * y[k];
      for (size_t r = 0; r < n; ++r)
        if (p(r, j * n + k) != 0) out[r] += c * p(r, j * n + k);
    }
  }
  return out;
}

CosimplicialAlgebra shuffle_algebra(const DGAlgebra& a, int n_max) {
  CosimplicialAlgebra out;
  // underlying cochain complex in per-degree coordinates
  Cochain v;
  std::vector<std::vector<size_t>> by_degree;
  for (int n = 0; n <= a.top_degree(); ++n)
    by_degree.push_back(a.indices_of_degree(n));
  for (const auto& idxs : by_degree) v.dims.push_back(idxs.size());
  for (int n = 0; n < a.top_degree(); ++n) {
    Matrix d(v.dims[n + 1], v.dims[n]);
    for (size_t c = 0; c < by_degree[n].size(); ++c) {
      const Vec& img = a.d_basis(by_degree[n][c]);
      for (size_t r = 0; r < by_degree[n + 1].size(); ++r)
        d(r, c) = img[by_degree[n + 1][r]];
    }
    v.d.push_back(std::move(d));
  }
  out.da = denormalize(v, n_max);
  const auto& da = out.da;

  // diagonal bicosimplicial structure on pairs
  auto diag_coface = [&](int n, int i, const Vec& w) {
    const size_t dn = da.mod.dims[n], dn1 = da.mod.dims[n + 1];
    const Matrix& f = da.mod.coface[n][i];
    Vec outv(dn1 * dn1);
    for (size_t c1 = 0; c1 < dn; ++c1)
      for (size_t c2 = 0; c2 < dn; ++c2) {
        const Rat& val = w[c1 * dn + c2];
        if (val == 0) continue;
        for (size_t r1 = 0; r1 < dn1; ++r1) {
          if (f(r1, c1) == 0) continue;
          for (size_t r2 = 0; r2 < dn1; ++r2)
            if (f(r2, c2) != 0) outv[r1 * dn1 + r2] += f(r1, c1) * f(r2, c2) * val;
        }
      }
    return outv;
  };

  // normalized parts of the diagonal, per level
  std::vector<Matrix> diag_n(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const size_t dn = da.mod.dims[n];
    if (n == 0) {
      diag_n[0] = Matrix::identity(dn * dn);
      continue;
    }
    const size_t dprev = da.mod.dims[n - 1];
    Matrix stacked(n * dprev * dprev, dn * dn);
    for (int i = 0; i < n; ++i) {
      const Matrix& s = da.mod.codegen[n - 1][i];
      for (size_t c1 = 0; c1 < dn; ++c1)
        for (size_t c2 = 0; c2 < dn; ++c2)
          for (size_t r1 = 0; r1 < dprev; ++r1) {
            if (s(r1, c1) == 0) continue;
            for (size_t r2 = 0; r2 < dprev; ++r2)
              if (s(r2, c2) != 0)
                stacked(i * dprev * dprev + r1 * dprev + r2, c1 * dn + c2) =
                    s(r1, c1) * s(r2, c2);
          }
    }
    diag_n[n] = rank_kernel_image(stacked).kernel;
  }

  // shuffle evaluation on normalized diagonal elements
  auto nabla = [&](int m, const Vec& kappa) {
    // kappa lives on pairs at level m; lands in A^m coordinates
    const size_t dm = da.mod.dims[m];
    Vec res(v.dim(m));
    if (m > a.top_degree()) return res;
    for (int p = 0; p <= m; ++p) {
      int q = m - p;
      for (const auto& sh : shuffles(p, q)) {
        // apply sigma^{nu} to the left slot (down to level p), sigma^{mu} to
        // the right slot (down to level q)
        for (size_t c1 = 0; c1 < dm; ++c1)
          for (size_t c2 = 0; c2 < dm; ++c2) {
            const Rat& val = kappa[c1 * dm + c2];
            if (val == 0) continue;
            Vec left(dm), right(dm);
            left[c1] = 1;
            right[c2] = 1;
            int lev = m;
            for (int t = static_cast<int>(sh.nu.size()) - 1; t >= 0; --t) {
              left = da.mod.codegen[lev - 1][sh.nu[t]].apply(left);
              --lev;
            }
            lev = m;
            for (int t = static_cast<int>(sh.mu.size()) - 1; t >= 0; --t) {
              right = da.mod.codegen[lev - 1][sh.mu[t]].apply(right);
              --lev;
            }
            // project onto the normalized components A^p and A^q
            Vec ap(v.dim(p)), aq(v.dim(q));
            for (size_t k = 0; k < da.normalized[p].size(); ++k)
              ap[k] = left[da.normalized[p][k]];
            for (size_t k = 0; k < da.normalized[q].size(); ++k)
              aq[k] = right[da.normalized[q][k]];
            // multiply in A
            for (size_t i1 = 0; i1 < ap.size(); ++i1) {
              if (ap[i1] == 0) continue;
              for (size_t i2 = 0; i2 < aq.size(); ++i2) {
                if (aq[i2] == 0) continue;
                const Vec& prod = a.product(by_degree[p][i1], by_degree[q][i2]);
                for (size_t r = 0; r < by_degree[m].size(); ++r)
                  if (prod[by_degree[m][r]] != 0)
                    res[r] += sh.sign * val * ap[i1] * aq[i2] *
                              prod[by_degree[m][r]];
              }
            }
          }
      }
    }
    return res;
  };

  // assemble products level by level via the Dold-Kan decomposition of the
  // diagonal
  out.product.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const size_t dn = da.mod.dims[n];
    std::vector<Vec> columns;   // decomposition columns in pair coordinates
    std::vector<Vec> images;    // their products in D^nA coordinates
    for (int m = n; m >= 0; --m) {
      // increasing words of length n-m in {1..n}
      std::vector<std::vector<int>> words;
      std::vector<int> cur;
      auto rec = [&](auto&& self, int start, int need) -> void {
        if (need == 0) {
          words.push_back(cur);
          return;
        }
        for (int j = start; j <= n; ++j) {
          cur.push_back(j);
          self(self, j + 1, need - 1);
          cur.pop_back();
        }
      };
      rec(rec, 1, n - m);
      for (const auto& w : words)
        for (size_t k = 0; k < diag_n[m].cols(); ++k) {
          Vec col = diag_n[m].column(k);
          Vec base_product = nabla(m, col);
          // embed A^m into level m
          Vec img(da.mod.dims[m]);
          for (size_t t = 0; t < da.normalized[m].size(); ++t)
            img[da.normalized[m][t]] = base_product[t];
          int lev = m;
          Vec colv = col;
          for (int j : w) {
            colv = diag_coface(lev, j, colv);
            img = da.mod.coface[lev][j].apply(img);
            ++lev;
          }
          columns.push_back(std::move(colv));
          images.push_back(std::move(img));
        }
    }
    if (columns.size() != dn * dn)
      throw Error(errc::simplicial_identity,
                  "diagonal decomposition has the wrong rank");
    Matrix decomp(dn * dn, columns.size());
    for (size_t c = 0; c < columns.size(); ++c)
      for (size_t r = 0; r < dn * dn; ++r) decomp(r, c) = columns[c][r];
    LinearSolver solver(std::move(decomp));
    Matrix mu(dn, dn * dn);
    for (size_t j = 0; j < dn; ++j)
      for (size_t k = 0; k < dn; ++k) {
        Vec e(dn * dn);
        e[j * dn + k] = 1;
        auto coords = solver.solve(e);
        if (!coords)
          throw Error(errc::simplicial_identity, "decomposition not spanning");
        Vec val(dn);
        for (size_t c = 0; c < columns.size(); ++c) {
          if ((*coords)[c] == 0) continue;
          for (size_t r = 0; r < dn; ++r)
            if (images[c][r] != 0) val[r] += (*coords)[c] * images[c][r];
        }
        for (size_t r = 0; r < dn; ++r) mu(r, j * dn + k) = val[r];
      }
    out.product[n] = std::move(mu);
  }

  // units: propagate the algebra unit along cofaces
  out.unit.resize(n_max + 1);
  {
    Vec u0(da.mod.dims[0]);
    // level 0 = A^0; locate the unit among the degree-0 basis
    for (size_t k = 0; k < by_degree[0].size(); ++k)
      if (by_degree[0][k] == a.unit_index()) u0[da.normalized[0][k]] = 1;
    out.unit[0] = u0;
    for (int n = 1; n <= n_max; ++n)
      out.unit[n] = da.mod.coface[n - 1][n].apply(out.unit[n - 1]);
  }
  return out;
}

void SimplicialModule::validate() const {
  const int top = levels();
  for (int n = 2; n <= top; ++n)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (!(face[n - 1][i] * face[n][j] == face[n - 1][j - 1] * face[n][i]))
          throw Error(errc::simplicial_identity, "face identity");
  for (int n = 0; n + 1 <= top; ++n)
    for (int i = 0; i <= n + 1; ++i)
      for (int j = 0; j <= n; ++j) {
        Matrix lhs = face[n + 1][i] * degen[n][j];
        Matrix rhs;
        if (i < j)
          rhs = degen[n - 1][j - 1] * face[n][i];
        else if (i == j || i == j + 1)
          rhs = Matrix::identity(dims[n]);
        else
          rhs = degen[n - 1][j] * face[n][i - 1];
        if (!(lhs == rhs))
          throw Error(errc::simplicial_identity, "mixed identity");
      }
}

SimplicialModule simplicial_dual(const CosimplicialModule& c) {
  SimplicialModule out;
  out.dims = c.dims;
  const int top = c.levels();
  out.face.resize(top + 1);
  out.degen.resize(top + 1);
  for (int n = 1; n <= top; ++n) {
    out.face[n].resize(n + 1);
    for (int i = 0; i <= n; ++i) out.face[n][i] = c.coface[n - 1][i].transpose();
  }
  for (int n = 0; n < top; ++n) {
    out.degen[n].resize(n + 1);
    for (int i = 0; i <= n; ++i) out.degen[n][i] = c.codegen[n][i].transpose();
  }
  out.validate();
  return out;
}

void SimplicialLie::validate() const {
  SimplicialModule m;
  m.dims = dims;
  m.face = face;
  m.degen = degen;
  m.validate();
  // maps are Lie homomorphisms
  auto check_map = [&](int src, const Matrix& f, int tgt) {
    const size_t ds = dims[src], dt = dims[tgt];
    for (size_t i = 0; i < ds; ++i)
      for (size_t j = 0; j < ds; ++j) {
        Vec lhs = f.apply(bracket[src][i * ds + j]);
        Vec fi = f.column(i), fj = f.column(j);
        Vec rhs(dt);
        for (size_t p = 0; p < dt; ++p) {
          if (fi[p] == 0) continue;
          for (size_t q = 0; q < dt; ++q) {
            if (fj[q] == 0) continue;
            const Vec& br = bracket[tgt][p * dt + q];
            for (size_t r = 0; r < dt; ++r)
              if (br[r] != 0) rhs[r] += fi[p] * fj[q] * br[r];
          }
        }
        if (lhs != rhs)
          throw Error(errc::simplicial_identity, "face is not a Lie map");
      }
  };
  for (int n = 1; n <= levels(); ++n)
    for (int i = 0; i <= n; ++i) check_map(n, face[n][i], n - 1);
  for (int n = 0; n < levels(); ++n)
    for (int i = 0; i <= n; ++i) check_map(n, degen[n][i], n + 1);
}

SimplicialLie SimplicialLie::constant(size_t dim, const std::vector<Vec>& table,
                                      int n_max) {
  SimplicialLie g;
  for (int n = 0; n <= n_max; ++n) {
    g.dims.push_back(dim);
    g.bracket.push_back(table);
  }
  g.face.resize(n_max + 1);
  g.degen.resize(n_max + 1);
  for (int n = 1; n <= n_max; ++n)
    g.face[n].assign(n + 1, Matrix::identity(dim));
  for (int n = 0; n < n_max; ++n)
    g.degen[n].assign(n + 1, Matrix::identity(dim));
  g.validate();
  return g;
}

SimplicialLie SimplicialLie::levelwise_free(const SimplicialModule& v,
                                            int weight) {
  SimplicialLie g;
  g.is_free = true;
  g.max_weight = weight;
  g.generators = v;
  const int top = v.levels();
  for (int n = 0; n <= top; ++n) {
    std::vector<Generator> gens;
    for (size_t k = 0; k < v.dims[n]; ++k)
      gens.push_back({"t" + std::to_string(n) + "_" + std::to_string(k), 0});
    g.ctx.push_back(std::make_shared<FreeLieContext>(
        GradedGenerators(std::move(gens)), Truncation{0, weight}));
    g.dims.push_back(g.ctx[n]->basis().size());
  }
  auto coords = [&](int n, const LieElement& e) {
    const auto& basis = g.ctx[n]->basis();
    Vec out(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) {
      auto it = e.find(basis[k]);
      if (it != e.end()) out[k] = it->second;
    }
    return out;
  };
  for (int n = 0; n <= top; ++n) {
    const auto& basis = g.ctx[n]->basis();
    const size_t d = basis.size();
    std::vector<Vec> table(d * d, Vec(d));
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j)
        table[i * d + j] = coords(
            n, g.ctx[n]->bracket(LieElement{{basis[i], rat(1)}},
                                 LieElement{{basis[j], rat(1)}}));
    g.bracket.push_back(std::move(table));
  }
  auto word_map = [&](int src, const Matrix& f, int tgt) {
    const auto& basis = g.ctx[src]->basis();
    Matrix m(g.dims[tgt], g.dims[src]);
    std::vector<Vec> letter_images;
    for (size_t l = 0; l < v.dims[src]; ++l) letter_images.push_back(f.column(l));
    for (size_t c = 0; c < basis.size(); ++c) {
      TensorPoly moved = FreeLieContext::tensor_substitute(
          g.ctx[src]->rho(basis[c]), letter_images);
      Vec img = coords(tgt, g.ctx[tgt]->straighten(moved));
      for (size_t r = 0; r < img.size(); ++r) m(r, c) = img[r];
    }
    return m;
  };
  g.face.resize(top + 1);
  g.degen.resize(top + 1);
  for (int n = 1; n <= top; ++n) {
    g.face[n].resize(n + 1);
    for (int i = 0; i <= n; ++i)
      g.face[n][i] = word_map(n, v.face[n][i], n - 1);
  }
  for (int n = 0; n < top; ++n) {
    g.degen[n].resize(n + 1);
    for (int i = 0; i <= n; ++i)
      g.degen[n][i] = word_map(n, v.degen[n][i], n + 1);
  }
  g.validate();
  return g;
}

Vec ChainLie::apply_bracket(int p, int q, const Vec& x, const Vec& y) const {
  auto it = bracket.find({p, q});
  const size_t dp = dim(p), dq = dim(q), dr = dim(p + q);
  Vec out(dr);
  if (it == bracket.end()) return out;
  for (size_t i = 0; i < dp; ++i) {
    if (x[i] == 0) continue;
    for (size_t j = 0; j < dq; ++j) {
      if (y[j] == 0) continue;
      const Vec& b = it->second[i * dq + j];
      for (size_t r = 0; r < dr; ++r)
        if (b[r] != 0) out[r] += x[i] * y[j] * b[r];
    }
  }
  return out;
}

namespace {

struct NormalizedLie {
  std::vector<Matrix> incl;  // N_n -> g_n
  std::vector<Matrix> proj;  // g_n -> N_n along degeneracies
};

NormalizedLie normalize_lie_basis(const SimplicialLie& g) {
  NormalizedLie out;
  const int top = g.levels();
  out.incl.resize(top + 1);
  out.proj.resize(top + 1);
  for (int n = 0; n <= top; ++n) {
    if (n == 0) {
      out.incl[0] = Matrix::identity(g.dims[0]);
      out.proj[0] = Matrix::identity(g.dims[0]);
      continue;
    }
    Matrix stacked(n * g.dims[n - 1], g.dims[n]);
    for (int i = 1; i <= n; ++i) {
      const Matrix& f = g.face[n][i];
      for (size_t r = 0; r < f.rows(); ++r)
        for (size_t c = 0; c < f.cols(); ++c)
          stacked((i - 1) * g.dims[n - 1] + r, c) = f(r, c);
    }
    out.incl[n] = rank_kernel_image(stacked).kernel;
    // complement: the degenerate part
    std::vector<Vec> cols = out.incl[n].columns();
    RowReducer span(g.dims[n]);
    for (const auto& c : cols) span.add(c);
    for (int i = 0; i < n; ++i)
      for (size_t c = 0; c < g.dims[n - 1]; ++c) {
        Vec v = g.degen[n - 1][i].column(c);
        if (span.add(v)) cols.push_back(v);
      }
    if (cols.size() != g.dims[n])
      throw Error(errc::simplicial_identity,
                  "normalized + degenerate does not span");
    Matrix basis = Matrix::from_columns(g.dims[n], cols);
    LinearSolver solver(std::move(basis));
    Matrix proj(out.incl[n].cols(), g.dims[n]);
    for (size_t c = 0; c < g.dims[n]; ++c) {
      Vec e(g.dims[n]);
      e[c] = 1;
      auto x = solver.solve(e);
      for (size_t r = 0; r < proj.rows(); ++r) proj(r, c) = (*x)[r];
    }
    out.proj[n] = std::move(proj);
  }
  return out;
}

ChainLie build_chain_lie(const SimplicialLie& g, const NormalizedLie& nl,
                         bool sign_fault) {
  ChainLie out;
  const int top = g.levels();
  for (int n = 0; n <= top; ++n) out.dims.push_back(nl.incl[n].cols());
  out.diff.resize(top + 1);
  out.diff[0] = Matrix(0, out.dims[0]);
  for (int n = 1; n <= top; ++n) {
    Matrix d(out.dims[n - 1], out.dims[n]);
    for (size_t c = 0; c < out.dims[n]; ++c) {
      Vec img = g.face[n][0].apply(nl.incl[n].column(c));
      Vec coords = nl.proj[n - 1].apply(img);
      // the image of a normalized element under the 0th face is normalized
      Vec back = nl.incl[n - 1].apply(coords);
      if (back != img)
        throw Error(errc::simplicial_identity,
                    "0th face left the normalized part");
      for (size_t r = 0; r < d.rows(); ++r) d(r, c) = coords[r];
    }
    out.diff[n] = std::move(d);
  }
  for (int p = 0; p <= top; ++p)
    for (int q = 0; p + q <= top; ++q) {
      if (out.dims[p] == 0 || out.dims[q] == 0) continue;
      const int n = p + q;
      std::vector<Vec> table(out.dims[p] * out.dims[q], Vec(out.dims[n]));
      auto shs = shuffles(p, q);
      for (size_t i = 0; i < out.dims[p]; ++i)
        for (size_t j = 0; j < out.dims[q]; ++j) {
          Vec acc(g.dims[n]);
          bool faulted = false;
          for (const auto& sh : shs) {
            // degenerate the two arguments up to level p+q
            Vec left = nl.incl[p].column(i);
            int lev = p;
            for (int t = 0; t < static_cast<int>(sh.nu.size()); ++t) {
              left = g.degen[lev][sh.nu[t]].apply(left);
              ++lev;
            }
            Vec right = nl.incl[q].column(j);
            lev = q;
            for (int t = 0; t < static_cast<int>(sh.mu.size()); ++t) {
              right = g.degen[lev][sh.mu[t]].apply(right);
              ++lev;
            }
            int sgn = sh.sign;
            if (sign_fault && p + q == 1) sgn = -sgn;
            (void)faulted;
            const size_t dn = g.dims[n];
            for (size_t bi = 0; bi < dn; ++bi) {
              if (left[bi] == 0) continue;
              for (size_t bj = 0; bj < dn; ++bj) {
                if (right[bj] == 0) continue;
                const Vec& br = g.bracket[n][bi * dn + bj];
                for (size_t r = 0; r < dn; ++r)
                  if (br[r] != 0) acc[r] += sgn * left[bi] * right[bj] * br[r];
              }
            }
          }
          table[i * out.dims[q] + j] = nl.proj[n].apply(acc);
        }
      out.bracket[{p, q}] = std::move(table);
    }
  return out;
}

}  // namespace

ChainLie normalize_lie(const SimplicialLie& g) {
  NormalizedLie nl = normalize_lie_basis(g);
  return build_chain_lie(g, nl, false);
}

// --- DKTransport -------------------------------------------------------------

DKTransport::DKTransport(DGAlgebra a, SimplicialLie g, int n_max)
    : a_(std::move(a)), g_(std::move(g)), n_max_(n_max) {
  if (!g_.is_free)
    throw Error(errc::degree_mismatch,
                "transport requires a levelwise-free simplicial Lie algebra");
  if (g_.levels() < n_max_)
    throw Error(errc::degree_mismatch, "not enough Lie levels materialized");
  da_ = shuffle_algebra(a_, n_max_ + 1);
  NormalizedLie nl = normalize_lie_basis(g_);
  n_incl_ = nl.incl;
  n_proj_ = nl.proj;
  ng_ = build_chain_lie(g_, nl, false);
}

void DKTransport::rebuild_bracket() {
  NormalizedLie nl;
  nl.incl = n_incl_;
  nl.proj = n_proj_;
  ng_ = build_chain_lie(g_, nl, sign_fault_);
}

Vec DKTransport::lie_coords(int level, const TensorPoly& p) const {
  LieElement e = g_.ctx[level]->straighten(p);
  const auto& basis = g_.ctx[level]->basis();
  Vec out(basis.size());
  for (size_t k = 0; k < basis.size(); ++k) {
    auto it = e.find(basis[k]);
    if (it != e.end()) out[k] = it->second;
  }
  return out;
}

std::map<std::pair<size_t, Word>, Rat> DKTransport::level_mul(
    int alevel, int glevel, const std::map<std::pair<size_t, Word>, Rat>& x,
    const std::map<std::pair<size_t, Word>, Rat>& y) const {
  std::map<std::pair<size_t, Word>, Rat> out;
  const size_t dn = da_.da.mod.dims[alevel];
  const Matrix& mu = da_.product[alevel];
  const int maxw = g_.max_weight;
  for (const auto& [kx, cx] : x)
    for (const auto& [ky, cy] : y) {
      if (static_cast<int>(kx.second.size() + ky.second.size()) > maxw)
        continue;
      Word w = kx.second;
      w.insert(w.end(), ky.second.begin(), ky.second.end());
      for (size_t r = 0; r < dn; ++r) {
        const Rat& m = mu(r, kx.first * dn + ky.first);
        if (m != 0) {
          Rat& v = out[{r, w}];
          v += m * cx * cy;
          if (v == 0) out.erase({r, w});
        }
      }
    }
  return out;
}

std::map<std::pair<size_t, Word>, Rat> DKTransport::level_exp(
    int alevel, int glevel,
    const std::map<std::pair<size_t, Word>, Rat>& x) const {
  std::map<std::pair<size_t, Word>, Rat> out;
  const Vec& unit = da_.unit[alevel];
  for (size_t k = 0; k < unit.size(); ++k)
    if (unit[k] != 0) out[{k, Word{}}] = unit[k];
  auto power = x;
  Rat factorial = 1;
  for (int k = 1; !power.empty(); ++k) {
    factorial *= k;
    for (const auto& [key, c] : power) {
      Rat& v = out[key];
      v += c / factorial;
      if (v == 0) out.erase(key);
    }
    power = level_mul(alevel, glevel, power, x);
    if (k > g_.max_weight + 1) break;
  }
  return out;
}

std::map<std::pair<size_t, Word>, Rat> DKTransport::level_log(
    int alevel, int glevel,
    const std::map<std::pair<size_t, Word>, Rat>& x) const {
  auto y = x;
  const Vec& unit = da_.unit[alevel];
  for (size_t k = 0; k < unit.size(); ++k) {
    if (unit[k] == 0) continue;
    auto it = y.find({k, Word{}});
    if (it == y.end() || it->second != unit[k])
      throw Error(errc::degree_mismatch, "log: constant term is not the unit");
    y.erase({k, Word{}});
  }
  for (const auto& [key, c] : y)
    if (key.second.empty())
      throw Error(errc::degree_mismatch, "log: leftover constant term");
  std::map<std::pair<size_t, Word>, Rat> out;
  auto power = y;
  for (int k = 1; !power.empty(); ++k) {
    Rat coeff = rat(k % 2 ? 1 : -1, k);
    for (const auto& [key, c] : power) {
      Rat& v = out[key];
      v += coeff * c;
      if (v == 0) out.erase(key);
    }
    power = level_mul(alevel, glevel, power, y);
    if (k > g_.max_weight + 1) break;
  }
  return out;
}


namespace {

using LevelMap = std::map<std::pair<size_t, Word>, Rat>;

LevelMap apply_aside(const Matrix& m, const LevelMap& x) {
  LevelMap out;
  for (const auto& [key, c] : x)
    for (size_t r = 0; r < m.rows(); ++r) {
      const Rat& v = m(r, key.first);
      if (v == 0) continue;
      Rat& acc = out[{r, key.second}];
      acc += v * c;
      if (acc == 0) out.erase({r, key.second});
    }
  return out;
}

LevelMap apply_gside_letters(const Matrix& letters, const LevelMap& x) {
  std::vector<Vec> images;
  for (size_t l = 0; l < letters.cols(); ++l) images.push_back(letters.column(l));
  LevelMap out;
  for (const auto& [key, c] : x) {
    TensorPoly p{{key.second, c}};
    TensorPoly moved = FreeLieContext::tensor_substitute(p, images);
    for (const auto& [w, cw] : moved) {
      Rat& acc = out[{key.first, w}];
      acc += cw;
      if (acc == 0) out.erase({key.first, w});
    }
  }
  return out;
}

}  // namespace

void DKTransport::verify_mc(const SimplicialMC& w) const {
  const int K = static_cast<int>(w.level.size());
  for (int n = 0; n < K; ++n) {
    // sigma^0 omega_n = 1
    LevelMap lhs = apply_aside(da_.da.mod.codegen[n][0], w.level[n]);
    LevelMap unit;
    for (size_t k = 0; k < da_.unit[n].size(); ++k)
      if (da_.unit[n][k] != 0) unit[{k, Word{}}] = da_.unit[n][k];
    if (lhs != unit)
      throw Error(errc::not_mc, "sigma^0 identity at level " + std::to_string(n));
    if (n >= 1) {
      for (int i = 1; i <= n; ++i) {
        LevelMap l = apply_gside_letters(g_.generators.face[n][i], w.level[n]);
        LevelMap r = apply_aside(da_.da.mod.coface[n][i + 1], w.level[n - 1]);
        if (l != r)
          throw Error(errc::not_mc, "face identity (i=" + std::to_string(i) +
                                        ") at level " + std::to_string(n));
      }
      LevelMap l0 = apply_gside_letters(g_.generators.face[n][0], w.level[n]);
      LevelMap a1 = apply_aside(da_.da.mod.coface[n][1], w.level[n - 1]);
      LevelMap a0 = apply_aside(da_.da.mod.coface[n][0], w.level[n - 1]);
      LevelMap a0log = level_log(n + 1, n - 1, a0);
      for (auto& [key, c] : a0log) c = -c;
      LevelMap rhs = level_mul(n + 1, n - 1, a1, level_exp(n + 1, n - 1, a0log));
      if (l0 != rhs)
        throw Error(errc::not_mc, "0th face identity at level " + std::to_string(n));
    }
    if (n + 1 < K) {
      for (int i = 0; i <= n; ++i) {
        LevelMap l = apply_gside_letters(g_.generators.degen[n][i], w.level[n]);
        LevelMap r = apply_aside(da_.da.mod.codegen[n + 1][i + 1], w.level[n + 1]);
        if (l != r)
          throw Error(errc::not_mc, "degeneracy identity at level " +
                                        std::to_string(n));
      }
    }
  }
}

void DKTransport::verify_gauge(const SimplicialGauge& u) const {
  const int K = static_cast<int>(u.log_level.size());
  for (int n = 1; n < K; ++n)
    for (int i = 1; i <= n; ++i) {
      LevelMap l = apply_gside_letters(g_.generators.face[n][i], u.log_level[n]);
      LevelMap r = apply_aside(da_.da.mod.coface[n - 1][i], u.log_level[n - 1]);
      if (l != r)
        throw Error(errc::not_mc, "gauge face identity at level " +
                                      std::to_string(n));
    }
  for (int n = 0; n + 1 < K; ++n)
    for (int i = 0; i <= n; ++i) {
      LevelMap l = apply_gside_letters(g_.generators.degen[n][i], u.log_level[n]);
      LevelMap r = apply_aside(da_.da.mod.codegen[n][i], u.log_level[n + 1]);
      if (l != r)
        throw Error(errc::not_mc, "gauge degeneracy identity at level " +
                                      std::to_string(n));
    }
}

bool chain_mc_holds(const DGAlgebra& a_, const ChainLie& ng_, const ChainMC& w) {
  std::map<std::tuple<size_t, int, size_t>, Rat> res;
  auto add = [&](const std::tuple<size_t, int, size_t>& key, const Rat& c) {
    if (c == 0) return;
    Rat& v = res[key];
    v += c;
    if (v == 0) res.erase(key);
  };
  for (const auto& [key, c] : w.terms) {
    auto [ai, n, xi] = key;
    const Vec& da = a_.d_basis(ai);
    for (size_t b = 0; b < da.size(); ++b)
      if (da[b] != 0) add({b, n, xi}, da[b] * c);
    if (n >= 1) {
      int sign = a_.degree(ai) % 2 ? -1 : 1;
      const Matrix& d = ng_.diff[n];
      for (size_t r = 0; r < d.rows(); ++r)
        if (d(r, xi) != 0) add({ai, n - 1, r}, sign * d(r, xi) * c);
    }
  }
  Rat half = rat(1, 2);
  for (const auto& [k1, c1] : w.terms)
    for (const auto& [k2, c2] : w.terms) {
      auto [a1, p, x1] = k1;
      auto [a2, q, x2] = k2;
      if (p + q >= static_cast<int>(ng_.dims.size())) continue;
      auto it = ng_.bracket.find({p, q});
      if (it == ng_.bracket.end()) continue;
      int sign = (p * a_.degree(a2)) % 2 ? -1 : 1;
      const Vec& prod = a_.product(a1, a2);
      const Vec& br = it->second[x1 * ng_.dim(q) + x2];
      for (size_t ci = 0; ci < prod.size(); ++ci) {
        if (prod[ci] == 0) continue;
        for (size_t r = 0; r < br.size(); ++r)
          if (br[r] != 0)
            add({ci, p + q, r}, half * sign * prod[ci] * br[r] * c1 * c2);
      }
    }
  return res.empty();
}

namespace {

// positions of normalized symbols and the matching global algebra indices
std::vector<std::pair<size_t, size_t>> normalized_algebra_map(
    const DGAlgebra& a, const Denormalized& da, int level) {
  std::vector<std::pair<size_t, size_t>> out;  // (symbol pos, algebra index)
  auto idxs = a.indices_of_degree(level);
  for (size_t pos : da.normalized[level]) {
    const DKSymbol& s = da.symbols[level][pos];
    out.emplace_back(pos, idxs[s.base_index]);
  }
  return out;
}

}  // namespace

ChainMC DKTransport::mc_normalize(const SimplicialMC& w) const {
  verify_mc(w);
  ChainMC out;
  for (int n = 0; n < static_cast<int>(w.level.size()); ++n) {
    if (n >= static_cast<int>(ng_.dims.size())) break;
    LevelMap x = level_log(n + 1, n, w.level[n]);
    // group by algebra symbol and straighten the word part
    std::map<size_t, TensorPoly> columns;
    for (const auto& [key, c] : x) columns[key.first][key.second] = c;
    auto norm_map = normalized_algebra_map(a_, da_.da, n + 1);
    std::map<size_t, size_t> norm_pos;  // symbol pos -> algebra index
    for (auto [pos, ai] : norm_map) norm_pos[pos] = ai;
    for (const auto& [sym, poly] : columns) {
      Vec coords = lie_coords(n, poly);
      Vec ncoords = n_proj_[n].apply(coords);
      bool nonzero = false;
      for (const auto& c : ncoords)
        if (c != 0) nonzero = true;
      if (!nonzero) continue;
      auto it = norm_pos.find(sym);
      if (it == norm_pos.end())
        throw Error(errc::sign_convention_failure,
                    "normalized projection has a degenerate cochain component");
      for (size_t r = 0; r < ncoords.size(); ++r)
        if (ncoords[r] != 0) out.terms[{it->second, n, r}] = ncoords[r];
    }
  }
  if (!chain_mc_holds(out))
    throw Error(errc::not_mc, "transported element fails the equation");
  return out;
}

ChainGauge DKTransport::gauge_normalize(const SimplicialGauge& u) const {
  verify_gauge(u);
  ChainGauge out;
  for (int n = 0; n < static_cast<int>(u.log_level.size()); ++n) {
    if (n >= static_cast<int>(ng_.dims.size())) break;
    std::map<size_t, TensorPoly> columns;
    for (const auto& [key, c] : u.log_level[n]) columns[key.first][key.second] = c;
    auto norm_map = normalized_algebra_map(a_, da_.da, n);
    std::map<size_t, size_t> norm_pos;
    for (auto [pos, ai] : norm_map) norm_pos[pos] = ai;
    for (const auto& [sym, poly] : columns) {
      Vec coords = lie_coords(n, poly);
      Vec ncoords = n_proj_[n].apply(coords);
      bool nonzero = false;
      for (const auto& c : ncoords)
        if (c != 0) nonzero = true;
      if (!nonzero) continue;
      auto it = norm_pos.find(sym);
      if (it == norm_pos.end())
        throw Error(errc::sign_convention_failure,
                    "gauge projection has a degenerate cochain component");
      for (size_t r = 0; r < ncoords.size(); ++r)
        if (ncoords[r] != 0) out.log_terms[{it->second, n, r}] = ncoords[r];
    }
  }
  return out;
}

SimplicialMC DKTransport::gauge_apply(const SimplicialGauge& u,
                                      const SimplicialMC& w) const {
  SimplicialMC out;
  const int K = static_cast<int>(w.level.size());
  for (int n = 0; n + 1 < static_cast<int>(u.log_level.size()) && n < K; ++n) {
    // (del_0 u_{n+1}) * omega_n * (del^0 u_n)^{-1}
    LevelMap front_log =
        apply_gside_letters(g_.generators.face[n + 1][0], u.log_level[n + 1]);
    LevelMap front = level_exp(n + 1, n, front_log);
    LevelMap back_log = apply_aside(da_.da.mod.coface[n][0], u.log_level[n]);
    for (auto& [key, c] : back_log) c = -c;
    LevelMap back = level_exp(n + 1, n, back_log);
    LevelMap prod = level_mul(n + 1, n, level_mul(n + 1, n, front, w.level[n]), back);
    out.level.push_back(std::move(prod));
  }
  return out;
}

ChainMC chain_gauge_apply(const DGAlgebra& a_, const ChainLie& ng_,
                          const ChainGauge& u, const ChainMC& w,
                          int nilpotency) {
  using Key = std::tuple<size_t, int, size_t>;
  using Terms = std::map<Key, Rat>;
  auto add = [](Terms& acc, const Key& k, const Rat& c) {
    if (c == 0) return;
    Rat& v = acc[k];
    v += c;
    if (v == 0) acc.erase(k);
  };
  auto ad_u = [&](const Terms& z) {
    Terms out;
    for (const auto& [ku, cu] : u.log_terms)
      for (const auto& [kz, cz] : z) {
        auto [a1, p, x1] = ku;
        auto [a2, q, x2] = kz;
        if (p + q >= static_cast<int>(ng_.dims.size())) continue;
        auto it = ng_.bracket.find({p, q});
        if (it == ng_.bracket.end()) continue;
        int sign = (p * a_.degree(a2)) % 2 ? -1 : 1;
        const Vec& prod = a_.product(a1, a2);
        const Vec& br = it->second[x1 * ng_.dim(q) + x2];
        for (size_t ci = 0; ci < prod.size(); ++ci) {
          if (prod[ci] == 0) continue;
          for (size_t r = 0; r < br.size(); ++r)
            if (br[r] != 0)
              add(out, {ci, p + q, r}, sign * prod[ci] * br[r] * cu * cz);
        }
      }
    return out;
  };
  // du: total differential of the gauge logarithm
  Terms du;
  for (const auto& [key, c] : u.log_terms) {
    auto [ai, n, xi] = key;
    const Vec& da = a_.d_basis(ai);
    for (size_t b = 0; b < da.size(); ++b)
      if (da[b] != 0) add(du, {b, n, xi}, da[b] * c);
    if (n >= 1) {
      int sign = a_.degree(ai) % 2 ? -1 : 1;
      const Matrix& d = ng_.diff[n];
      for (size_t r = 0; r < d.rows(); ++r)
        if (d(r, xi) != 0) add(du, {ai, n - 1, r}, sign * d(r, xi) * c);
    }
  }
  // exp(ad_u)(w) - sum_k ad_u^k (du) / (k+1)!
  Terms result = w.terms;
  Terms pw = w.terms;
  Rat factorial = 1;
  for (int k = 1; !pw.empty() && k <= nilpotency + 1; ++k) {
    pw = ad_u(pw);
    factorial *= k;
    for (const auto& [key, c] : pw) add(result, key, c / factorial);
  }
  Terms pd = du;
  factorial = 1;  // (k+1)! with k = 0 gives 1! = 1
  for (int k = 0; !pd.empty() && k <= nilpotency + 1; ++k) {
    factorial *= (k + 1);
    for (const auto& [key, c] : pd) add(result, key, -c / factorial);
    pd = ad_u(pd);
  }
  ChainMC out;
  out.terms = std::move(result);
  return out;
}

bool DKTransport::chain_mc_holds(const ChainMC& w) const {
  return malcev::chain_mc_holds(a_, ng_, w);
}

ChainMC DKTransport::chain_gauge_apply(const ChainGauge& u,
                                       const ChainMC& w) const {
  return malcev::chain_gauge_apply(a_, ng_, u, w, g_.max_weight);
}

namespace {

// coordinate layout of one lift level: unknowns (symbol, lie index)
struct LiftLayout {
  size_t symbols = 0;
  size_t lie = 0;
  size_t cols() const { return symbols * lie; }
  size_t col(size_t s, size_t l) const { return s * lie + l; }
};

}  // namespace

SimplicialMC DKTransport::mc_lift(const ChainMC& w) const {
  SimplicialMC out;
  std::vector<std::map<std::pair<size_t, size_t>, Rat>> xs;  // coords per level
  for (int n = 0; n < n_max_; ++n) {
    LiftLayout lay{da_.da.mod.dims[n + 1], g_.dims[n]};
    const size_t s_n = da_.da.mod.dims[n];
    auto norm_map = normalized_algebra_map(a_, da_.da, n + 1);
    const size_t nproj_rows = n_proj_[n].rows();

    // fixed row layout
    size_t rows = s_n * lay.lie;  // C1
    if (n >= 1) {
      rows += static_cast<size_t>(n) * lay.symbols * g_.dims[n - 1];  // C2
      rows += lay.symbols * g_.dims[n - 1];                           // C3
      rows += static_cast<size_t>(n) * s_n * lay.lie;                 // C4
    }
    rows += norm_map.size() * nproj_rows;  // C5

    auto solver_it = mc_sys_.find(n);
    if (solver_it == mc_sys_.end()) {
      Matrix m(rows, lay.cols());
      size_t r0 = 0;
      const Matrix& sig0 = da_.da.mod.codegen[n][0];
      for (size_t t = 0; t < s_n; ++t)
        for (size_t l = 0; l < lay.lie; ++l) {
          for (size_t s = 0; s < lay.symbols; ++s)
            if (sig0(t, s) != 0) m(r0, lay.col(s, l)) = sig0(t, s);
          ++r0;
        }
      if (n >= 1) {
        for (int i = 1; i <= n; ++i) {
          const Matrix& f = g_.face[n][i];
          for (size_t s = 0; s < lay.symbols; ++s)
            for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
              for (size_t l = 0; l < lay.lie; ++l)
                if (f(mm, l) != 0) m(r0, lay.col(s, l)) = f(mm, l);
              ++r0;
            }
        }
        const Matrix& f0 = g_.face[n][0];
        for (size_t s = 0; s < lay.symbols; ++s)
          for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
            for (size_t l = 0; l < lay.lie; ++l)
              if (f0(mm, l) != 0) m(r0, lay.col(s, l)) = f0(mm, l);
            ++r0;
          }
        for (int i = 0; i < n; ++i) {
          const Matrix& sig = da_.da.mod.codegen[n][i + 1];
          for (size_t t = 0; t < s_n; ++t)
            for (size_t l = 0; l < lay.lie; ++l) {
              for (size_t s = 0; s < lay.symbols; ++s)
                if (sig(t, s) != 0) m(r0, lay.col(s, l)) = sig(t, s);
              ++r0;
            }
        }
      }
      for (auto [pos, ai] : norm_map)
        for (size_t t = 0; t < nproj_rows; ++t) {
          for (size_t l = 0; l < lay.lie; ++l)
            if (n_proj_[n](t, l) != 0) m(r0, lay.col(pos, l)) = n_proj_[n](t, l);
          ++r0;
        }
      solver_it =
          mc_sys_.emplace(n, std::make_shared<LinearSolver>(std::move(m))).first;
    }

    // right-hand side for this element
    Vec b(rows);
    size_t r0 = s_n * lay.lie;  // C1 rows are zero
    if (n >= 1) {
      const auto& xprev = xs[n - 1];
      for (int i = 1; i <= n; ++i) {
        const Matrix& cf = da_.da.mod.coface[n][i + 1];
        for (size_t s = 0; s < lay.symbols; ++s)
          for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
            Rat v = 0;
            for (const auto& [key, c] : xprev)
              if (key.second == mm && cf(s, key.first) != 0)
                v += cf(s, key.first) * c;
            b[r0++] = v;
          }
      }
      // C3: primitive of log(exp(del^1 x) exp(-del^0 x))
      LevelMap xm;
      for (const auto& [key, c] : xprev)
        for (const auto& [word, cw] : g_.ctx[n - 1]->rho(
                 g_.ctx[n - 1]->basis()[key.second])) {
          Rat& acc = xm[{key.first, word}];
          acc += c * cw;
          if (acc == 0) xm.erase({key.first, word});
        }
      LevelMap a1 = apply_aside(da_.da.mod.coface[n][1], xm);
      LevelMap a0 = apply_aside(da_.da.mod.coface[n][0], xm);
      for (auto& [key, c] : a0) c = -c;
      LevelMap prod = level_mul(n + 1, n - 1, level_exp(n + 1, n - 1, a1),
                                level_exp(n + 1, n - 1, a0));
      LevelMap rhs_log = level_log(n + 1, n - 1, prod);
      std::map<size_t, TensorPoly> cols;
      for (const auto& [key, c] : rhs_log) cols[key.first][key.second] = c;
      std::map<std::pair<size_t, size_t>, Rat> rhs_coords;
      for (const auto& [sym, poly] : cols) {
        Vec coords = lie_coords(n - 1, poly);
        for (size_t mm = 0; mm < coords.size(); ++mm)
          if (coords[mm] != 0) rhs_coords[{sym, mm}] = coords[mm];
      }
      for (size_t s = 0; s < lay.symbols; ++s)
        for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
          auto it = rhs_coords.find({s, mm});
          b[r0++] = it == rhs_coords.end() ? Rat(0) : it->second;
        }
      // C4
      for (int i = 0; i < n; ++i) {
        const Matrix& dg = g_.degen[n - 1][i];
        for (size_t t = 0; t < s_n; ++t)
          for (size_t l = 0; l < lay.lie; ++l) {
            Rat v = 0;
            for (const auto& [key, c] : xprev)
              if (key.first == t && dg(l, key.second) != 0)
                v += dg(l, key.second) * c;
            b[r0++] = v;
          }
      }
    }
    for (auto [pos, ai] : norm_map)
      for (size_t t = 0; t < nproj_rows; ++t) {
        auto it = w.terms.find({ai, n, t});
        b[r0++] = it == w.terms.end() ? Rat(0) : it->second;
      }

    auto sol = solver_it->second->solve(b);
    if (!sol)
      throw Error(errc::not_mc, "lift system unsolvable at level " +
                                    std::to_string(n));
    std::map<std::pair<size_t, size_t>, Rat> coords;
    LevelMap xm;
    for (size_t s = 0; s < lay.symbols; ++s)
      for (size_t l = 0; l < lay.lie; ++l) {
        const Rat& c = (*sol)[lay.col(s, l)];
        if (c == 0) continue;
        coords[{s, l}] = c;
        for (const auto& [word, cw] : g_.ctx[n]->rho(g_.ctx[n]->basis()[l])) {
          Rat& acc = xm[{s, word}];
          acc += c * cw;
          if (acc == 0) xm.erase({s, word});
        }
      }
    xs.push_back(std::move(coords));
    out.level.push_back(level_exp(n + 1, n, xm));
  }
  verify_mc(out);
  return out;
}

SimplicialGauge DKTransport::gauge_lift(const ChainGauge& u) const {
  SimplicialGauge out;
  std::vector<std::map<std::pair<size_t, size_t>, Rat>> xs;
  for (int n = 0; n <= n_max_; ++n) {
    LiftLayout lay{da_.da.mod.dims[n], g_.dims[n]};
    auto norm_map = normalized_algebra_map(a_, da_.da, n);
    const size_t nproj_rows = n_proj_[n].rows();
    size_t rows = 0;
    if (n >= 1) {
      rows += static_cast<size_t>(n) * lay.symbols * g_.dims[n - 1];  // faces
      rows += static_cast<size_t>(n) * da_.da.mod.dims[n - 1] * lay.lie;
    }
    rows += norm_map.size() * nproj_rows;

    auto solver_it = gauge_sys_.find(n);
    if (solver_it == gauge_sys_.end()) {
      Matrix m(rows, lay.cols());
      size_t r0 = 0;
      if (n >= 1) {
        for (int i = 1; i <= n; ++i) {
          const Matrix& f = g_.face[n][i];
          for (size_t s = 0; s < lay.symbols; ++s)
            for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
              for (size_t l = 0; l < lay.lie; ++l)
                if (f(mm, l) != 0) m(r0, lay.col(s, l)) = f(mm, l);
              ++r0;
            }
        }
        for (int i = 0; i < n; ++i) {
          const Matrix& sig = da_.da.mod.codegen[n - 1][i];
          for (size_t t = 0; t < da_.da.mod.dims[n - 1]; ++t)
            for (size_t l = 0; l < lay.lie; ++l) {
              for (size_t s = 0; s < lay.symbols; ++s)
                if (sig(t, s) != 0) m(r0, lay.col(s, l)) = sig(t, s);
              ++r0;
            }
        }
      }
      for (auto [pos, ai] : norm_map)
        for (size_t t = 0; t < nproj_rows; ++t) {
          for (size_t l = 0; l < lay.lie; ++l)
            if (n_proj_[n](t, l) != 0) m(r0, lay.col(pos, l)) = n_proj_[n](t, l);
          ++r0;
        }
      solver_it =
          gauge_sys_.emplace(n, std::make_shared<LinearSolver>(std::move(m)))
              .first;
    }

    Vec b(rows);
    size_t r0 = 0;
    if (n >= 1) {
      const auto& xprev = xs[n - 1];
      for (int i = 1; i <= n; ++i) {
        const Matrix& cf = da_.da.mod.coface[n - 1][i];
        for (size_t s = 0; s < lay.symbols; ++s)
          for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
            Rat v = 0;
            for (const auto& [key, c] : xprev)
              if (key.second == mm && cf(s, key.first) != 0)
                v += cf(s, key.first) * c;
            b[r0++] = v;
          }
      }
      for (int i = 0; i < n; ++i) {
        const Matrix& dg = g_.degen[n - 1][i];
        for (size_t t = 0; t < da_.da.mod.dims[n - 1]; ++t)
          for (size_t l = 0; l < lay.lie; ++l) {
            Rat v = 0;
            for (const auto& [key, c] : xprev)
              if (key.first == t && dg(l, key.second) != 0)
                v += dg(l, key.second) * c;
            b[r0++] = v;
          }
      }
    }
    for (auto [pos, ai] : norm_map)
      for (size_t t = 0; t < nproj_rows; ++t) {
        auto it = u.log_terms.find({ai, n, t});
        b[r0++] = it == u.log_terms.end() ? Rat(0) : it->second;
      }

    auto sol = solver_it->second->solve(b);
    if (!sol)
      throw Error(errc::not_mc, "gauge lift unsolvable at level " +
                                    std::to_string(n));
    std::map<std::pair<size_t, size_t>, Rat> coords;
    LevelMap xm;
    for (size_t s = 0; s < lay.symbols; ++s)
      for (size_t l = 0; l < lay.lie; ++l) {
        const Rat& c = (*sol)[lay.col(s, l)];
        if (c == 0) continue;
        coords[{s, l}] = c;
        for (const auto& [word, cw] : g_.ctx[n]->rho(g_.ctx[n]->basis()[l])) {
          Rat& acc = xm[{s, word}];
          acc += c * cw;
          if (acc == 0) xm.erase({s, word});
        }
      }
    xs.push_back(std::move(coords));
    out.log_level.push_back(std::move(xm));
  }
  verify_gauge(out);
  return out;
}

std::pair<size_t, size_t> DKTransport::abelian_mc_dimensions() const {
  if (g_.max_weight != 1)
    throw Error(errc::degree_mismatch, "dimension check requires abelian g");
  // chain side: kernel of the linear Maurer-Cartan operator
  std::vector<std::tuple<size_t, int, size_t>> vars;
  for (size_t ai = 0; ai < a_.dim(); ++ai) {
    int n = a_.degree(ai) - 1;
    if (n < 0 || n >= static_cast<int>(ng_.dims.size())) continue;
    for (size_t t = 0; t < ng_.dims[n]; ++t) vars.emplace_back(ai, n, t);
  }
  std::map<std::tuple<size_t, int, size_t>, size_t> var_pos;
  for (size_t k = 0; k < vars.size(); ++k) var_pos[vars[k]] = k;
  std::map<std::tuple<size_t, int, size_t>, size_t> row_pos;
  std::vector<std::map<size_t, Rat>> cols(vars.size());
  for (size_t k = 0; k < vars.size(); ++k) {
    auto [ai, n, t] = vars[k];
    const Vec& da = a_.d_basis(ai);
    for (size_t b = 0; b < da.size(); ++b)
      if (da[b] != 0) {
        auto key = std::make_tuple(b, n, t);
        auto [it, fresh] = row_pos.emplace(key, row_pos.size());
        cols[k][it->second] += da[b];
      }
    if (n >= 1) {
      int sign = a_.degree(ai) % 2 ? -1 : 1;
      const Matrix& d = ng_.diff[n];
      for (size_t r = 0; r < d.rows(); ++r)
        if (d(r, t) != 0) {
          auto key = std::make_tuple(ai, n - 1, r);
          auto [it, fresh] = row_pos.emplace(key, row_pos.size());
          cols[k][it->second] += sign * d(r, t);
        }
    }
  }
  Matrix chain_m(row_pos.size(), vars.size());
  for (size_t k = 0; k < vars.size(); ++k)
    for (const auto& [r, c] : cols[k]) chain_m(r, k) = c;
  size_t chain_dim = rank_kernel_image(chain_m).kernel.cols();

  // simplicial side: joint linear system over all levels
  std::vector<size_t> offset(n_max_ + 1, 0);
  size_t total = 0;
  for (int n = 0; n < n_max_; ++n) {
    offset[n] = total;
    total += da_.da.mod.dims[n + 1] * g_.dims[n];
  }
  auto col_of = [&](int n, size_t s, size_t l) {
    return offset[n] + s * g_.dims[n] + l;
  };
  std::vector<std::map<size_t, Rat>> rows;
  auto new_row = [&]() -> std::map<size_t, Rat>& {
    rows.emplace_back();
    return rows.back();
  };
  for (int n = 0; n < n_max_; ++n) {
    const size_t s_n = da_.da.mod.dims[n];
    const size_t s_n1 = da_.da.mod.dims[n + 1];
    const Matrix& sig0 = da_.da.mod.codegen[n][0];
    for (size_t t = 0; t < s_n; ++t)
      for (size_t l = 0; l < g_.dims[n]; ++l) {
        auto& row = new_row();
        for (size_t s = 0; s < s_n1; ++s)
          if (sig0(t, s) != 0) row[col_of(n, s, l)] = sig0(t, s);
        if (row.empty()) rows.pop_back();
      }
    if (n >= 1) {
      for (int i = 1; i <= n; ++i) {
        const Matrix& f = g_.face[n][i];
        const Matrix& cf = da_.da.mod.coface[n][i + 1];
        for (size_t s = 0; s < s_n1; ++s)
          for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
            auto& row = new_row();
            for (size_t l = 0; l < g_.dims[n]; ++l)
              if (f(mm, l) != 0) row[col_of(n, s, l)] = f(mm, l);
            for (size_t s2 = 0; s2 < da_.da.mod.dims[n]; ++s2)
              if (cf(s, s2) != 0) row[col_of(n - 1, s2, mm)] -= cf(s, s2);
            if (row.empty()) rows.pop_back();
          }
      }
      // 0th face: linear in the abelian case
      {
        const Matrix& f0 = g_.face[n][0];
        const Matrix& c1 = da_.da.mod.coface[n][1];
        const Matrix& c0 = da_.da.mod.coface[n][0];
        for (size_t s = 0; s < s_n1; ++s)
          for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm) {
            auto& row = new_row();
            for (size_t l = 0; l < g_.dims[n]; ++l)
              if (f0(mm, l) != 0) row[col_of(n, s, l)] = f0(mm, l);
            for (size_t s2 = 0; s2 < da_.da.mod.dims[n]; ++s2) {
              if (c1(s, s2) != 0) row[col_of(n - 1, s2, mm)] -= c1(s, s2);
              if (c0(s, s2) != 0) row[col_of(n - 1, s2, mm)] += c0(s, s2);
            }
            if (row.empty()) rows.pop_back();
          }
      }
      for (int i = 0; i < n; ++i) {
        const Matrix& sig = da_.da.mod.codegen[n][i + 1];
        const Matrix& dg = g_.degen[n - 1][i];
        for (size_t t = 0; t < s_n; ++t)
          for (size_t l = 0; l < g_.dims[n]; ++l) {
            auto& row = new_row();
            for (size_t s = 0; s < s_n1; ++s)
              if (sig(t, s) != 0) row[col_of(n, s, l)] = sig(t, s);
            for (size_t mm = 0; mm < g_.dims[n - 1]; ++mm)
              if (dg(l, mm) != 0) row[col_of(n - 1, t, mm)] -= dg(l, mm);
            if (row.empty()) rows.pop_back();
          }
      }
    }
  }
  Matrix simp_m(rows.size(), total);
  for (size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r]) simp_m(r, c) = v;
  size_t simp_dim = rank_kernel_image(simp_m).kernel.cols();
  return {simp_dim, chain_dim};
}

}  // namespace malcev
