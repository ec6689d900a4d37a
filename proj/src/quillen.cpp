#include "malcev/quillen.hpp"

#include <algorithm>

#include "malcev/chain_complex.hpp"
#include "malcev/errors.hpp"

namespace malcev {

namespace {

// internal contexts keep one extra bracket weight for differential targets
std::shared_ptr<FreeLieContext> padded_context(GradedGenerators gens,
                                               const Truncation& t) {
  Truncation padded = t;
  padded.max_weight = t.max_weight + 1;
  return std::make_shared<FreeLieContext>(std::move(gens), padded);
}

LieElement generator_element(const FreeLieContext& ctx, size_t i) {
  LieWord w{{static_cast<int>(i)}, false, ctx.generators().degree(i), 1};
  return LieElement{{w, rat(1)}};
}

bool is_quadratic(const std::vector<LieElement>& images) {
  for (const auto& img : images)
    for (const auto& [b, c] : img)
      if (b.weight != 2) return false;
  return true;
}

struct WordIndex {
  std::map<LieWord, size_t> pos;
  std::vector<LieWord> words;

  void add(const LieWord& w) {
    if (pos.emplace(w, words.size()).second) words.push_back(w);
  }
  Vec coords(const LieElement& x) const {
    Vec v(words.size());
    for (const auto& [b, c] : x) {
      auto it = pos.find(b);
      if (it != pos.end()) v[it->second] = c;
      // terms outside the index belong to truncated blocks
    }
    return v;
  }
};

}  // namespace

std::vector<LieWord> FreeDGLie::window_basis() const {
  std::vector<LieWord> out;
  for (const auto& b : ctx->basis())
    if (b.weight <= window.max_weight && b.degree <= window.max_degree)
      out.push_back(b);
  return out;
}

FreeDGLie build_model(const GradedRing& a, const Truncation& t) {
  CoLieData co = dualize_reduced(a);
  std::vector<Generator> gens;
  for (const auto& g : co.generators) gens.push_back({g.label, g.degree});
  auto ctx = padded_context(GradedGenerators(std::move(gens)), t);

  // map CoLieData positions onto the sorted context order
  std::vector<size_t> ctx_index(co.generators.size());
  for (size_t i = 0; i < co.generators.size(); ++i) {
    for (size_t j = 0; j < ctx->generators().size(); ++j)
      if (ctx->generators().label(j) == co.generators[i].label) {
        ctx_index[i] = j;
        break;
      }
  }

  std::vector<LieElement> images(ctx->generators().size());
  Rat half = rat(1, 2);
  for (size_t gc = 0; gc < co.generators.size(); ++gc) {
    LieElement img;
    for (auto [ga, gb, coeff] : co.coproduct[gc]) {
      LieElement br = ctx->bracket(generator_element(*ctx, ctx_index[ga]),
                                   generator_element(*ctx, ctx_index[gb]));
      for (const auto& [b, c] : br) {
        img[b] += half * coeff * c;
        if (img[b] == 0) img.erase(b);
      }
    }
    images[ctx_index[gc]] = std::move(img);
  }
  FreeDGLie m;
  m.ctx = ctx;
  m.differential = extend_derivation(ctx, std::move(images), -1);
  m.window = t;
  m.weight_split = is_quadratic(m.differential.images());
  if (!m.verify_square_zero())
    throw Error(errc::sign_convention_failure,
                "differential does not square to zero");
  return m;
}

FreeDGLie build_model_reduced(const DGAlgebra& a, const Truncation& t) {
  if (!a.connected())
    throw Error(errc::not_connected, "H^0 != Q");

  // generators: duals of basis elements of degree >= 1 (degree-0 duals are
  // removed by the non-negative truncation)
  std::vector<size_t> red;  // algebra indices
  for (size_t i = 0; i < a.dim(); ++i)
    if (a.degree(i) >= 1) red.push_back(i);
  std::vector<Generator> gens;
  for (size_t i : red) gens.push_back({a.label(i), a.degree(i) - 1});
  auto ctx = padded_context(GradedGenerators(std::move(gens)), t);
  std::vector<size_t> ctx_index(red.size());
  std::map<size_t, size_t> red_pos;  // algebra index -> red position
  for (size_t i = 0; i < red.size(); ++i) {
    red_pos[red[i]] = i;
    for (size_t j = 0; j < ctx->generators().size(); ++j)
      if (ctx->generators().label(j) == a.label(red[i])) ctx_index[i] = j;
  }

  std::vector<LieElement> images(ctx->generators().size());
  Rat half = rat(1, 2);
  for (size_t p = 0; p < red.size(); ++p) {
    size_t c = red[p];
    LieElement img;
    // linear part: transpose of d_A
    for (size_t q = 0; q < red.size(); ++q) {
      size_t b = red[q];
      const Rat& coeff = a.d_basis(b)[c];
      if (coeff != 0) {
        LieWord gw{{static_cast<int>(ctx_index[q])}, false,
                   a.degree(b) - 1, 1};
        img[gw] += coeff;
        if (img[gw] == 0) img.erase(gw);
      }
    }
    // quadratic part: transpose of the product with Koszul signs
    for (size_t pu = 0; pu < red.size(); ++pu)
      for (size_t pv = 0; pv < red.size(); ++pv) {
        const Rat& lambda = a.product(red[pu], red[pv])[c];
        if (lambda == 0) continue;
        int sign = a.degree(red[pu]) % 2 ? -1 : 1;
        LieElement br =
            ctx->bracket(generator_element(*ctx, ctx_index[pu]),
                         generator_element(*ctx, ctx_index[pv]));
        for (const auto& [b, cc] : br) {
          img[b] += half * sign * lambda * cc;
          if (img[b] == 0) img.erase(b);
        }
      }
    images[ctx_index[p]] = std::move(img);
  }

  // quotient by the duals of d(A^0) inside the degree-0 generator space
  auto killed = a.d_of_degree0();  // vectors over the degree-1 basis of A
  auto deg1 = a.indices_of_degree(1);
  if (!killed.empty()) {
    // complete d(A^0) to a basis of A^1; keep the complement's duals
    const size_t n1 = deg1.size();
    std::vector<Vec> cols = killed;
    RowReducer span(n1);
    for (const auto& v : killed) span.add(v);
    std::vector<size_t> kept_units;  // positions in deg1 whose duals survive
    for (size_t j = 0; j < n1; ++j) {
      Vec e(n1);
      e[j] = 1;
      if (span.add(e)) {
        cols.push_back(e);
        kept_units.push_back(j);
      }
    }
    Matrix basis_change = Matrix::from_columns(n1, cols);  // invertible

    // old degree-0 generator g_{deg1[j]} expands as
    //   sum_k B[j][k] * (dual functional k);
    // duals of the first `killed.size()` columns are set to zero.
    std::vector<Generator> new_gens;
    for (size_t j : kept_units) new_gens.push_back({a.label(deg1[j]), 0});
    for (size_t i : red)
      if (a.degree(i) >= 2) new_gens.push_back({a.label(i), a.degree(i) - 1});
    auto new_ctx = padded_context(GradedGenerators(std::move(new_gens)), t);
    auto new_index = [&](const std::string& label) {
      for (size_t j = 0; j < new_ctx->generators().size(); ++j)
        if (new_ctx->generators().label(j) == label) return j;
      throw Error(errc::unknown_basis_label, label);
    };

    // With dual functionals phi_m of the columns [killed | kept], any
    // functional expands as psi = sum_m psi(col_m) phi_m; the quotient kills
    // the phi_m over the killed columns. For psi = e_j~ the coefficient on
    // the kept functional k is basis_change(j, r + k).
    std::vector<LieElement> subst(ctx->generators().size());
    for (size_t p = 0; p < red.size(); ++p) {
      size_t i = red[p];
      if (a.degree(i) >= 2) {
        subst[ctx_index[p]] = generator_element(*new_ctx, new_index(a.label(i)));
        continue;
      }
      size_t j = std::find(deg1.begin(), deg1.end(), i) - deg1.begin();
      LieElement elt;
      for (size_t k = 0; k < kept_units.size(); ++k) {
        const Rat& coeff = basis_change(j, killed.size() + k);
        if (coeff != 0) {
          size_t tgt = new_index(a.label(deg1[kept_units[k]]));
          LieWord gw{{static_cast<int>(tgt)}, false, 0, 1};
          elt[gw] = coeff;
        }
      }
      subst[ctx_index[p]] = std::move(elt);
    }

    std::vector<LieElement> new_images(new_ctx->generators().size());
    for (size_t j = 0; j < new_ctx->generators().size(); ++j) {
      const std::string& label = new_ctx->generators().label(j);
      // locate the old generator with this label
      size_t old_idx = ctx->generators().size();
      for (size_t k = 0; k < ctx->generators().size(); ++k)
        if (ctx->generators().label(k) == label) old_idx = k;
      new_images[j] =
          ctx->substitute(images[old_idx], subst, *new_ctx);
    }
    FreeDGLie m;
    m.ctx = new_ctx;
    m.differential = extend_derivation(new_ctx, std::move(new_images), -1);
    m.window = t;
    m.weight_split = is_quadratic(m.differential.images());
    if (!m.verify_square_zero())
      throw Error(errc::sign_convention_failure,
                  "differential does not square to zero after reduction");
    return m;
  }

  FreeDGLie m;
  m.ctx = ctx;
  m.differential = extend_derivation(ctx, std::move(images), -1);
  m.window = t;
  m.weight_split = is_quadratic(m.differential.images());
  if (!m.verify_square_zero())
    throw Error(errc::sign_convention_failure,
                "differential does not square to zero");
  return m;
}

namespace {

Matrix block_matrix(const FreeDGLie& m, const WordIndex& src,
                    const WordIndex& tgt) {
  Matrix mat(tgt.words.size(), src.words.size());
  for (size_t c = 0; c < src.words.size(); ++c) {
    LieElement img = m.differential.apply(LieElement{{src.words[c], rat(1)}});
    Vec v = tgt.coords(img);
    for (size_t r = 0; r < tgt.words.size(); ++r) mat(r, c) = v[r];
  }
  return mat;
}

WordIndex words_at(const FreeDGLie& m, int degree, int min_w, int max_w) {
  WordIndex idx;
  for (const auto& b : m.ctx->basis())
    if (b.degree == degree && b.weight >= min_w && b.weight <= max_w)
      idx.add(b);
  return idx;
}

// Exact stability certificate: an entry cannot change when the weight bound
// is raised iff the windowed basis already has the full free-Lie dimension in
// every chain degree the entry reads.
std::vector<bool> stability_certificate(const FreeDGLie& m, int maxdeg) {
  std::vector<bool> stable(maxdeg + 1, false);
  if (m.generators().size() == 0) {
    std::fill(stable.begin(), stable.end(), true);
    return stable;
  }
  if (m.generators().min_degree() < 1) return stable;  // degree-0 tower
  auto total = free_lie_degree_dims(m.generators(), maxdeg);
  std::map<int, size_t> windowed;
  for (const auto& b : m.ctx->basis())
    if (b.weight <= m.window.max_weight && b.degree <= maxdeg)
      ++windowed[b.degree];
  bool ok = true;
  for (int d = 0; d <= maxdeg; ++d) {
    size_t want = total.count(d) ? total[d] : 0;
    size_t have = windowed.count(d) ? windowed[d] : 0;
    ok = ok && want == have;
    stable[d] = ok && d <= m.window.max_degree;
  }
  return stable;
}

}  // namespace

HomotopyTable homotopy_groups(const FreeDGLie& m, const Truncation& t) {
  const int maxdeg = std::min(t.max_degree, m.window.max_degree);
  const int maxw = std::min(t.max_weight, m.window.max_weight);
  HomotopyTable table;
  std::vector<bool> stable = stability_certificate(m, maxdeg);

  if (m.weight_split) {
    // blocks (degree n, bracket weight w); D maps (n,w) -> (n-1,w+1)
    for (int n = 2; n <= maxdeg; ++n) {
      HomotopyEntry e;
      e.n = n;
      e.stable = stable[n];
      for (int w = 1; w <= maxw; ++w) {
        WordIndex chains = words_at(m, n - 1, w, w);
        if (chains.words.empty()) continue;
        WordIndex cycles_tgt = words_at(m, n - 2, w + 1, w + 1);
        WordIndex bd_src = words_at(m, n, w - 1, w - 1);
        Matrix d_out = block_matrix(m, chains, cycles_tgt);
        Matrix d_in = block_matrix(m, bd_src, chains);
        Matrix reps = homology_representatives(d_out, d_in);
        if (reps.cols() == 0) continue;
        int fweight = (n - 1) + w;
        e.weights[fweight] += reps.cols();
        e.dim += reps.cols();
        for (size_t c = 0; c < reps.cols(); ++c) {
          LieElement rep;
          for (size_t r = 0; r < chains.words.size(); ++r)
            if (reps(r, c) != 0) rep[chains.words[r]] = reps(r, c);
          table.reps[n].emplace_back(std::move(rep), fweight);
        }
      }
      table.entries.push_back(std::move(e));
    }
    // lower-central-series tower of the degree-0 part
    for (int w = 1; w <= maxw; ++w) {
      WordIndex chains = words_at(m, 0, w, w);
      if (chains.words.empty()) continue;
      WordIndex bd_src = words_at(m, 1, w - 1, w - 1);
      Matrix d_out(0, chains.words.size());  // nothing below degree 0
      Matrix d_in = block_matrix(m, bd_src, chains);
      size_t dim = homology_representatives(d_out, d_in).cols();
      table.lcs.emplace_back(w, dim);
    }
  } else {
    for (int n = 2; n <= maxdeg; ++n) {
      HomotopyEntry e;
      e.n = n;
      e.stable = stable[n];
      WordIndex chains = words_at(m, n - 1, 1, maxw);
      WordIndex cycles_tgt = words_at(m, n - 2, 1, maxw + 1);
      WordIndex bd_src = words_at(m, n, 1, maxw);
      Matrix d_out = block_matrix(m, chains, cycles_tgt);
      Matrix d_in = block_matrix(m, bd_src, chains);
      Matrix reps = homology_representatives(d_out, d_in);
      e.dim = reps.cols();
      for (size_t c = 0; c < reps.cols(); ++c) {
        LieElement rep;
        for (size_t r = 0; r < chains.words.size(); ++r)
          if (reps(r, c) != 0) rep[chains.words[r]] = reps(r, c);
        table.reps[n].emplace_back(std::move(rep), -1);
      }
      table.entries.push_back(std::move(e));
    }
    WordIndex chains = words_at(m, 0, 1, maxw);
    if (!chains.words.empty()) {
      WordIndex bd_src = words_at(m, 1, 1, maxw);
      Matrix d_out(0, chains.words.size());
      Matrix d_in = block_matrix(m, bd_src, chains);
      size_t dim = homology_representatives(d_out, d_in).cols();
      table.lcs.emplace_back(-1, dim);
    }
  }
  return table;
}

LieElement whitehead_bracket(const FreeDGLie& m, const LieElement& x,
                             const LieElement& y) {
  if (!m.differential.apply(x).empty())
    throw Error(errc::not_a_cycle, "left argument");
  if (!m.differential.apply(y).empty())
    throw Error(errc::not_a_cycle, "right argument");
  LieElement z = m.ctx->bracket(x, y);
  if (z.empty()) return z;
  int deg = z.begin()->first.degree;
  for (const auto& [b, c] : z)
    if (b.degree != deg)
      throw Error(errc::degree_mismatch, "inhomogeneous bracket");
  // reduce modulo boundaries from one degree up
  WordIndex coords = words_at(m, deg, 1, m.window.max_weight + 1);
  WordIndex bd_src = words_at(m, deg + 1, 1, m.window.max_weight);
  RowReducer span(coords.words.size());
  for (size_t c = 0; c < bd_src.words.size(); ++c) {
    LieElement img =
        m.differential.apply(LieElement{{bd_src.words[c], rat(1)}});
    span.add(coords.coords(img));
  }
  Vec reduced = span.reduce(coords.coords(z));
  LieElement out;
  for (size_t r = 0; r < coords.words.size(); ++r)
    if (reduced[r] != 0) out[coords.words[r]] = reduced[r];
  return out;
}

FreeDGLie minimal_model(const FreeDGLie& m, const Truncation& t) {
  FreeDGLie cur = m;
  for (int pass = 0; pass < 200; ++pass) {
    const auto& gens = cur.generators();
    const size_t ng = gens.size();
    // linear part of the differential
    std::vector<std::map<size_t, Rat>> lin(ng);
    int lowest = -1;
    for (size_t i = 0; i < ng; ++i)
      for (const auto& [b, c] : cur.differential.images()[i])
        if (b.weight == 1) {
          lin[i][b.word[0]] = c;
          int tdeg = gens.degree(i) - 1;
          if (lowest < 0 || tdeg < lowest) lowest = tdeg;
        }
    if (lowest < 0) break;  // minimal

    // sources of the lowest-degree linear block, in generator order
    std::vector<size_t> sources, targets;
    for (size_t i = 0; i < ng; ++i) {
      if (gens.degree(i) == lowest + 1) sources.push_back(i);
      if (gens.degree(i) == lowest) targets.push_back(i);
    }
    std::map<size_t, size_t> target_pos;
    for (size_t k = 0; k < targets.size(); ++k) target_pos[targets[k]] = k;

    // greedily select independent source columns
    RowReducer span(targets.size());
    std::vector<size_t> selected;
    for (size_t s : sources) {
      Vec col(targets.size());
      for (const auto& [g, c] : lin[s])
        if (target_pos.count(g)) col[target_pos[g]] = c;
      if (span.add(col)) selected.push_back(s);
    }
    if (selected.empty()) break;  // linear part at this degree was zero

    // relations: Lambda(b_k) + tail_k = 0. Solve for pivot target symbols.
    Matrix rel(selected.size(), targets.size());
    std::vector<LieElement> tails(selected.size());
    for (size_t k = 0; k < selected.size(); ++k) {
      for (const auto& [b, c] : cur.differential.images()[selected[k]]) {
        if (b.weight == 1)
          rel(k, target_pos[b.word[0]]) = c;
        else
          tails[k][b] = c;
      }
    }
    // row-reduce [rel | rhs-index]; pivot columns identify eliminated targets
    std::vector<size_t> pivot_of_row(selected.size(), targets.size());
    Matrix ops = Matrix::identity(selected.size());
    {
      size_t row = 0;
      for (size_t col = 0; col < targets.size() && row < selected.size();
           ++col) {
        size_t pr = selected.size();
        for (size_t r = row; r < selected.size(); ++r)
          if (rel(r, col) != 0) {
            pr = r;
            break;
          }
        if (pr == selected.size()) continue;
        if (pr != row) {
          for (size_t j = 0; j < targets.size(); ++j)
            std::swap(rel(pr, j), rel(row, j));
          for (size_t j = 0; j < selected.size(); ++j)
            std::swap(ops(pr, j), ops(row, j));
        }
        Rat inv = 1 / rel(row, col);
        for (size_t j = 0; j < targets.size(); ++j) rel(row, j) *= inv;
        for (size_t j = 0; j < selected.size(); ++j) ops(row, j) *= inv;
        for (size_t r = 0; r < selected.size(); ++r) {
          if (r == row) continue;
          Rat f = rel(r, col);
          if (f == 0) continue;
          for (size_t j = 0; j < targets.size(); ++j)
            rel(r, j) -= f * rel(row, j);
          for (size_t j = 0; j < selected.size(); ++j)
            ops(r, j) -= f * ops(row, j);
        }
        pivot_of_row[row] = col;
        ++row;
      }
    }

    // build the new generator list: drop selected sources and pivot targets
    std::vector<bool> dropped(ng, false);
    for (size_t s : selected) dropped[s] = true;
    std::vector<size_t> pivot_rows(targets.size(), selected.size());
    for (size_t r = 0; r < selected.size(); ++r)
      if (pivot_of_row[r] < targets.size()) {
        dropped[targets[pivot_of_row[r]]] = true;
        pivot_rows[pivot_of_row[r]] = r;
      }
    std::vector<Generator> new_gens;
    for (size_t i = 0; i < ng; ++i)
      if (!dropped[i]) new_gens.push_back({gens.label(i), gens.degree(i)});
    auto new_ctx = padded_context(GradedGenerators(std::move(new_gens)), t);
    auto new_index = [&](const std::string& label) -> size_t {
      for (size_t j = 0; j < new_ctx->generators().size(); ++j)
        if (new_ctx->generators().label(j) == label) return j;
      throw Error(errc::unknown_basis_label, label);
    };

    // substitution on old generators; pivot targets solved iteratively so
    // that higher-weight tails referencing eliminated letters unwind
    std::vector<LieElement> subst(ng);
    for (size_t i = 0; i < ng; ++i) {
      if (dropped[i]) continue;
      subst[i] = generator_element(*new_ctx, new_index(gens.label(i)));
    }
    // linear pieces of the solved relations, over old generator indices
    // pivot target p (row r): e_p = -sum_{free targets} rel(r,j) e_j - ops(r)*tails
    for (int iter = 0; iter <= cur.window.max_weight; ++iter) {
      for (size_t col = 0; col < targets.size(); ++col) {
        size_t r = pivot_rows[col];
        if (r == selected.size()) continue;
        LieElement val;
        for (size_t j = 0; j < targets.size(); ++j) {
          if (j == col || rel(r, j) == 0) continue;
          // free target generator keeps its (possibly substituted) value
          const LieElement& sj = subst[targets[j]];
          for (const auto& [b, c] : sj) {
            val[b] += -rel(r, j) * c;
            if (val[b] == 0) val.erase(b);
          }
        }
        LieElement tail_combined;
        for (size_t k = 0; k < selected.size(); ++k) {
          if (ops(r, k) == 0) continue;
          for (const auto& [b, c] : tails[k]) {
            tail_combined[b] += ops(r, k) * c;
            if (tail_combined[b] == 0) tail_combined.erase(b);
          }
        }
        LieElement tail_sub = cur.ctx->substitute(tail_combined, subst, *new_ctx);
        for (const auto& [b, c] : tail_sub) {
          val[b] += -c;
          if (val[b] == 0) val.erase(b);
        }
        subst[targets[col]] = std::move(val);
      }
    }

    std::vector<LieElement> new_images(new_ctx->generators().size());
    for (size_t j = 0; j < new_ctx->generators().size(); ++j) {
      size_t old_idx = ng;
      for (size_t k = 0; k < ng; ++k)
        if (!dropped[k] && gens.label(k) == new_ctx->generators().label(j))
          old_idx = k;
      new_images[j] = cur.ctx->substitute(cur.differential.images()[old_idx],
                                          subst, *new_ctx);
    }
    FreeDGLie next;
    next.ctx = new_ctx;
    next.differential = extend_derivation(new_ctx, std::move(new_images), -1);
    next.window = t;
    next.weight_split = is_quadratic(next.differential.images());
    if (!next.verify_square_zero())
      throw Error(errc::sign_convention_failure,
                  "elimination broke the differential");
    cur = std::move(next);
  }

  // certificate: homology of the abelianization is unchanged
  auto abelian_homology = [](const FreeDGLie& g) {
    std::map<int, size_t> out;
    const auto& gens = g.generators();
    int maxd = 0;
    for (size_t i = 0; i < gens.size(); ++i)
      maxd = std::max(maxd, gens.degree(i));
    for (int n = 0; n <= maxd; ++n) {
      std::vector<size_t> here, below, above;
      for (size_t i = 0; i < gens.size(); ++i) {
        if (gens.degree(i) == n) here.push_back(i);
        if (gens.degree(i) == n - 1) below.push_back(i);
        if (gens.degree(i) == n + 1) above.push_back(i);
      }
      auto lin_coeff = [&](size_t src, size_t tgt) {
        for (const auto& [b, c] : g.differential.images()[src])
          if (b.weight == 1 && b.word[0] == static_cast<int>(tgt)) return c;
        return Rat(0);
      };
      Matrix d_out(below.size(), here.size());
      for (size_t c = 0; c < here.size(); ++c)
        for (size_t r = 0; r < below.size(); ++r)
          d_out(r, c) = lin_coeff(here[c], below[r]);
      Matrix d_in(here.size(), above.size());
      for (size_t c = 0; c < above.size(); ++c)
        for (size_t r = 0; r < here.size(); ++r)
          d_in(r, c) = lin_coeff(above[c], here[r]);
      size_t h = homology_representatives(d_out, d_in).cols();
      if (h) out[n] = h;
    }
    return out;
  };
  if (abelian_homology(m) != abelian_homology(cur))
    throw Error(errc::sign_convention_failure,
                "abelianization homology changed during elimination");
  return cur;
}

AdamsPage adams_e1(const GradedRing& a, const Truncation& t) {
  FreeDGLie m = build_model(a, t);
  AdamsPage page;
  for (int w = 1; w <= t.max_weight; ++w) {
    for (int n = 0; n <= t.max_degree; ++n) {
      WordIndex idx = words_at(m, n, w, w);
      if (idx.words.empty()) continue;
      std::pair<int, int> key{-w, n + w};
      page.dims[key] = idx.words.size();
      page.basis[key] = idx.words;
    }
  }
  for (const auto& [key, words] : page.basis) {
    auto [p, q] = key;
    int n = p + q;
    WordIndex src;
    for (const auto& wd : words) src.add(wd);
    WordIndex tgt = words_at(m, n - 1, -p + 1, -p + 1);
    Matrix mat = block_matrix(m, src, tgt);
    page.d1[key] = mat;
  }
  // d1 o d1 = 0 blockwise
  for (const auto& [key, mat] : page.d1) {
    auto [p, q] = key;
    auto next = page.d1.find({p - 1, q});
    if (next != page.d1.end() && next->second.cols() == mat.rows() &&
        !(next->second * mat).is_zero())
      throw Error(errc::sign_convention_failure, "d1 o d1 != 0");
  }
  return page;
}

Vec CEAlgebra::mul(const Vec& a, const Vec& b) const {
  Vec out(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < basis.size(); ++j) {
      if (b[j] == 0) continue;
      // merge monomials with the Koszul sign
      Monomial merged;
      merged.reserve(basis[i].size() + basis[j].size());
      int sign = 1;
      size_t pi = 0, pj = 0;
      bool zero = false;
      int odd_tail = 0;  // number of odd factors remaining in basis[i]
      std::vector<int> odd_suffix(basis[i].size() + 1, 0);
      for (size_t k = basis[i].size(); k-- > 0;)
        odd_suffix[k] = odd_suffix[k + 1] + (gen_odd[basis[i][k]] ? 1 : 0);
      while (pi < basis[i].size() || pj < basis[j].size()) {
        if (pj == basis[j].size() ||
            (pi < basis[i].size() && basis[i][pi] <= basis[j][pj])) {
          merged.push_back(basis[i][pi]);
          ++pi;
        } else {
          int g = basis[j][pj];
          if (gen_odd[g] && odd_suffix[pi] % 2) sign = -sign;
          if (!merged.empty() && merged.back() == g && gen_odd[g]) {
            zero = true;
            break;
          }
          merged.push_back(g);
          ++pj;
        }
      }
      if (zero) continue;
      // repeated odd generator anywhere kills the monomial
      bool dead = false;
      for (size_t k = 0; k + 1 < merged.size(); ++k)
        if (merged[k] == merged[k + 1] && gen_odd[merged[k]]) dead = true;
      if (dead) continue;
      auto it = index.find(merged);
      if (it == index.end()) continue;  // beyond the truncation window
      out[it->second] += sign * a[i] * b[j];
    }
  }
  return out;
}

std::map<size_t, Rat> CEAlgebra::d_sparse(size_t mi) const {
  std::map<size_t, Rat> out;
  const Monomial& mono = basis[mi];
  int prefix_deg = 0;
  for (size_t pos = 0; pos < mono.size(); ++pos) {
    int g = mono[pos];
    // prefix * d(x) * suffix rewritten as d(x) * rest
    int sgn = (prefix_deg * gen_degree[g]) % 2 ? -1 : 1;
    for (const auto& [tg, tc] : d_gen[g]) {
      // multiply d(gen) (a monomial basis element) by the remaining factors
      Vec dv(basis.size());
      dv[tg] = sgn * tc;
      // remaining monomial
      Monomial rest;
      for (size_t k = 0; k < mono.size(); ++k)
        if (k != pos) rest.push_back(mono[k]);
      auto rit = index.find(rest);
      if (rit == index.end()) continue;
      Vec rv(basis.size());
      rv[rit->second] = 1;
      Vec prod = mul(dv, rv);
      for (size_t k = 0; k < prod.size(); ++k)
        if (prod[k] != 0) {
          out[k] += prod[k];
          if (out[k] == 0) out.erase(k);
        }
    }
    prefix_deg += gen_degree[g];
  }
  return out;
}

Vec CEAlgebra::d(const Vec& v) const {
  Vec out(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) {
    if (v[i] == 0) continue;
    for (const auto& [k, c] : d_sparse(i)) out[k] += v[i] * c;
  }
  return out;
}

bool CEAlgebra::d_squares_to_zero() const {
  for (size_t g = 0; g < gen_labels.size(); ++g) {
    Vec v(basis.size());
    for (const auto& [k, c] : d_gen[g]) v[k] = c;
    Vec dd = d(v);
    for (const auto& c : dd)
      if (c != 0) return false;
  }
  return true;
}

std::map<std::pair<int, int>, size_t> CEAlgebra::cohomology_blocks() const {
  std::map<std::pair<int, int>, std::vector<size_t>> blocks;
  for (size_t i = 0; i < basis.size(); ++i)
    blocks[{degree[i], weighted ? weight[i] : 0}].push_back(i);
  std::map<std::pair<int, int>, size_t> out;
  for (const auto& [key, idxs] : blocks) {
    auto [n, w] = key;
    auto find_block = [&](int nn, int ww) -> const std::vector<size_t>* {
      auto it = blocks.find({nn, weighted ? ww : 0});
      return it == blocks.end() ? nullptr : &it->second;
    };
    const auto* tgt = find_block(n + 1, w);
    const auto* src = find_block(n - 1, w);
    std::map<size_t, size_t> hpos;
    for (size_t k = 0; k < idxs.size(); ++k) hpos[idxs[k]] = k;
    Matrix d_out(tgt ? tgt->size() : 0, idxs.size());
    if (tgt) {
      std::map<size_t, size_t> tp;
      for (size_t k = 0; k < tgt->size(); ++k) tp[(*tgt)[k]] = k;
      for (size_t c = 0; c < idxs.size(); ++c)
        for (const auto& [k, coef] : d_sparse(idxs[c])) {
          auto it = tp.find(k);
          if (it != tp.end()) d_out(it->second, c) = coef;
        }
    }
    Matrix d_in(idxs.size(), src ? src->size() : 0);
    if (src) {
      for (size_t c = 0; c < src->size(); ++c)
        for (const auto& [k, coef] : d_sparse((*src)[c])) {
          auto it = hpos.find(k);
          if (it != hpos.end()) d_in(it->second, c) = coef;
        }
    }
    size_t h = homology_representatives(d_out, d_in).cols();
    if (h) out[key] = h;
  }
  return out;
}

std::map<int, size_t> CEAlgebra::cohomology_betti() const {
  std::map<int, size_t> out;
  for (const auto& [key, dim] : cohomology_blocks()) {
    auto [n, w] = key;
    if (weighted && w > weight_cutoff) continue;  // incomplete block
    if (n > max_degree) continue;
    out[n] += dim;
  }
  return out;
}

CEAlgebra ce_cochains(const FreeDGLie& m, const Truncation& t) {
  CEAlgebra ce;
  ce.max_degree = t.max_degree;
  ce.weighted = m.weight_split;
  ce.weight_cutoff = std::min(t.max_weight, m.window.max_weight);

  // generators: duals of the window basis words
  std::vector<LieWord> words;
  for (const auto& b : m.ctx->basis())
    if (b.weight <= m.window.max_weight && b.degree + 1 <= t.max_degree + 1)
      words.push_back(b);
  std::map<LieWord, size_t> word_pos;
  for (const auto& b : words) {
    word_pos[b] = ce.gen_labels.size();
    ce.gen_labels.push_back(b.str(m.generators()));
    ce.gen_degree.push_back(b.degree + 1);
    ce.gen_weight.push_back(b.degree + b.weight);
    ce.gen_odd.push_back((b.degree + 1) % 2 != 0);
  }

  // monomials: cohomological degree <= N+1, at most L factors, and (in
  // weighted mode) weight <= cutoff so every kept block is complete
  size_t budget = t.budget;
  std::vector<int> stack;
  auto push_monomial = [&](const std::vector<int>& mono) {
    CEAlgebra::Monomial mm(mono.begin(), mono.end());
    ce.index[mm] = ce.basis.size();
    ce.basis.push_back(mm);
    int dsum = 0, wsum = 0;
    for (int g : mono) {
      dsum += ce.gen_degree[g];
      wsum += ce.gen_weight[g];
    }
    ce.degree.push_back(dsum);
    ce.weight.push_back(wsum);
  };
  push_monomial({});
  auto rec = [&](auto&& self, int start, int deg, int wt) -> void {
    for (int g = start; g < static_cast<int>(ce.gen_labels.size()); ++g) {
      if (ce.gen_odd[g] && !stack.empty() && stack.back() == g) continue;
      int nd = deg + ce.gen_degree[g];
      int nw = wt + ce.gen_weight[g];
      if (nd > t.max_degree + 1) continue;
      if (ce.weighted && nw > ce.weight_cutoff) continue;
      if (static_cast<int>(stack.size()) + 1 > t.max_weight) continue;
      if (ce.basis.size() >= budget)
        throw Error(errc::truncation_too_large, "cochain monomial budget");
      stack.push_back(g);
      push_monomial(stack);
      self(self, g, nd, nw);
      stack.pop_back();
    }
  };
  rec(rec, 0, 0, 0);

  // differential on generators: transpose of the Lie differential plus the
  // transpose of the bracket
  ce.d_gen.assign(ce.gen_labels.size(), {});
  for (const auto& bp : words) {
    LieElement img = m.differential.apply(LieElement{{bp, rat(1)}});
    for (const auto& [b, c] : img) {
      auto it = word_pos.find(b);
      if (it == word_pos.end()) continue;
      size_t src = it->second;  // xi_b picks up xi_{b'}
      CEAlgebra::Monomial mono{static_cast<int>(word_pos[bp])};
      auto mit = ce.index.find(mono);
      if (mit == ce.index.end()) continue;
      ce.d_gen[src][mit->second] += c;
      if (ce.d_gen[src][mit->second] == 0) ce.d_gen[src].erase(mit->second);
    }
  }
  Rat half = rat(1, 2);
  for (size_t iu = 0; iu < words.size(); ++iu)
    for (size_t iv = 0; iv < words.size(); ++iv) {
      const LieWord& u = words[iu];
      const LieWord& v = words[iv];
      if (u.weight + v.weight > m.window.max_weight) continue;
      LieElement br = m.ctx->bracket(LieElement{{u, rat(1)}},
                                     LieElement{{v, rat(1)}});
      for (const auto& [b, c] : br) {
        auto it = word_pos.find(b);
        if (it == word_pos.end()) continue;
        // contribution (1/2)(-1)^{|xi_u|} c * xi_u xi_v, sorted
        int gu = static_cast<int>(iu), gv = static_cast<int>(iv);
        int sign = ce.gen_degree[gu] % 2 ? -1 : 1;
        CEAlgebra::Monomial mono;
        int msign = 1;
        if (gu <= gv) {
          if (gu == gv && ce.gen_odd[gu]) continue;
          mono = {gu, gv};
        } else {
          mono = {gv, gu};
          if (ce.gen_odd[gu] && ce.gen_odd[gv]) msign = -1;
        }
        auto mit = ce.index.find(mono);
        if (mit == ce.index.end()) continue;
        Rat coeff = half * sign * msign * c;
        ce.d_gen[it->second][mit->second] += coeff;
        if (ce.d_gen[it->second][mit->second] == 0)
          ce.d_gen[it->second].erase(mit->second);
      }
    }
  if (!ce.d_squares_to_zero())
    throw Error(errc::sign_convention_failure, "cochain differential");
  return ce;
}

}  // namespace malcev
