#include "malcev/free_lie.hpp"

#include <algorithm>

#include "malcev/errors.hpp"

namespace malcev {

GradedGenerators::GradedGenerators(std::vector<Generator> gens)
    : gens_(std::move(gens)) {
  std::stable_sort(gens_.begin(), gens_.end(),
                   [](const Generator& a, const Generator& b) {
                     return std::tie(a.degree, a.label) <
                            std::tie(b.degree, b.label);
                   });
  for (size_t i = 0; i + 1 < gens_.size(); ++i)
    if (gens_[i].label == gens_[i + 1].label)
      throw Error(errc::parse, "duplicate generator '" + gens_[i].label + "'");
  for (const auto& g : gens_)
    if (g.degree < 0)
      throw Error(errc::degree_mismatch,
                  "negative generator degree '" + g.label + "'");
}

int GradedGenerators::min_degree() const {
  int m = 0;
  bool first = true;
  for (const auto& g : gens_) {
    if (first || g.degree < m) m = g.degree;
    first = false;
  }
  return m;
}

std::string LieWord::str(const GradedGenerators& g) const {
  std::string s = square ? "[" : "";
  for (size_t i = 0; i < word.size(); ++i) {
    if (i) s += ".";
    s += g.label(word[i]);
  }
  if (square) s += "]^2";
  return s;
}

FreeLieContext::FreeLieContext(GradedGenerators gens, Truncation t)
    : gens_(std::move(gens)), trunc_(t) {
  if (trunc_.max_degree < 0 || trunc_.max_weight < 1)
    throw Error(errc::truncation_too_large, "window must satisfy N >= 0, L >= 1");
  enumerate_basis();
}

int FreeLieContext::word_degree(const Word& w) const {
  int d = 0;
  for (int l : w) d += gens_.degree(l);
  return d;
}

bool FreeLieContext::is_lyndon(const Word& w) const {
  if (w.empty()) return false;
  if (w.size() == 1) return true;
  for (size_t i = 1; i < w.size(); ++i) {
    // w must be strictly smaller than each proper suffix
    if (!std::lexicographical_compare(w.begin(), w.end(), w.begin() + i, w.end()))
      return false;
  }
  return true;
}

void FreeLieContext::enumerate_basis() {
  const int maxw = trunc_.max_weight;
  const size_t k = gens_.size();
  size_t count = 0;
  std::vector<Word> lyndon;
  Word cur;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (!cur.empty()) {
      if (++count > trunc_.budget)
        throw Error(errc::truncation_too_large,
                    "basis enumeration exceeded budget");
      if (is_lyndon(cur)) lyndon.push_back(cur);
    }
    if (remaining == 0) return;
    for (size_t l = 0; l < k; ++l) {
      cur.push_back(static_cast<int>(l));
      self(self, remaining - 1);
      cur.pop_back();
    }
  };
  rec(rec, maxw);

  for (const auto& w : lyndon) {
    int d = word_degree(w);
    basis_.push_back(
        {w, false, d, static_cast<int>(w.size())});
    if (d % 2 != 0 && 2 * static_cast<int>(w.size()) <= maxw)
      basis_.push_back({w, true, 2 * d, 2 * static_cast<int>(w.size())});
  }
  std::sort(basis_.begin(), basis_.end());
}

std::vector<LieWord> FreeLieContext::basis_at(int degree, int weight) const {
  std::vector<LieWord> out;
  for (const auto& b : basis_)
    if (b.degree == degree && b.weight == weight) out.push_back(b);
  return out;
}

TensorPoly FreeLieContext::tensor_mul(const TensorPoly& a,
                                      const TensorPoly& b) const {
  TensorPoly out;
  const int maxw = trunc_.max_weight;
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) {
      if (static_cast<int>(wa.size() + wb.size()) > maxw) continue;
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      Rat& c = out[w];
      c += ca * cb;
      if (c == 0) out.erase(w);
    }
  return out;
}

const TensorPoly& FreeLieContext::rho(const LieWord& b) const {
  auto it = rho_cache_.find(b);
  if (it != rho_cache_.end()) return it->second;
  TensorPoly p;
  if (b.square) {
    const TensorPoly& r = rho({b.word, false, word_degree(b.word),
                               static_cast<int>(b.word.size())});
    p = tensor_mul(r, r);
  } else if (b.word.size() == 1) {
    p[b.word] = 1;
  } else {
    // standard factorization: v = lexicographically least proper suffix
    size_t split = 1;
    for (size_t i = 2; i < b.word.size(); ++i)
      if (std::lexicographical_compare(b.word.begin() + i, b.word.end(),
                                       b.word.begin() + split, b.word.end()))
        split = i;
    Word u(b.word.begin(), b.word.begin() + split);
    Word v(b.word.begin() + split, b.word.end());
    auto mk = [&](Word w) {
      return LieWord{w, false, word_degree(w), static_cast<int>(w.size())};
    };
    const TensorPoly ru = rho(mk(u));
    const TensorPoly rv = rho(mk(v));
    p = tensor_mul(ru, rv);
    int sign = (word_degree(u) * word_degree(v)) % 2 ? -1 : 1;
    for (const auto& [w, c] : tensor_mul(rv, ru)) {
      Rat& x = p[w];
      x -= sign * c;
      if (x == 0) p.erase(w);
    }
  }
  return rho_cache_.emplace(b, std::move(p)).first->second;
}

LieElement FreeLieContext::straighten(const TensorPoly& p) const {
  TensorPoly work = p;
  LieElement out;
  while (!work.empty()) {
    auto [w, c] = *work.begin();
    LieWord b;
    if (is_lyndon(w)) {
      b = {w, false, word_degree(w), static_cast<int>(w.size())};
    } else {
      size_t h = w.size() / 2;
      Word half(w.begin(), w.begin() + h);
      bool is_square = w.size() % 2 == 0 &&
                       std::equal(w.begin() + h, w.end(), w.begin()) &&
                       word_degree(half) % 2 != 0 && is_lyndon(half);
      if (!is_square)
        throw Error(errc::degree_mismatch,
                    "tensor element is not a Lie element");
      b = {half, true, word_degree(w), static_cast<int>(w.size())};
    }
    out[b] = c;
    for (const auto& [wr, cr] : rho(b)) {
      Rat& x = work[wr];
      x -= c * cr;
      if (x == 0) work.erase(wr);
    }
  }
  return out;
}

TensorPoly FreeLieContext::expand(const LieElement& x) const {
  TensorPoly out;
  for (const auto& [b, c] : x)
    for (const auto& [w, cw] : rho(b)) {
      Rat& v = out[w];
      v += c * cw;
      if (v == 0) out.erase(w);
    }
  return out;
}

LieElement FreeLieContext::bracket(const LieElement& x,
                                   const LieElement& y) const {
  TensorPoly acc;
  auto add = [&](const TensorPoly& p, const Rat& c, int sign) {
    for (const auto& [w, cw] : p) {
      Rat& v = acc[w];
      v += sign * c * cw;
      if (v == 0) acc.erase(w);
    }
  };
  // terms beyond max_weight are dropped (pro-nilpotent truncation)
  for (const auto& [bx, cx] : x)
    for (const auto& [by, cy] : y) {
      if (bx.weight + by.weight > trunc_.max_weight) continue;
      int sign = (bx.degree * by.degree) % 2 ? -1 : 1;
      add(tensor_mul(rho(bx), rho(by)), cx * cy, 1);
      add(tensor_mul(rho(by), rho(bx)), cx * cy, -sign);
    }
  return straighten(acc);
}

TensorPoly FreeLieContext::tensor_substitute(
    const TensorPoly& p, const std::vector<Vec>& letter_images) {
  TensorPoly out;
  for (const auto& [w, c] : p) {
    // multilinear expansion of the word
    std::vector<std::pair<Word, Rat>> partial{{Word{}, c}};
    for (int l : w) {
      const Vec& img = letter_images.at(l);
      std::vector<std::pair<Word, Rat>> next;
      for (const auto& [pw, pc] : partial)
        for (size_t j = 0; j < img.size(); ++j) {
          if (img[j] == 0) continue;
          Word nw = pw;
          nw.push_back(static_cast<int>(j));
          next.emplace_back(std::move(nw), pc * img[j]);
        }
      partial = std::move(next);
    }
    for (auto& [pw, pc] : partial) {
      Rat& v = out[pw];
      v += pc;
      if (v == 0) out.erase(pw);
    }
  }
  return out;
}

LieElement FreeLieContext::substitute(const LieElement& x,
                                      const std::vector<LieElement>& images,
                                      const FreeLieContext& target) const {
  std::vector<TensorPoly> img_tensors;
  img_tensors.reserve(images.size());
  for (const auto& im : images) img_tensors.push_back(target.expand(im));
  TensorPoly acc;
  for (const auto& [b, c] : x) {
    for (const auto& [w, cw] : rho(b)) {
      TensorPoly term{{Word{}, c * cw}};
      for (int l : w) {
        term = target.tensor_mul(term, img_tensors[l]);
        if (term.empty()) break;
      }
      for (const auto& [tw, tc] : term) {
        Rat& v = acc[tw];
        v += tc;
        if (v == 0) acc.erase(tw);
      }
    }
  }
  return target.straighten(acc);
}

LieDerivation::LieDerivation(std::shared_ptr<const FreeLieContext> ctx,
                             std::vector<LieElement> images, int shift)
    : ctx_(std::move(ctx)), images_(std::move(images)), shift_(shift) {}

TensorPoly LieDerivation::apply_tensor(const TensorPoly& p) const {
  TensorPoly out;
  const int maxw = ctx_->truncation().max_weight;
  for (const auto& [w, c] : p) {
    int prefix_deg = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      const TensorPoly img = ctx_->expand(images_[w[i]]);
      int sign = (shift_ % 2 != 0 && prefix_deg % 2 != 0) ? -1 : 1;
      for (const auto& [iw, ic] : img) {
        if (static_cast<int>(w.size() - 1 + iw.size()) > maxw) continue;
        Word nw(w.begin(), w.begin() + i);
        nw.insert(nw.end(), iw.begin(), iw.end());
        nw.insert(nw.end(), w.begin() + i + 1, w.end());
        Rat& v = out[nw];
        v += sign * c * ic;
        if (v == 0) out.erase(nw);
      }
      prefix_deg += ctx_->generators().degree(w[i]);
    }
  }
  return out;
}

LieElement LieDerivation::apply(const LieElement& x) const {
  return ctx_->straighten(apply_tensor(ctx_->expand(x)));
}

bool LieDerivation::squares_to_zero() const {
  // D^2 is a derivation, so vanishing on generators suffices.
  for (size_t i = 0; i < ctx_->generators().size(); ++i) {
    if (!apply(images_[i]).empty()) return false;
  }
  return true;
}

std::vector<LieWord> lyndon_basis(const GradedGenerators& g,
                                  const Truncation& t) {
  FreeLieContext ctx(g, t);
  std::vector<LieWord> out;
  for (const auto& b : ctx.basis())
    if (b.degree <= t.max_degree) out.push_back(b);
  return out;
}

LieElement bracket(const GradedGenerators& g, const Truncation& t,
                   const LieElement& x, const LieElement& y) {
  FreeLieContext ctx(g, t);
  return ctx.bracket(x, y);
}

LieDerivation extend_derivation(std::shared_ptr<const FreeLieContext> ctx,
                                std::vector<LieElement> images, int shift) {
  const auto& gens = ctx->generators();
  if (images.size() != gens.size())
    throw Error(errc::degree_mismatch, "one image per generator required");
  for (size_t i = 0; i < images.size(); ++i)
    for (const auto& [b, c] : images[i])
      if (b.degree != gens.degree(i) + shift)
        throw Error(errc::degree_mismatch,
                    "image of '" + gens.label(i) + "' has degree " +
                        std::to_string(b.degree) + ", expected " +
                        std::to_string(gens.degree(i) + shift));
  return LieDerivation(std::move(ctx), std::move(images), shift);
}

std::map<int, size_t> free_lie_degree_dims(const GradedGenerators& g,
                                           int max_degree) {
  const int n = max_degree;
  std::vector<long> gen_count(n + 1, 0);
  for (size_t i = 0; i < g.size(); ++i) {
    if (g.degree(i) < 1)
      throw Error(errc::degree_mismatch,
                  "series requires generator degrees >= 1");
    if (g.degree(i) <= n) ++gen_count[g.degree(i)];
  }
  // tensor algebra series T = 1/(1 - f)
  std::vector<Rat> tser(n + 1);
  tser[0] = 1;
  for (int k = 1; k <= n; ++k)
    for (int d = 1; d <= k; ++d)
      if (gen_count[d]) tser[k] += gen_count[d] * tser[k - d];
  // peel off factors (1 - t^d)^{-l_d} (even d) and (1 + t^d)^{l_d} (odd d)
  std::map<int, size_t> dims;
  std::vector<Rat> rem = tser;
  auto mul_series = [&](const std::vector<Rat>& s) {
    std::vector<Rat> out(n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j)
        if (rem[i] != 0 && s[j] != 0) out[i + j] += rem[i] * s[j];
    rem = std::move(out);
  };
  for (int d = 1; d <= n; ++d) {
    Rat c = rem[d];
    if (c == 0) continue;
    if (c.get_den() != 1 || c < 0)
      throw Error(errc::degree_mismatch, "series coefficients must be counts");
    long ld = c.get_num().get_si();
    dims[d] = static_cast<size_t>(ld);
    std::vector<Rat> inv(n + 1);
    if (d % 2) {
      // (1 + t^d)^{-ld} = sum (-1)^k C(ld+k-1, k) t^{dk}
      Rat coeff = 1;
      for (int k = 0; d * k <= n; ++k) {
        inv[d * k] = (k % 2 ? -coeff : coeff);
        coeff = coeff * (ld + k) / (k + 1);
      }
    } else {
      // (1 - t^d)^{ld} = sum (-1)^k C(ld, k) t^{dk}
      Rat coeff = 1;
      for (int k = 0; d * k <= n && k <= ld; ++k) {
        inv[d * k] = (k % 2 ? -coeff : coeff);
        coeff = coeff * (ld - k) / (k + 1);
      }
    }
    mul_series(inv);
  }
  return dims;
}

std::map<int, size_t> lie_weight_dims(const GradedModule& w, int p,
                                      const Truncation& t) {
  std::vector<Generator> gens;
  for (const auto& [deg, labels] : w.basis)
    for (const auto& l : labels) gens.push_back({l, deg});
  Truncation tt = t;
  tt.max_weight = std::max(tt.max_weight, p);
  FreeLieContext ctx(GradedGenerators(std::move(gens)), tt);
  std::map<int, size_t> out;
  for (const auto& b : ctx.basis())
    if (b.weight == p && b.degree <= t.max_degree) ++out[b.degree];
  return out;
}

}  // namespace malcev
