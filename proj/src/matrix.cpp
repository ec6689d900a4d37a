#include "malcev/matrix.hpp"

#include "malcev/errors.hpp"

namespace malcev {

Matrix Matrix::identity(size_t n) {
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::from_columns(size_t rows, const std::vector<Vec>& cols) {
  Matrix m(rows, cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows)
      throw Error(errc::degree_mismatch, "column length mismatch");
    for (size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

bool Matrix::is_zero() const {
  for (const auto& x : e_)
    if (x != 0) return false;
  return true;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw Error(errc::degree_mismatch, "matrix product shape");
  Matrix m(rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t k = 0; k < cols_; ++k) {
      const Rat& a = (*this)(i, k);
      if (a == 0) continue;
      for (size_t j = 0; j < o.cols_; ++j) {
        const Rat& b = o(k, j);
        if (b != 0) m(i, j) += a * b;
      }
    }
  return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
  Matrix m(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i] + o.e_[i];
  return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix m(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i] - o.e_[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix m(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Vec Matrix::apply(const Vec& v) const {
  if (v.size() != cols_) throw Error(errc::degree_mismatch, "apply shape");
  Vec out(rows_);
  for (size_t i = 0; i < rows_; ++i) {
    Rat s = 0;
    for (size_t j = 0; j < cols_; ++j) {
      const Rat& a = (*this)(i, j);
      if (a != 0 && v[j] != 0) s += a * v[j];
    }
    out[i] = s;
  }
  return out;
}

Vec Matrix::column(size_t c) const {
  Vec v(rows_);
  for (size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

std::vector<Vec> Matrix::columns() const {
  std::vector<Vec> out;
  out.reserve(cols_);
  for (size_t c = 0; c < cols_; ++c) out.push_back(column(c));
  return out;
}

Vec RowReducer::reduce(const Vec& v) const {
  Vec w = v;
  for (size_t i = 0; i < rows_.size(); ++i) {
    const Rat& c = w[pivots_[i]];
    if (c == 0) continue;
    Rat f = c;  // pivot normalized to 1
    for (size_t j = 0; j < dim_; ++j)
      if (rows_[i][j] != 0) w[j] -= f * rows_[i][j];
  }
  return w;
}

bool RowReducer::add(const Vec& v) {
  Vec w = reduce(v);
  size_t p = dim_;
  for (size_t j = 0; j < dim_; ++j)
    if (w[j] != 0) {
      p = j;
      break;
    }
  if (p == dim_) return false;
  Rat inv = 1 / w[p];
  for (auto& x : w) x *= inv;
  // back-substitute into existing rows
  for (size_t i = 0; i < rows_.size(); ++i) {
    Rat c = rows_[i][p];
    if (c == 0) continue;
    for (size_t j = 0; j < dim_; ++j)
      if (w[j] != 0) rows_[i][j] -= c * w[j];
  }
  rows_.push_back(std::move(w));
  pivots_.push_back(p);
  return true;
}

bool RowReducer::contains(const Vec& v) const {
  Vec w = reduce(v);
  for (const auto& x : w)
    if (x != 0) return false;
  return true;
}

RankKernelImage rank_kernel_image(const Matrix& m) {
  const size_t rows = m.rows(), cols = m.cols();
  // Column-reduce: track the transform so kernel vectors come out exactly.
  Matrix work = m;
  Matrix tr = Matrix::identity(cols);
  size_t lead = 0;
  std::vector<size_t> pivot_cols;
  for (size_t r = 0; r < rows && lead < cols; ++r) {
    size_t pc = cols;
    for (size_t c = lead; c < cols; ++c)
      if (work(r, c) != 0) {
        pc = c;
        break;
      }
    if (pc == cols) continue;
    if (pc != lead)
      for (size_t i = 0; i < rows; ++i) std::swap(work(i, pc), work(i, lead));
    if (pc != lead)
      for (size_t i = 0; i < cols; ++i) std::swap(tr(i, pc), tr(i, lead));
    Rat inv = 1 / work(r, lead);
    for (size_t i = 0; i < rows; ++i) work(i, lead) *= inv;
    for (size_t i = 0; i < cols; ++i) tr(i, lead) *= inv;
    for (size_t c = 0; c < cols; ++c) {
      if (c == lead) continue;
      Rat f = work(r, c);
      if (f == 0) continue;
      for (size_t i = 0; i < rows; ++i) work(i, c) -= f * work(i, lead);
      for (size_t i = 0; i < cols; ++i) tr(i, c) -= f * tr(i, lead);
    }
    pivot_cols.push_back(lead);
    ++lead;
  }
  RankKernelImage out;
  out.rank = lead;
  out.image = Matrix(rows, lead);
  for (size_t c = 0; c < lead; ++c)
    for (size_t r = 0; r < rows; ++r) out.image(r, c) = work(r, c);
  out.kernel = Matrix(cols, cols - lead);
  for (size_t c = lead; c < cols; ++c)
    for (size_t r = 0; r < cols; ++r) out.kernel(r, c - lead) = tr(r, c);
  return out;
}

std::optional<Vec> solve(const Matrix& m, const Vec& b) {
  LinearSolver s(m);
  return s.solve(b);
}

LinearSolver::LinearSolver(Matrix m) : cols_(m.cols()) {
  const size_t rows = m.rows(), cols = m.cols();
  r_ = std::move(m);
  ops_ = Matrix::identity(rows);
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t pr = rows;
    for (size_t r = rank; r < rows; ++r)
      if (r_(r, c) != 0) {
        pr = r;
        break;
      }
    if (pr == rows) continue;
    if (pr != rank)
      for (size_t j = 0; j < cols; ++j) std::swap(r_(pr, j), r_(rank, j));
    if (pr != rank)
      for (size_t j = 0; j < rows; ++j) std::swap(ops_(pr, j), ops_(rank, j));
    Rat inv = 1 / r_(rank, c);
    for (size_t j = 0; j < cols; ++j) r_(rank, j) *= inv;
    for (size_t j = 0; j < rows; ++j) ops_(rank, j) *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      Rat f = r_(r, c);
      if (f == 0) continue;
      for (size_t j = 0; j < cols; ++j)
        if (r_(rank, j) != 0) r_(r, j) -= f * r_(rank, j);
      for (size_t j = 0; j < rows; ++j)
        if (ops_(rank, j) != 0) ops_(r, j) -= f * ops_(rank, j);
    }
    pivot_cols_.push_back(c);
    ++rank;
  }
  // kernel basis from free columns
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivot_cols_) is_pivot[c] = true;
  for (size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    Vec k(cols);
    k[c] = 1;
    for (size_t i = 0; i < pivot_cols_.size(); ++i) k[pivot_cols_[i]] = -r_(i, c);
    kernel_.push_back(std::move(k));
  }
}

std::optional<Vec> LinearSolver::solve(const Vec& b) const {
  Vec rb = ops_.apply(b);
  for (size_t r = pivot_cols_.size(); r < rb.size(); ++r)
    if (rb[r] != 0) return std::nullopt;
  Vec x(cols_);
  for (size_t i = 0; i < pivot_cols_.size(); ++i) x[pivot_cols_[i]] = rb[i];
  return x;
}

}  // namespace malcev
