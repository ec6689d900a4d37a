#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "malcev/rational.hpp"

namespace malcev {

using Vec = std::vector<Rat>;

class Matrix {
public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  static Matrix identity(size_t n);
  static Matrix zero(size_t rows, size_t cols) { return Matrix(rows, cols); }
  static Matrix from_columns(size_t rows, const std::vector<Vec>& cols);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  Rat& operator()(size_t r, size_t c) { return e_[r * cols_ + c]; }
  const Rat& operator()(size_t r, size_t c) const { return e_[r * cols_ + c]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }
  bool is_zero() const;

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix transpose() const;

  Vec apply(const Vec& v) const;  // matrix * column vector
  Vec column(size_t c) const;
  std::vector<Vec> columns() const;

private:
  size_t rows_, cols_;
  std::vector<Rat> e_;
};

// Incremental row-echelon structure over Q. Rows are kept fully reduced, one
// pivot per row. Used for span membership, quotient bases and rank counts.
class RowReducer {
public:
  explicit RowReducer(size_t dim) : dim_(dim) {}

  // Reduces v against the current rows; returns the residual.
  Vec reduce(const Vec& v) const;
  // Reduces v and, if the residual is nonzero, inserts it. Returns true if
  // the vector enlarged the span.
  bool add(const Vec& v);
  bool contains(const Vec& v) const;

  size_t rank() const { return rows_.size(); }
  size_t dim() const { return dim_; }
  const std::vector<Vec>& rows() const { return rows_; }

private:
  size_t dim_;
  std::vector<Vec> rows_;      // reduced, pivot normalized to 1
  std::vector<size_t> pivots_; // pivot column of each row, increasing order not required
};

struct RankKernelImage {
  size_t rank = 0;
  Matrix kernel;  // columns form a basis of ker(m)
  Matrix image;   // columns form a basis of im(m)
};

// Exact Gaussian elimination with first-nonzero pivoting.
RankKernelImage rank_kernel_image(const Matrix& m);

// Solves m x = b; std::nullopt when inconsistent.
std::optional<Vec> solve(const Matrix& m, const Vec& b);

// Factorized solver for repeated right-hand sides against one matrix.
class LinearSolver {
public:
  explicit LinearSolver(Matrix m);

  std::optional<Vec> solve(const Vec& b) const;
  const std::vector<Vec>& kernel_basis() const { return kernel_; }
  size_t rank() const { return pivot_cols_.size(); }

private:
  Matrix r_;                       // RREF of m
  Matrix ops_;                     // row-operation matrix: ops_ * m = r_
  std::vector<size_t> pivot_cols_;
  std::vector<Vec> kernel_;
  size_t cols_;
};

}  // namespace malcev
