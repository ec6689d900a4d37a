#include "malcev/chain_complex.hpp"

#include "malcev/errors.hpp"

namespace malcev {

const std::vector<std::string> ChainComplexQ::empty_{};

ChainComplexQ::ChainComplexQ(std::map<int, std::vector<std::string>> labels,
                             std::map<int, Matrix> differentials)
    : labels_(std::move(labels)), diffs_(std::move(differentials)) {
  if (labels_.empty()) {
    min_deg_ = 0;
    max_deg_ = -1;
    return;
  }
  min_deg_ = labels_.begin()->first;
  max_deg_ = labels_.rbegin()->first;
  for (const auto& [n, d] : diffs_) {
    if (d.cols() != dim(n) || d.rows() != dim(n - 1))
      throw Error(errc::degree_mismatch,
                  "differential at degree " + std::to_string(n));
    auto lower = diffs_.find(n - 1);
    if (lower != diffs_.end() && !(lower->second * d).is_zero())
      throw Error(errc::sign_convention_failure,
                  "d o d != 0 at degree " + std::to_string(n));
  }
}

size_t ChainComplexQ::dim(int n) const {
  auto it = labels_.find(n);
  return it == labels_.end() ? 0 : it->second.size();
}

const std::vector<std::string>& ChainComplexQ::labels(int n) const {
  auto it = labels_.find(n);
  return it == labels_.end() ? empty_ : it->second;
}

Matrix ChainComplexQ::differential(int n) const {
  auto it = diffs_.find(n);
  if (it != diffs_.end()) return it->second;
  return Matrix(dim(n - 1), dim(n));
}

Matrix homology_representatives(const Matrix& d_out, const Matrix& d_in) {
  auto rki = rank_kernel_image(d_out);
  RowReducer span(d_out.cols());
  for (size_t c = 0; c < d_in.cols(); ++c) span.add(d_in.column(c));
  std::vector<Vec> reps;
  for (size_t c = 0; c < rki.kernel.cols(); ++c) {
    Vec v = rki.kernel.column(c);
    if (span.add(v)) reps.push_back(std::move(v));
  }
  return Matrix::from_columns(d_out.cols(), reps);
}

ChainComplexQ::Homology ChainComplexQ::homology(int n) const {
  if (n < min_deg_ || n > max_deg_)
    throw Error(errc::degree_out_of_range, std::to_string(n));
  Matrix reps = homology_representatives(differential(n), differential(n + 1));
  return Homology{reps.cols(), reps};
}

}  // namespace malcev
