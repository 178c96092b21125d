#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scldpc {

// Matrix of circulant exponents. Entry s >= 0 marks a Theta x Theta identity
// rotated by s; kEmpty marks an all-zero block.
class ExponentMatrix {
 public:
  static constexpr int kEmpty = -1;

  ExponentMatrix() = default;
  ExponentMatrix(int rows, int cols, int fill = kEmpty)
      : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ExponentMatrix: empty shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  int at(int r, int c) const { return entries_[index(r, c)]; }
  int& at(int r, int c) { return entries_[index(r, c)]; }

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw std::out_of_range("ExponentMatrix: index out of range");
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int32_t> entries_;
};

// Binary parity-check matrix in row-adjacency form: for each lifted row, the
// ascending list of columns holding a 1. Blocks are rotated identities, so
// every lifted row of a nonempty block contributes exactly one column.
struct LiftedPcm {
  int lifting = 0;
  int cols = 0;
  std::vector<std::vector<std::uint32_t>> row_cols;

  int rows() const { return static_cast<int>(row_cols.size()); }
};

// Expands E into its binary matrix with lifting factor theta. A block with
// exponent s has a 1 at (r, (r + s) mod theta) of the block, i.e. row r of
// the block checks column r+s of the block column.
inline LiftedPcm lift(const ExponentMatrix& e, int theta) {
  if (theta < 1) throw std::invalid_argument("lift: lifting factor must be >= 1");
  LiftedPcm h;
  h.lifting = theta;
  h.cols = e.cols() * theta;
  h.row_cols.assign(static_cast<std::size_t>(e.rows()) * theta, {});
  for (int br = 0; br < e.rows(); ++br) {
    for (int bc = 0; bc < e.cols(); ++bc) {
      int s = e.at(br, bc);
      if (s == ExponentMatrix::kEmpty) continue;
      if (s < 0 || s >= theta)
        throw std::invalid_argument("lift: exponent " + std::to_string(s) +
                                    " outside [0, theta)");
      for (int r = 0; r < theta; ++r) {
        int c = r + s;
        if (c >= theta) c -= theta;
        h.row_cols[static_cast<std::size_t>(br) * theta + r].push_back(
            static_cast<std::uint32_t>(bc) * theta + c);
      }
    }
  }
  for (auto& cols : h.row_cols) std::sort(cols.begin(), cols.end());
  return h;
}

// Algebraic 4-cycle test on the exponent matrix: a length-4 cycle in the
// lifted graph exists iff two rows and two columns with all four blocks
// nonempty satisfy s11 - s21 + s22 - s12 == 0 (mod theta). Only column pairs
// whose supports overlap in at least two rows can qualify.
inline bool has_four_cycle(const ExponentMatrix& e, int theta) {
  if (theta < 1) throw std::invalid_argument("has_four_cycle: lifting factor must be >= 1");
  const int rows = e.rows();
  const int cols = e.cols();
  for (int i1 = 0; i1 < cols; ++i1) {
    for (int i2 = i1 + 1; i2 < cols; ++i2) {
      std::vector<int> common;
      for (int r = 0; r < rows; ++r)
        if (e.at(r, i1) != ExponentMatrix::kEmpty && e.at(r, i2) != ExponentMatrix::kEmpty)
          common.push_back(r);
      for (std::size_t a = 0; a < common.size(); ++a) {
        for (std::size_t b = a + 1; b < common.size(); ++b) {
          int j1 = common[a], j2 = common[b];
          long long d = static_cast<long long>(e.at(j1, i1)) - e.at(j2, i1) + e.at(j2, i2) -
                        e.at(j1, i2);
          if (((d % theta) + theta) % theta == 0) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace scldpc
