#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace hrks {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed-row matrix built from triplets. Duplicate entries are summed
/// in insertion order, so assembling cells in canonical order yields the
/// same bits regardless of how the contributions were computed. Exact zeros
/// are dropped on finalization.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> triplets);

  int nnz() const { return static_cast<int>(values.size()); }
  double max_abs() const;
  /// max |K - K^T| over all entries.
  double asymmetry() const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::SparseMatrix<double> to_eigen() const;

  /// Coordinate text dump, one "i j value" line per entry.
  void dump_coordinate(const std::string& path) const;
};

/// Saddle/bordered assembly helper: places blocks of an n x n block layout.
struct BlockBuilder {
  explicit BlockBuilder(std::vector<int> block_sizes);

  /// Adds block (bi, bj); with transposed=true adds the transpose of m into
  /// block (bi, bj).
  void add_block(int bi, int bj, const SparseMatrix& m, bool transposed = false);
  SparseMatrix assemble() const;

  int offset(int b) const { return offsets_[b]; }
  int total() const { return total_; }

 private:
  std::vector<int> offsets_;
  int total_ = 0;
  std::vector<Triplet> triplets_;
};

}  // namespace hrks
