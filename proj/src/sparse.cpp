#include "hrks/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hrks {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> triplets) {
  // Stable sort by (row, col) keeps insertion order within a key, so the
  // summation order is the canonical one the caller produced.
  std::vector<int> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (triplets[a].row != triplets[b].row)
      return triplets[a].row < triplets[b].row;
    return triplets[a].col < triplets[b].col;
  });

  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  std::size_t i = 0;
  while (i < order.size()) {
    const int r = triplets[order[i]].row;
    const int c = triplets[order[i]].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::out_of_range("triplet index out of range");
    double v = 0.0;
    while (i < order.size() && triplets[order[i]].row == r &&
           triplets[order[i]].col == c)
      v += triplets[order[i++]].value;
    if (v != 0.0) {
      m.col_idx.push_back(c);
      m.values.push_back(v);
      ++m.row_ptr[r + 1];
    }
  }
  for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

double SparseMatrix::max_abs() const {
  double v = 0.0;
  for (double x : values) v = std::max(v, std::abs(x));
  return v;
}

double SparseMatrix::asymmetry() const {
  if (rows != cols) return max_abs();
  const Eigen::SparseMatrix<double> a = to_eigen();
  const Eigen::SparseMatrix<double> d = a - Eigen::SparseMatrix<double>(a.transpose());
  double v = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      y(r) += values[k] * x(col_idx[k]);
  return y;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  Eigen::SparseMatrix<double> a(rows, cols);
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(values.size());
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      ts.emplace_back(r, col_idx[k], values[k]);
  a.setFromTriplets(ts.begin(), ts.end());
  return a;
}

void SparseMatrix::dump_coordinate(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix dump: " + path);
  char buf[96];
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, col_idx[k], values[k]);
      out << buf;
    }
}

BlockBuilder::BlockBuilder(std::vector<int> block_sizes) {
  offsets_.resize(block_sizes.size());
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    offsets_[b] = total_;
    total_ += block_sizes[b];
  }
}

void BlockBuilder::add_block(int bi, int bj, const SparseMatrix& m,
                             bool transposed) {
  const int r0 = offsets_[bi];
  const int c0 = offsets_[bj];
  for (int r = 0; r < m.rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      if (transposed)
        triplets_.push_back({r0 + m.col_idx[k], c0 + r, m.values[k]});
      else
        triplets_.push_back({r0 + r, c0 + m.col_idx[k], m.values[k]});
    }
}

SparseMatrix BlockBuilder::assemble() const {
  return SparseMatrix::from_triplets(total_, total_, triplets_);
}

}  // namespace hrks
