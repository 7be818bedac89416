#pragma once

#include <Eigen/Sparse>

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stdgsem/system.hpp"

namespace stdgsem {

struct SparsityPattern {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> entries;  // sorted row-major, unique

  bool operator==(const SparsityPattern& other) const {
    return rows == other.rows && cols == other.cols &&
           entries == other.entries;
  }
  int nnz() const { return int(entries.size()); }
};

// Entries with |A_ij| > tol; default tol is 1e-14 relative to max|A|.
inline SparsityPattern sparsity_of(const SparseMat& A,
                                   std::optional<double> tol = std::nullopt) {
  double max_abs = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      max_abs = std::max(max_abs, std::abs(it.value()));
  const double gate = tol.value_or(1e-14 * max_abs);
  if (gate < 0) throw std::invalid_argument("sparsity_of: tol >= 0");
  SparsityPattern pattern;
  pattern.rows = int(A.rows());
  pattern.cols = int(A.cols());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      if (std::abs(it.value()) > gate)
        pattern.entries.emplace_back(int(it.row()), int(it.col()));
  std::sort(pattern.entries.begin(), pattern.entries.end());
  return pattern;
}

inline SparsityPattern sparsity_of(const Mat<>& A,
                                   std::optional<double> tol = std::nullopt) {
  return sparsity_of(SparseMat(A.sparseView(1.0, 0.0)), tol);
}

enum class NodeOrder { time_major, dune_like };

// p[k] = stage-major source index placed at target slot k.  Stage-major means
// index = stage * n_xi + node.  time_major interleaves to node-major;
// dune_like reproduces the vertex -> edge -> interior lattice numbering of a
// DUNE-style reference square (our reconstruction), with the spatial node as
// the x coordinate and the stage as the y coordinate.
inline std::vector<int> time_lex_permutation(int n_tau, int n_xi,
                                             NodeOrder target) {
  if (n_tau < 1 || n_xi < 1)
    throw std::invalid_argument("time_lex_permutation: sizes >= 1");
  const int n = n_tau * n_xi;
  std::vector<int> p;
  p.reserve(n);
  if (target == NodeOrder::time_major) {
    for (int node = 0; node < n_xi; ++node)
      for (int stage = 0; stage < n_tau; ++stage)
        p.push_back(stage * n_xi + node);
    return p;
  }
  if (n_tau == 1) {
    for (int k = 0; k < n; ++k) p.push_back(k);
    return p;
  }
  std::vector<bool> visited(n, false);
  auto push = [&](int x, int y) {
    const int src = y * n_xi + x;
    if (!visited[src]) {
      visited[src] = true;
      p.push_back(src);
    }
  };
  const int X = n_xi - 1, Y = n_tau - 1;
  push(0, 0);
  push(X, 0);
  push(0, Y);
  push(X, Y);
  for (int y = 1; y < Y; ++y) push(0, y);
  for (int y = 1; y < Y; ++y) push(X, y);
  for (int x = 1; x < X; ++x) push(x, 0);
  for (int x = 1; x < X; ++x) push(x, Y);
  for (int y = 1; y < Y; ++y)
    for (int x = 1; x < X; ++x) push(x, y);
  return p;
}

// (P J P^T)[a][b] = J[p[a]][p[b]].
inline SparseMat permute_matrix(const SparseMat& J, const std::vector<int>& p) {
  if (int(p.size()) != J.rows() || J.rows() != J.cols())
    throw std::invalid_argument("permute_matrix: size mismatch");
  std::vector<int> inv(p.size());
  for (size_t k = 0; k < p.size(); ++k) inv[p[k]] = int(k);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < J.outerSize(); ++k)
    for (SparseMat::InnerIterator it(J, k); it; ++it)
      triplets.emplace_back(inv[it.row()], inv[it.col()], it.value());
  SparseMat out(J.rows(), J.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

inline SparsityPattern permute_pattern(const SparsityPattern& pattern,
                                       const std::vector<int>& p) {
  if (int(p.size()) != pattern.rows || pattern.rows != pattern.cols)
    throw std::invalid_argument("permute_pattern: size mismatch");
  std::vector<int> inv(p.size());
  for (size_t k = 0; k < p.size(); ++k) inv[p[k]] = int(k);
  SparsityPattern out;
  out.rows = pattern.rows;
  out.cols = pattern.cols;
  for (const auto& [row, col] : pattern.entries)
    out.entries.emplace_back(inv[row], inv[col]);
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

// Plain-text portable bitmap, one image bit per matrix entry.
inline void write_pbm(const SparsityPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_pbm: cannot open " + path);
  out << "P1\n" << pattern.cols << " " << pattern.rows << "\n";
  size_t next = 0;
  for (int row = 0; row < pattern.rows; ++row) {
    for (int col = 0; col < pattern.cols; ++col) {
      const bool set = next < pattern.entries.size() &&
                       pattern.entries[next] == std::make_pair(row, col);
      if (set) ++next;
      out << (set ? '1' : '0');
      out << (col + 1 == pattern.cols || (col + 1) % 64 == 0 ? '\n' : ' ');
    }
  }
}

inline void write_pattern_csv(const SparsityPattern& pattern,
                              const std::string& path,
                              const std::string& label) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_pattern_csv: cannot open " + path);
  out << "# stdgsem-csv v1 " << label << "\n";
  out << "row,col\n";
  for (const auto& [row, col] : pattern.entries)
    out << row << "," << col << "\n";
}

}  // namespace stdgsem
