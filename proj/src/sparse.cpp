// Copyright 2026 The HGC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hgc/sparse.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace hgc {

template <typename T>
DenseMatrix<T>::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("DenseMatrix: value count " + std::to_string(values_.size()) +
                                " does not match shape " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

template class DenseMatrix<float>;
template class DenseMatrix<double>;

bool bit_identical(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.data().empty()) return true;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

SparseAdjacency::SparseAdjacency(std::size_t rows, std::size_t cols,
                                 std::vector<std::uint64_t> offsets, std::vector<NodeId> indices,
                                 std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(offsets)),
      indices_(std::move(indices)),
      values_(std::move(values)) {
  if (offsets_.size() != rows_ + 1) {
    throw std::invalid_argument("SparseAdjacency: offsets must have rows+1 entries");
  }
  if (indices_.size() != values_.size()) {
    throw std::invalid_argument("SparseAdjacency: indices/values length mismatch");
  }
}

SparseAdjacency SparseAdjacency::from_edges(std::size_t rows, std::size_t cols,
                                            std::vector<EdgeRecord> edges, std::size_t* merged) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].src >= rows || edges[i].dst >= cols) {
      throw DataError("edge record " + std::to_string(i) + " (" + std::to_string(edges[i].src) +
                      ", " + std::to_string(edges[i].dst) + ") outside shape " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  SparseAdjacency out(rows, cols);
  out.indices_.reserve(edges.size());
  out.values_.reserve(edges.size());
  std::size_t folded = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (i > 0 && edges[i - 1].src == e.src && edges[i - 1].dst == e.dst) {
      out.values_.back() += e.value;
      ++folded;
      continue;
    }
    out.indices_.push_back(e.dst);
    out.values_.push_back(e.value);
    ++out.offsets_[e.src + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) out.offsets_[r + 1] += out.offsets_[r];
  if (merged) *merged = folded;
  return out;
}

std::vector<EdgeRecord> SparseAdjacency::to_edges() const {
  std::vector<EdgeRecord> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      out.push_back({static_cast<NodeId>(r), indices_[k], values_[k]});
    }
  }
  return out;
}

}  // namespace hgc
