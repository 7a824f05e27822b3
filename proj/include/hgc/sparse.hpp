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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hgc/common.hpp"

namespace hgc {

// Dense row-major matrix. FeatureMatrix (float storage) is the common case;
// the double instantiation is used where 64-bit results are wanted.
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  T operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<T> data() { return values_; }
  std::span<const T> data() const { return values_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

using FeatureMatrix = DenseMatrix<float>;

// Bit-level equality (distinguishes -0.0f from 0.0f and compares NaN payloads).
bool bit_identical(const FeatureMatrix& a, const FeatureMatrix& b);

struct EdgeRecord {
  NodeId src = 0;
  NodeId dst = 0;
  double value = 1.0;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

// Compressed sparse row relation matrix between a source and a destination
// node type. Canonical form: column indices strictly increasing per row.
class SparseAdjacency {
 public:
  SparseAdjacency() : offsets_(1, 0) {}
  SparseAdjacency(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  // Takes raw CSR arrays as-is; validate() on the owning graph checks them.
  SparseAdjacency(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> offsets,
                  std::vector<NodeId> indices, std::vector<double> values);

  // Canonicalizes an edge list: sorts by (src, dst) and merges duplicate
  // pairs by summing their values. `merged`, if given, receives the number
  // of records folded into an earlier one. Throws DataError on out-of-range
  // endpoints.
  static SparseAdjacency from_edges(std::size_t rows, std::size_t cols,
                                    std::vector<EdgeRecord> edges,
                                    std::size_t* merged = nullptr);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return indices_.size(); }

  std::span<const std::uint64_t> offsets() const { return offsets_; }
  std::span<const NodeId> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const NodeId> row_indices(std::size_t r) const {
    return {indices_.data() + offsets_[r], indices_.data() + offsets_[r + 1]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + offsets_[r], values_.data() + offsets_[r + 1]};
  }

  std::vector<EdgeRecord> to_edges() const;

  friend bool operator==(const SparseAdjacency&, const SparseAdjacency&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> indices_;
  std::vector<double> values_;
};

}  // namespace hgc
