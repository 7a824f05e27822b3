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

#include <filesystem>

#include <json.hpp>

#include "hgc/graph.hpp"

namespace hgc {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kLabelsFile = "labels.tsv";
inline constexpr const char* kSplitsFile = "splits.tsv";

std::string edge_file_name(const EdgeType& e);
std::string feature_file_name(const NodeType& t);

// Reads a dataset directory:
//   manifest.json, edges_<name>.tsv, features_<type>.bin (or .csv),
//   labels.tsv, splits.tsv
// Every record is range- and shape-checked; errors are DataError naming
// the file and 1-based line (or record index for binary files). Duplicate
// edges are merged and reported as warnings when `warnings` is given.
HeteroGraph load_dataset(const std::filesystem::path& dir, ValidationReport* warnings = nullptr);

nlohmann::json read_manifest(const std::filesystem::path& dir);

// Writes `g` in the layout load_dataset reads, with per-file checksums and
// the provenance object embedded in the manifest. The directory is staged
// under a temporary name and renamed into place. A non-empty existing
// directory is only replaced when `overwrite` is set (UsageError otherwise).
void save_dataset(const HeteroGraph& g, const std::filesystem::path& dir,
                  const nlohmann::json& provenance = nlohmann::json::object(),
                  bool overwrite = false);

// Binary feature file helpers ("HGF1", u32 rows, u32 cols, f32 LE row-major).
void write_feature_bin(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_feature_bin(const std::filesystem::path& path);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

// Writes `text` to `path` through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace hgc
