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

#include <cstdint>
#include <vector>

#include "hgc/graph.hpp"

namespace hgc {

// Three-type citation-style graph: target "paper" plus "author" and
// "subject", relations declared in both directions (pa/ap, ps/sp).
// Each class splits into unequal modes (sub-communities). Author and subject
// features carry the class and mode signal; raw paper features carry a weak
// class signal only. Papers draw their neighbors mostly from their own
// community, except a "confused" fraction drawing mostly from other classes.
// Classes differ in size and in feature spread.
struct SyntheticSpec {
  std::size_t papers = 3000;
  std::size_t authors = 1500;
  std::size_t subjects = 90;
  int classes = 3;
  std::size_t paper_dim = 32;
  std::size_t aux_dim = 32;
  std::vector<double> class_weights = {0.45, 0.33, 0.22};
  std::vector<double> class_spread = {1.2, 0.8, 0.5};
  double separation = 3.0;       // norm of aux-space class centers
  double raw_separation = 1.2;   // norm of raw paper-feature class centers
  std::vector<double> mode_weights = {0.7, 0.3};
  double mode_offset = 3.0;      // norm of a mode center around its class center
  double confused_fraction = 0.15;
  double train_fraction = 0.6;
  double val_fraction = 0.1;
  std::uint64_t seed = 7;
};

HeteroGraph make_synthetic_graph(const SyntheticSpec& spec);

// Metapaths matching make_synthetic_graph.
inline constexpr const char* kSyntheticMetapaths = "paper-author,paper-subject";

// Random graph with the DBLP node/edge counts: author (target, 4 classes),
// paper, term, venue; 26,128 nodes and 239,566 edges over 6 edge types.
HeteroGraph make_dblp_layout_graph(std::uint64_t seed = 1, std::size_t author_dim = 16);

}  // namespace hgc
