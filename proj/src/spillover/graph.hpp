// Copyright 2026 The Spillover Authors
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

#ifndef SPILLOVER_GRAPH_HPP_
#define SPILLOVER_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spillover {

// Directed influence structure. neighbors(i) holds every j whose treatment
// may affect unit i (edge j -> i); influenced(j) is the reverse view.
// Neighbor lists are sorted, duplicate-free and never contain i itself.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;

  // Graph on n units with no edges.
  explicit InterferenceGraph(std::size_t n);

  // neighbor_lists[i] = units influencing i (0-based). Duplicates are merged;
  // self-loops and out-of-range indices throw.
  static InterferenceGraph from_neighbor_lists(
      std::vector<std::vector<std::uint32_t>> neighbor_lists);

  // Edges as (unit, neighbor) pairs, 0-based.
  static InterferenceGraph from_edges(
      std::size_t n,
      std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

  // Each unit adjacent to its `half_width` predecessors and successors on a
  // ring; degree 2 * half_width.
  static InterferenceGraph circulant(std::size_t n, std::size_t half_width);

  // Every ordered pair (i, j), i != j.
  static InterferenceGraph complete(std::size_t n);

  std::size_t size() const noexcept { return in_.size(); }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return in_[i];
  }
  std::span<const std::uint32_t> influenced(std::size_t j) const {
    return out_[j];
  }
  std::size_t degree(std::size_t i) const { return in_[i].size(); }
  std::size_t edge_count() const noexcept;

  // True when j is listed as a neighbor of i.
  bool has_edge(std::size_t i, std::size_t j) const;

  // Common in-degree when every unit has the same number of neighbors.
  std::optional<std::size_t> regular_degree() const;

  // True when every neighbor list of `other` is contained in this graph's.
  bool contains(const InterferenceGraph& other) const;

  InterferenceGraph symmetrized() const;

 private:
  void build_reverse();

  std::vector<std::vector<std::uint32_t>> in_;
  std::vector<std::vector<std::uint32_t>> out_;
};

// Plain-text edge list: a required "n <count>" header, then one "i j" pair
// per line meaning j is a neighbor of i (j -> i). 1-indexed, '#' comments.
InterferenceGraph parse_edge_list(std::istream& in,
                                  const std::string& source = "<stream>");
InterferenceGraph load_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const InterferenceGraph& graph);

}  // namespace spillover

#endif  // SPILLOVER_GRAPH_HPP_
