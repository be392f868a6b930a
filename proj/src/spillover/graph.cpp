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

#include "spillover/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "spillover/error.hpp"

namespace spillover {

InterferenceGraph::InterferenceGraph(std::size_t n) : in_(n), out_(n) {}

InterferenceGraph InterferenceGraph::from_neighbor_lists(
    std::vector<std::vector<std::uint32_t>> neighbor_lists) {
  InterferenceGraph g;
  const std::size_t n = neighbor_lists.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = neighbor_lists[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (auto j : list) {
      if (j >= n) {
        Fail(ErrorCode::kOutOfRange,
             "neighbor " + std::to_string(j + 1) + " of unit " +
                 std::to_string(i + 1) + " outside 1.." + std::to_string(n));
      }
      if (j == i) {
        Fail(ErrorCode::kInvalidArgument,
             "self-loop at unit " + std::to_string(i + 1));
      }
    }
  }
  g.in_ = std::move(neighbor_lists);
  g.build_reverse();
  return g;
}

InterferenceGraph InterferenceGraph::from_edges(
    std::size_t n,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (const auto& [unit, neighbor] : edges) {
    if (unit >= n) {
      Fail(ErrorCode::kOutOfRange, "unit " + std::to_string(unit + 1) +
                                       " outside 1.." + std::to_string(n));
    }
    lists[unit].push_back(neighbor);
  }
  return from_neighbor_lists(std::move(lists));
}

InterferenceGraph InterferenceGraph::circulant(std::size_t n,
                                               std::size_t half_width) {
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "circulant graph needs n >= 1");
  if (2 * half_width >= n) {
    Fail(ErrorCode::kInvalidArgument,
         "circulant half-width " + std::to_string(half_width) +
             " needs n > " + std::to_string(2 * half_width));
  }
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= half_width; ++k) {
      lists[i].push_back(static_cast<std::uint32_t>((i + k) % n));
      lists[i].push_back(static_cast<std::uint32_t>((i + n - k) % n));
    }
  }
  return from_neighbor_lists(std::move(lists));
}

InterferenceGraph InterferenceGraph::complete(std::size_t n) {
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) lists[i].push_back(static_cast<std::uint32_t>(j));
    }
  }
  return from_neighbor_lists(std::move(lists));
}

void InterferenceGraph::build_reverse() {
  out_.assign(in_.size(), {});
  for (std::size_t i = 0; i < in_.size(); ++i) {
    for (auto j : in_[i]) out_[j].push_back(static_cast<std::uint32_t>(i));
  }
}

std::size_t InterferenceGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& list : in_) total += list.size();
  return total;
}

bool InterferenceGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto& list = in_[i];
  return std::binary_search(list.begin(), list.end(),
                            static_cast<std::uint32_t>(j));
}

std::optional<std::size_t> InterferenceGraph::regular_degree() const {
  if (in_.empty()) return std::nullopt;
  const std::size_t d = in_.front().size();
  for (const auto& list : in_) {
    if (list.size() != d) return std::nullopt;
  }
  return d;
}

bool InterferenceGraph::contains(const InterferenceGraph& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::includes(in_[i].begin(), in_[i].end(), other.in_[i].begin(),
                       other.in_[i].end())) {
      return false;
    }
  }
  return true;
}

InterferenceGraph InterferenceGraph::symmetrized() const {
  auto lists = in_;
  for (std::size_t i = 0; i < size(); ++i) {
    lists[i].insert(lists[i].end(), out_[i].begin(), out_[i].end());
  }
  return from_neighbor_lists(std::move(lists));
}

namespace {

std::string location(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

InterferenceGraph parse_edge_list(std::istream& in, const std::string& source) {
  std::optional<std::size_t> n;
  std::vector<std::vector<std::uint32_t>> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;

    if (!n) {
      long long count = 0;
      if (first != "n" || !(fields >> count) || count <= 0) {
        Fail(ErrorCode::kConfig, location(source, line_no) +
                                     "expected header 'n <count>'");
      }
      n = static_cast<std::size_t>(count);
      lists.assign(*n, {});
      continue;
    }

    long long i = 0;
    long long j = 0;
    std::istringstream pair(line);
    std::string trailing;
    if (!(pair >> i >> j) || (pair >> trailing)) {
      Fail(ErrorCode::kConfig,
           location(source, line_no) + "expected 'i j' edge pair");
    }
    const auto bound = static_cast<long long>(*n);
    if (i < 1 || i > bound || j < 1 || j > bound) {
      Fail(ErrorCode::kConfig, location(source, line_no) + "unit index outside 1.." +
                                   std::to_string(*n));
    }
    if (i == j) {
      Fail(ErrorCode::kConfig, location(source, line_no) + "self-loop");
    }
    lists[static_cast<std::size_t>(i - 1)].push_back(
        static_cast<std::uint32_t>(j - 1));
  }
  if (!n) Fail(ErrorCode::kConfig, source + ": missing 'n <count>' header");
  return InterferenceGraph::from_neighbor_lists(std::move(lists));
}

InterferenceGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open graph file '" + path + "'");
  return parse_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const InterferenceGraph& graph) {
  out << "n " << graph.size() << '\n';
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (auto j : graph.neighbors(i)) out << i + 1 << ' ' << j + 1 << '\n';
  }
}

}  // namespace spillover
