// Copyright 2025 The conic-splitter Authors
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

#include "conic/ordering.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

namespace conic {

namespace {

// Symmetrized strict-off-diagonal adjacency lists.
std::vector<std::vector<int>> build_adjacency(const SparseMatrix& s) {
  const int n = s.cols();
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j) {
    for (int p = s.col_ptr()[j]; p < s.col_ptr()[j + 1]; ++p) {
      const int i = s.row_idx()[p];
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& lst : adj) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  return adj;
}

}  // namespace

std::vector<int> symbolic_order(const SparseMatrix& s) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("ordering requires a square matrix");
  const int n = s.cols();
  std::vector<int> perm;
  perm.reserve(n);
  if (n == 0) return perm;

  std::vector<std::vector<int>> var_adj = build_adjacency(s);
  // Element e is created when node e is eliminated; node and element id
  // spaces coincide and never overlap in time.
  std::vector<std::vector<int>> elem_adj(n);   // live elements containing i
  std::vector<std::vector<int>> elem_nodes(n); // live members of element e
  std::vector<bool> alive(n, true);
  std::vector<bool> elem_alive(n, false);
  std::vector<int> degree(n);
  std::vector<int> in_front(n, -1);   // stamp: member of current pivot element
  std::vector<int> elem_stamp(n, -1); // stamp: |L_e \ Lp| counter initialized
  std::vector<int> elem_w(n, 0);

  std::set<std::pair<int, int>> heap;  // (degree, node)
  for (int i = 0; i < n; ++i) {
    degree[i] = static_cast<int>(var_adj[i].size());
    heap.emplace(degree[i], i);
  }

  std::vector<int> front;  // Lp, members of the new element
  for (int step = 0; step < n; ++step) {
    const auto [dp, p] = *heap.begin();
    heap.erase(heap.begin());
    (void)dp;
    alive[p] = false;
    perm.push_back(p);

    // Lp = (A_p  U  union of member lists of p's elements) \ {p, eliminated}
    front.clear();
    for (int j : var_adj[p]) {
      if (alive[j] && in_front[j] != step) {
        in_front[j] = step;
        front.push_back(j);
      }
    }
    for (int e : elem_adj[p]) {
      if (!elem_alive[e]) continue;
      for (int j : elem_nodes[e]) {
        if (alive[j] && in_front[j] != step) {
          in_front[j] = step;
          front.push_back(j);
        }
      }
      elem_alive[e] = false;  // absorbed into the new element
    }
    var_adj[p].clear();
    var_adj[p].shrink_to_fit();
    elem_adj[p].clear();

    elem_nodes[p] = front;
    elem_alive[p] = true;
    const int front_size = static_cast<int>(front.size());

    // Prune neighbor lists: edges inside Lp are now covered by element p.
    for (int i : front) {
      auto& ai = var_adj[i];
      ai.erase(std::remove_if(ai.begin(), ai.end(),
                              [&](int j) { return !alive[j] || in_front[j] == step; }),
               ai.end());
      auto& ei = elem_adj[i];
      ei.erase(std::remove_if(ei.begin(), ei.end(),
                              [&](int e) { return !elem_alive[e]; }),
               ei.end());
      ei.push_back(p);
    }

    // w[e] = |L_e \ Lp| for every element adjacent to the front, computed by
    // initializing with the live member count and decrementing per member
    // found in Lp.
    for (int i : front) {
      for (int e : elem_adj[i]) {
        if (e == p || !elem_alive[e]) continue;
        if (elem_stamp[e] != step) {
          auto& members = elem_nodes[e];
          members.erase(std::remove_if(members.begin(), members.end(),
                                       [&](int j) { return !alive[j]; }),
                        members.end());
          elem_w[e] = static_cast<int>(members.size());
          elem_stamp[e] = step;
        }
        --elem_w[e];
      }
    }

    // Approximate external degree and absorption of covered elements.
    for (int i : front) {
      int d = static_cast<int>(var_adj[i].size()) + front_size - 1;
      for (int e : elem_adj[i]) {
        if (e == p || !elem_alive[e]) continue;
        if (elem_w[e] <= 0) {
          elem_alive[e] = false;
        } else {
          d += elem_w[e];
        }
      }
      d = std::min(d, std::max(0, n - step - 2));  // at most all other live nodes
      heap.erase({degree[i], i});
      degree[i] = d;
      heap.emplace(d, i);
    }
  }
  return perm;
}

}  // namespace conic
