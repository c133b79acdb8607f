// Copyright 2026 Softdec Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softdec/matching.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>

namespace softdec {

namespace {

// Primal-dual blossom method for maximum weight perfect matching on a dense
// graph, O(n^3). Real vertices are 1..n; contracted blossoms take ids above
// n. Follows the classical formulation with doubled slacks so every dual
// stays integral; duals may go negative, which is fine for the perfect
// variant. Edge weights must be strictly positive (0 marks "unset" on
// blossom pseudo-rows).
class WeightedBlossom {
 public:
  explicit WeightedBlossom(const std::vector<std::vector<int64_t>>& weights)
      : n(static_cast<int>(weights.size())), n_x(n) {
    int cap = 2 * n + 1;
    g.assign(cap, std::vector<EdgeSlot>(cap));
    lab.assign(cap, 0);
    match.assign(cap, 0);
    slack.assign(cap, 0);
    st.assign(cap, 0);
    pa.assign(cap, 0);
    side.assign(cap, -1);
    vis.assign(cap, 0);
    flower.assign(cap, {});
    flower_from.assign(cap, std::vector<int>(cap, 0));
    int64_t w_max = 0;
    for (int u = 1; u <= n; ++u) {
      st[u] = u;
      flower_from[u][u] = u;
      for (int v = 1; v <= n; ++v) {
        g[u][v] = {u, v, u == v ? 0 : weights[u - 1][v - 1]};
        w_max = std::max(w_max, g[u][v].w);
      }
    }
    for (int u = 1; u <= n; ++u) lab[u] = w_max;
  }

  /// Matched partner per real vertex (1-based); throws when no perfect
  /// matching exists.
  std::vector<int> solve() {
    int matched = 0;
    while (matched < n / 2) {
      if (!grow_and_augment()) throw std::runtime_error("no perfect matching exists");
      ++matched;
    }
    return match;
  }

 private:
  struct EdgeSlot {
    int u = 0, v = 0;
    int64_t w = 0;
  };

  int64_t slack_of(const EdgeSlot& e) const { return lab[e.u] + lab[e.v] - 2 * e.w; }

  void update_slack(int u, int x) {
    if (!slack[x] || slack_of(g[u][x]) < slack_of(g[slack[x]][x])) slack[x] = u;
  }

  void set_slack(int x) {
    slack[x] = 0;
    for (int u = 1; u <= n; ++u) {
      if (g[u][x].w > 0 && st[u] != x && side[st[u]] == 0) update_slack(u, x);
    }
  }

  void q_push(int x) {
    if (x <= n) {
      q.push_back(x);
    } else {
      for (int sub : flower[x]) q_push(sub);
    }
  }

  void set_st(int x, int b) {
    st[x] = b;
    if (x > n) {
      for (int sub : flower[x]) set_st(sub, b);
    }
  }

  int get_pr(int b, int xr) {
    int pr = static_cast<int>(std::find(flower[b].begin(), flower[b].end(), xr) -
                              flower[b].begin());
    if (pr % 2 == 1) {
      std::reverse(flower[b].begin() + 1, flower[b].end());
      return static_cast<int>(flower[b].size()) - pr;
    }
    return pr;
  }

  void set_match(int u, int v) {
    match[u] = g[u][v].v;
    if (u <= n) return;
    EdgeSlot e = g[u][v];
    int xr = flower_from[u][e.u];
    int pr = get_pr(u, xr);
    for (int i = 0; i < pr; ++i) set_match(flower[u][i], flower[u][i ^ 1]);
    set_match(xr, v);
    std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
  }

  void augment(int u, int v) {
    for (;;) {
      int xnv = st[match[u]];
      set_match(u, v);
      if (!xnv) return;
      set_match(xnv, st[pa[xnv]]);
      u = st[pa[xnv]];
      v = xnv;
    }
  }

  int get_lca(int u, int v) {
    ++lca_stamp;
    u = st[u];
    v = st[v];
    while (u || v) {
      if (u) {
        if (vis[u] == lca_stamp) return u;
        vis[u] = lca_stamp;
        u = st[match[u]];
        if (u) u = st[pa[u]];
      }
      std::swap(u, v);
    }
    return 0;
  }

  void add_blossom(int u, int anchor, int v) {
    int b = n + 1;
    while (b <= n_x && st[b]) ++b;
    if (b > n_x) ++n_x;
    lab[b] = 0;
    side[b] = 0;
    match[b] = match[anchor];
    flower[b].clear();
    flower[b].push_back(anchor);
    for (int x = u, y; x != anchor; x = st[pa[y]]) {
      flower[b].push_back(x);
      flower[b].push_back(y = st[match[x]]);
      q_push(y);
    }
    std::reverse(flower[b].begin() + 1, flower[b].end());
    for (int x = v, y; x != anchor; x = st[pa[y]]) {
      flower[b].push_back(x);
      flower[b].push_back(y = st[match[x]]);
      q_push(y);
    }
    set_st(b, b);
    for (int x = 1; x <= n_x; ++x) {
      g[b][x].w = 0;
      g[x][b].w = 0;
    }
    for (int x = 1; x <= n; ++x) flower_from[b][x] = 0;
    for (int xs : flower[b]) {
      for (int x = 1; x <= n_x; ++x) {
        if (g[b][x].w == 0 || slack_of(g[xs][x]) < slack_of(g[b][x])) {
          g[b][x] = g[xs][x];
          g[x][b] = g[x][xs];
        }
      }
      for (int x = 1; x <= n; ++x) {
        if (flower_from[xs][x]) flower_from[b][x] = xs;
      }
    }
    set_slack(b);
  }

  void expand_blossom(int b) {
    for (int sub : flower[b]) set_st(sub, sub);
    int xr = flower_from[b][g[b][pa[b]].u];
    int pr = get_pr(b, xr);
    for (int i = 0; i < pr; i += 2) {
      int xs = flower[b][i];
      int xns = flower[b][i + 1];
      pa[xs] = g[xns][xs].u;
      side[xs] = 1;
      side[xns] = 0;
      slack[xs] = 0;
      set_slack(xns);
      q_push(xns);
    }
    side[xr] = 1;
    pa[xr] = pa[b];
    for (size_t i = pr + 1; i < flower[b].size(); ++i) {
      side[flower[b][i]] = -1;
      set_slack(flower[b][i]);
    }
    st[b] = 0;
  }

  bool on_found_edge(const EdgeSlot& e) {
    int u = st[e.u];
    int v = st[e.v];
    if (side[v] == -1) {
      pa[v] = e.u;
      side[v] = 1;
      int nu = st[match[v]];
      slack[v] = 0;
      slack[nu] = 0;
      side[nu] = 0;
      q_push(nu);
    } else if (side[v] == 0) {
      int anchor = get_lca(u, v);
      if (!anchor) {
        augment(u, v);
        augment(v, u);
        return true;
      }
      add_blossom(u, anchor, v);
    }
    return false;
  }

  bool grow_and_augment() {
    std::fill(side.begin(), side.begin() + n_x + 1, -1);
    std::fill(slack.begin(), slack.begin() + n_x + 1, 0);
    q.clear();
    for (int x = 1; x <= n_x; ++x) {
      if (st[x] == x && !match[x]) {
        pa[x] = 0;
        side[x] = 0;
        q_push(x);
      }
    }
    if (q.empty()) return false;

    for (;;) {
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (side[st[u]] == 1) continue;
        for (int v = 1; v <= n; ++v) {
          if (g[u][v].w > 0 && st[u] != st[v]) {
            if (slack_of(g[u][v]) == 0) {
              if (on_found_edge(g[u][v])) return true;
            } else {
              update_slack(u, st[v]);
            }
          }
        }
      }
      int64_t d = std::numeric_limits<int64_t>::max();
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b && side[b] == 1) d = std::min(d, lab[b] / 2);
      }
      for (int x = 1; x <= n_x; ++x) {
        if (st[x] == x && slack[x]) {
          if (side[x] == -1) {
            d = std::min(d, slack_of(g[slack[x]][x]));
          } else if (side[x] == 0) {
            d = std::min(d, slack_of(g[slack[x]][x]) / 2);
          }
        }
      }
      if (d == std::numeric_limits<int64_t>::max()) return false;
      for (int u = 1; u <= n; ++u) {
        if (side[st[u]] == 0) {
          lab[u] -= d;
        } else if (side[st[u]] == 1) {
          lab[u] += d;
        }
      }
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b) {
          if (side[b] == 0) {
            lab[b] += 2 * d;
          } else if (side[b] == 1) {
            lab[b] -= 2 * d;
          }
        }
      }
      for (int x = 1; x <= n_x; ++x) {
        if (st[x] == x && slack[x] && st[slack[x]] != x && slack_of(g[slack[x]][x]) == 0) {
          if (on_found_edge(g[slack[x]][x])) return true;
        }
      }
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b && side[b] == 1 && lab[b] == 0) expand_blossom(b);
      }
    }
  }

  int n;
  int n_x;
  int lca_stamp = 0;
  std::vector<std::vector<EdgeSlot>> g;
  std::vector<int64_t> lab;
  std::vector<int> match, slack, st, pa, side, vis;
  std::vector<std::vector<int>> flower;
  std::vector<std::vector<int>> flower_from;
  std::deque<int> q;
};

}  // namespace

MatchingResult min_weight_perfect_matching(const std::vector<std::vector<double>>& weights) {
  int n = static_cast<int>(weights.size());
  if (n % 2 != 0) throw std::invalid_argument("perfect matching needs an even vertex count");
  MatchingResult result;
  if (n == 0) return result;
  if (n == 2) {
    result.weight = weights[0][1];
    result.pairs = {{0, 1}};
    return result;
  }

  double w_hi = -std::numeric_limits<double>::infinity();
  double w_lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!std::isfinite(weights[i][j])) throw std::invalid_argument("non-finite edge weight");
      w_hi = std::max(w_hi, weights[i][j]);
      w_lo = std::min(w_lo, weights[i][j]);
    }
  }
  if (w_hi - w_lo > 1e6) throw std::invalid_argument("edge weight range too large to scale");

  // Maximize the reversed, integer-scaled weights; the +1 keeps every scaled
  // weight strictly positive as the solver requires.
  const double scale = 1099511627776.0;  // 2^40
  std::vector<std::vector<int64_t>> scaled(n, std::vector<int64_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) scaled[i][j] = llround((w_hi - weights[i][j]) * scale) + 1;
    }
  }
  std::vector<int> partner = WeightedBlossom(scaled).solve();
  for (int u = 1; u <= n; ++u) {
    int v = partner[u];
    if (v > u) {
      result.pairs.emplace_back(u - 1, v - 1);
      result.weight += weights[u - 1][v - 1];
    }
  }
  return result;
}

}  // namespace softdec
