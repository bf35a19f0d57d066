#include "decoder.hpp"

#include <algorithm>

#include "conllu.hpp"

namespace arbor {

ArcScores ArcScores::make(int n) {
  ArcScores s;
  s.n = n;
  s.table.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
  for (int d = 1; d <= n; ++d) s.set(d, d, kNegativeInfinity);
  return s;
}

double tree_score(const ArcScores& scores, std::span<const int> heads) {
  double total = 0.0;
  for (int d = 1; d <= scores.n; ++d) total += scores.score(heads[d - 1], d);
  return total;
}

namespace {

using WeightMatrix = std::vector<std::vector<double>>;

// Recursive greedy-and-contract maximum arborescence rooted at node 0.
// Nodes are 0..m-1; w[h][d] = -inf marks a missing arc. Returns the parent
// of every node >= 1. Ties go to the smallest head index.
std::vector<int> cle(const WeightMatrix& w) {
  const int m = static_cast<int>(w.size());
  std::vector<int> par(m, -1);
  for (int d = 1; d < m; ++d) {
    int best = -1;
    for (int h = 0; h < m; ++h) {
      if (h == d || w[h][d] == kNegativeInfinity) continue;
      if (best == -1 || w[h][d] > w[best][d]) best = h;
    }
    if (best == -1) fail(ErrorCode::InvalidArg, "node has no admissible head");
    par[d] = best;
  }

  std::vector<int> cycle;
  std::vector<int> color(m, 0);  // 0 unvisited, 1 on path, 2 done
  color[0] = 2;
  for (int start = 1; start < m && cycle.empty(); ++start) {
    if (color[start] != 0) continue;
    std::vector<int> path;
    int j = start;
    while (true) {
      if (color[j] == 1) {
        int k = j;
        do {
          cycle.push_back(k);
          k = par[k];
        } while (k != j);
        break;
      }
      if (color[j] == 2) break;
      color[j] = 1;
      path.push_back(j);
      j = par[j];
    }
    for (int p : path) color[p] = 2;
  }
  if (cycle.empty()) return par;

  std::vector<bool> in_cycle(m, false);
  for (int c : cycle) in_cycle[c] = true;

  std::vector<int> to_new(m, -1);
  int contracted = 0;
  for (int v = 0; v < m; ++v)
    if (!in_cycle[v]) to_new[v] = contracted++;
  const int super = contracted;
  const int m2 = contracted + 1;

  WeightMatrix w2(m2, std::vector<double>(m2, kNegativeInfinity));
  std::vector<int> enter_choice(m, -1);  // per outside head: cycle node entered
  std::vector<int> leave_choice(m, -1);  // per outside dependent: cycle head used

  for (int h = 0; h < m; ++h) {
    if (in_cycle[h]) continue;
    for (int d = 1; d < m; ++d) {
      if (in_cycle[d] || h == d) continue;
      w2[to_new[h]][to_new[d]] = w[h][d];
    }
  }
  for (int h = 0; h < m; ++h) {
    if (in_cycle[h]) continue;
    double best = kNegativeInfinity;
    int best_d = -1;
    for (int d : cycle) {
      if (w[h][d] == kNegativeInfinity) continue;
      double adjusted = w[h][d] - w[par[d]][d];
      if (best_d == -1 || adjusted > best) {
        best = adjusted;
        best_d = d;
      }
    }
    if (best_d != -1) {
      w2[to_new[h]][super] = best;
      enter_choice[h] = best_d;
    }
  }
  for (int d = 1; d < m; ++d) {
    if (in_cycle[d]) continue;
    double best = kNegativeInfinity;
    int best_h = -1;
    for (int h : cycle) {
      if (w[h][d] == kNegativeInfinity) continue;
      if (best_h == -1 || w[h][d] > best) {
        best = w[h][d];
        best_h = h;
      }
    }
    if (best_h != -1) {
      w2[super][to_new[d]] = best;
      leave_choice[d] = best_h;
    }
  }

  std::vector<int> par2 = cle(w2);

  std::vector<int> from_new(m2, -1);
  for (int v = 0; v < m; ++v)
    if (to_new[v] != -1) from_new[to_new[v]] = v;

  std::vector<int> result(m, -1);
  int entered_at = -1;
  int entered_from = -1;
  for (int d2 = 1; d2 < m2; ++d2) {
    int h2 = par2[d2];
    if (d2 == super) {
      entered_from = from_new[h2];
      entered_at = enter_choice[entered_from];
    } else {
      int d = from_new[d2];
      result[d] = h2 == super ? leave_choice[d] : from_new[h2];
    }
  }
  for (int c : cycle) result[c] = c == entered_at ? entered_from : par[c];
  return result;
}

WeightMatrix full_weights(const ArcScores& scores) {
  const int n = scores.n;
  WeightMatrix w(n + 1, std::vector<double>(n + 1, kNegativeInfinity));
  for (int d = 1; d <= n; ++d)
    for (int h = 0; h <= n; ++h)
      if (h != d) w[h][d] = scores.score(h, d);
  return w;
}

std::vector<int> strip_root(const std::vector<int>& par, int n) {
  return std::vector<int>(par.begin() + 1, par.begin() + 1 + n);
}

}  // namespace

std::vector<int> decode_mst(const ArcScores& scores) {
  const int n = scores.n;
  if (n < 1) fail(ErrorCode::InvalidArg, "cannot decode an empty sentence");
  if (n == 1) return {0};

  WeightMatrix w = full_weights(scores);
  std::vector<int> heads = strip_root(cle(w), n);
  if (std::count(heads.begin(), heads.end(), 0) == 1) return heads;

  // The unconstrained optimum attaches several tokens to the root; decode
  // once per candidate root child and keep the best total.
  std::vector<int> best;
  double best_total = kNegativeInfinity;
  for (int r = 1; r <= n; ++r) {
    WeightMatrix wr = w;
    for (int d = 1; d <= n; ++d)
      if (d != r) wr[0][d] = kNegativeInfinity;
    std::vector<int> candidate = strip_root(cle(wr), n);
    double total = tree_score(scores, candidate);
    if (best.empty() || total > best_total) {
      best = std::move(candidate);
      best_total = total;
    }
  }
  return best;
}

std::vector<int> brute_force_mst(const ArcScores& scores) {
  const int n = scores.n;
  if (n < 1) fail(ErrorCode::InvalidArg, "cannot decode an empty sentence");
  if (n > 8)
    fail(ErrorCode::Limit, "SizeLimitExceeded: brute-force oracle is bounded at 8 tokens, got " +
                               std::to_string(n));

  // Odometer over all head vectors in lexicographic order; token d takes
  // values 0..n excluding d itself, so the first optimum found is the
  // lexicographically smallest one.
  std::vector<int> current(n, 0);
  std::vector<int> best;
  double best_total = kNegativeInfinity;
  while (true) {
    if (validate_heads(current).ok()) {
      double total = tree_score(scores, current);
      if (best.empty() || total > best_total) {
        best = current;
        best_total = total;
      }
    }
    int pos = n - 1;
    while (pos >= 0) {
      ++current[pos];
      if (current[pos] == pos + 1) ++current[pos];  // skip the self-arc
      if (current[pos] <= n) break;
      current[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

}  // namespace arbor
