#ifndef ARBOR_DECODER_HPP
#define ARBOR_DECODER_HPP

#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"

namespace arbor {

inline constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

// Dense head-score table: score(h, d) for h in 0..n (0 = artificial root)
// and d in 1..n. Self-arcs are outside the domain and pinned at -inf.
struct ArcScores {
  int n = 0;
  std::vector<double> table;  // (n + 1) rows of n entries, row-major by head

  static ArcScores make(int n);

  double score(int head, int dep) const { return table[static_cast<std::size_t>(head) * n + (dep - 1)]; }
  void set(int head, int dep, double value) { table[static_cast<std::size_t>(head) * n + (dep - 1)] = value; }
};

double tree_score(const ArcScores& scores, std::span<const int> heads);

// Highest-scoring single-rooted arborescence (exactly one token attached to
// the root). Deterministic for a fixed input.
std::vector<int> decode_mst(const ArcScores& scores);

// Exhaustive oracle, n <= 8. Ties broken by lexicographically smallest
// head vector.
std::vector<int> brute_force_mst(const ArcScores& scores);

}  // namespace arbor

#endif
