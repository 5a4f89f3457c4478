#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pushsum {

// Which logarithmic growth bound a block schedule must respect.
//
//   ordinary(alpha): lambda_k <= -ln(k + T) / ln(alpha)
//   pushsum:         lambda_k <=  ln(k + T) / (2 ln n)
//   robust:          lambda_k <=  ln(k + T) / (6 ln n)
class Regime {
 public:
  enum class Kind { ordinary, pushsum, robust };

  static Regime ordinary(double alpha);
  static Regime pushsum() { return Regime(Kind::pushsum, 0.0); }
  static Regime robust() { return Regime(Kind::robust, 0.0); }

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  // Right-hand side of the bound at index k for n agents.
  double bound(double k, double T, int n) const;

  friend bool operator==(const Regime&, const Regime&) = default;

 private:
  Regime(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  Kind kind_;
  double alpha_;
};

std::string_view regime_name(Regime::Kind kind);

// Block lengths b_1, b_2, ... and the n used to aggregate them into
// lambda_k = b_{(k-1)n+1} + ... + b_{kn}.
class BlockSchedule {
 public:
  BlockSchedule() = default;
  // Throws InvalidArgument if n < 1 or any length is < 1.
  BlockSchedule(std::vector<int> lengths, int n);

  int n() const { return n_; }
  std::size_t block_count() const { return lengths_.size(); }
  std::span<const int> lengths() const { return lengths_; }
  // b_k for 1 <= k <= block_count().
  int length(std::size_t k) const;

  // Iterations covered by all blocks (mu at the last block).
  long long total_iterations() const { return prefix_.back(); }

  // Number of complete n-block windows (largest k with lambda(k) defined).
  std::size_t window_count() const { return lengths_.size() / static_cast<std::size_t>(n_); }

  // Block index l (0-based) with mu_l <= iteration < mu_{l+1}.
  std::size_t block_of(long long iteration) const;

  friend bool operator==(const BlockSchedule& a, const BlockSchedule& b) {
    return a.n_ == b.n_ && a.lengths_ == b.lengths_;
  }

 private:
  friend long long mu(const BlockSchedule&, long long);
  std::vector<int> lengths_;
  std::vector<long long> prefix_{0};
  int n_ = 1;
};

// mu_0 = 0, mu_k = b_1 + ... + b_k. Throws for k < 0 or k > block_count().
long long mu(const BlockSchedule& s, long long k);

// lambda_0 = 0, lambda_k = mu_{kn} - mu_{(k-1)n}. Throws when the schedule
// has fewer than k n blocks.
long long lambda(const BlockSchedule& s, long long k);

// True iff lambda_k <= bound(k) for every K <= k <= horizon. The check is
// finite-horizon; the schedule must cover horizon * n blocks.
bool check_lambda_bound(const BlockSchedule& s, const Regime& regime, long long K,
                        double T, long long horizon);

// Smallest T' >= T for which bound(1, T') >= n, i.e. the shift that lets a
// schedule of unit blocks satisfy the bound from k = 1 on.
double saturating_T(int n, const Regime& regime, double T);

// b_k = max(1, floor(bound(ceil(k/n), T') / n)) with T' = saturating_T(n,
// regime, T). The induced lambda satisfies the regime bound for all k >= 1
// against T'. Nondecreasing and unbounded.
BlockSchedule logarithmic_b_sequence(int n, const Regime& regime, double T, int count);

// Every block has the same length.
BlockSchedule constant_schedule(int n, int length, int count);

// b_k = first * ratio^(k-1), clamped to `cap`.
BlockSchedule geometric_schedule(int n, int first, int ratio, int count,
                                 int cap = 1 << 24);

}  // namespace pushsum
