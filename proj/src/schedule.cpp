#include "pushsum/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pushsum/error.hpp"

namespace pushsum {

Regime Regime::ordinary(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("ordinary regime needs 0 < alpha < 1, got " + std::to_string(alpha));
  }
  return Regime(Kind::ordinary, alpha);
}

double Regime::bound(double k, double T, int n) const {
  const double log_term = std::log(k + T);
  switch (kind_) {
    case Kind::ordinary:
      return -log_term / std::log(alpha_);
    case Kind::pushsum:
      return log_term / (2.0 * std::log(static_cast<double>(n)));
    case Kind::robust:
      return log_term / (6.0 * std::log(static_cast<double>(n)));
  }
  return 0.0;
}

std::string_view regime_name(Regime::Kind kind) {
  switch (kind) {
    case Regime::Kind::ordinary:
      return "ordinary";
    case Regime::Kind::pushsum:
      return "pushsum";
    case Regime::Kind::robust:
      return "robust";
  }
  return "unknown";
}

BlockSchedule::BlockSchedule(std::vector<int> lengths, int n)
    : lengths_(std::move(lengths)), n_(n) {
  if (n_ < 1) throw InvalidArgument("block schedule needs n >= 1");
  prefix_.reserve(lengths_.size() + 1);
  for (int b : lengths_) {
    if (b < 1) throw InvalidArgument("block lengths must be >= 1");
    prefix_.push_back(prefix_.back() + b);
  }
}

int BlockSchedule::length(std::size_t k) const {
  if (k < 1 || k > lengths_.size()) {
    throw InvalidArgument("block index " + std::to_string(k) + " outside [1, " +
                          std::to_string(lengths_.size()) + "]");
  }
  return lengths_[k - 1];
}

std::size_t BlockSchedule::block_of(long long iteration) const {
  if (iteration < 0 || iteration >= total_iterations()) {
    throw InvalidArgument("iteration " + std::to_string(iteration) +
                          " outside the schedule");
  }
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), iteration);
  return static_cast<std::size_t>(it - prefix_.begin()) - 1;
}

long long mu(const BlockSchedule& s, long long k) {
  if (k < 0) throw InvalidArgument("mu: negative index");
  if (static_cast<std::size_t>(k) > s.block_count()) {
    throw InvalidArgument("mu: index " + std::to_string(k) + " beyond " +
                          std::to_string(s.block_count()) + " blocks");
  }
  return s.prefix_[static_cast<std::size_t>(k)];
}

long long lambda(const BlockSchedule& s, long long k) {
  if (k < 0) throw InvalidArgument("lambda: negative index");
  if (k == 0) return 0;
  const long long n = s.n();
  return mu(s, k * n) - mu(s, (k - 1) * n);
}

bool check_lambda_bound(const BlockSchedule& s, const Regime& regime, long long K,
                        double T, long long horizon) {
  if (K < 1) throw InvalidArgument("check_lambda_bound needs K >= 1");
  if (T < 0.0) throw InvalidArgument("check_lambda_bound needs T >= 0");
  for (long long k = K; k <= horizon; ++k) {
    const double limit = regime.bound(static_cast<double>(k), T, s.n());
    if (static_cast<double>(lambda(s, k)) > limit) return false;
  }
  return true;
}

double saturating_T(int n, const Regime& regime, double T) {
  if (n < 2) throw InvalidArgument("saturating_T needs n >= 2");
  if (T < 0.0) throw InvalidArgument("saturating_T needs T >= 0");
  const double target = static_cast<double>(n);
  if (regime.bound(1.0, T, n) >= target) return T;
  // bound(1, T') = n  <=>  ln(1 + T') = n * c  with c the regime's divisor.
  double c = 0.0;
  switch (regime.kind()) {
    case Regime::Kind::ordinary:
      c = -std::log(regime.alpha());
      break;
    case Regime::Kind::pushsum:
      c = 2.0 * std::log(static_cast<double>(n));
      break;
    case Regime::Kind::robust:
      c = 6.0 * std::log(static_cast<double>(n));
      break;
  }
  double shifted = std::max(T, std::ceil(std::exp(target * c) - 1.0));
  // Absorb rounding in exp/log, in both directions.
  while (regime.bound(1.0, shifted, n) < target) {
    shifted = std::nextafter(shifted * (1.0 + 1e-15) + 1.0, HUGE_VAL);
  }
  for (int step = 0; step < 4 && shifted - 1.0 >= T && shifted - 1.0 != shifted &&
                     regime.bound(1.0, shifted - 1.0, n) >= target;
       ++step) {
    shifted -= 1.0;
  }
  return shifted;
}

BlockSchedule logarithmic_b_sequence(int n, const Regime& regime, double T, int count) {
  if (count <= 0) throw InvalidArgument("logarithmic_b_sequence needs count > 0");
  const double shifted = saturating_T(n, regime, T);
  std::vector<int> lengths;
  lengths.reserve(static_cast<std::size_t>(count));
  int window = 0;
  int b = 1;
  for (int k = 1; k <= count; ++k) {
    const int w = (k + n - 1) / n;  // ceil(k / n)
    if (w != window) {
      window = w;
      const double limit = regime.bound(static_cast<double>(w), shifted, n);
      double per_block = std::floor(limit / n);
      // n * floor(limit / n) may exceed limit after rounding.
      while (per_block > 1.0 && per_block * n > limit) per_block -= 1.0;
      b = static_cast<int>(std::clamp(per_block, 1.0, 1e9));
    }
    lengths.push_back(b);
  }
  return BlockSchedule(std::move(lengths), n);
}

BlockSchedule constant_schedule(int n, int length, int count) {
  if (count <= 0) throw InvalidArgument("constant_schedule needs count > 0");
  return BlockSchedule(std::vector<int>(static_cast<std::size_t>(count), length), n);
}

BlockSchedule geometric_schedule(int n, int first, int ratio, int count, int cap) {
  if (count <= 0) throw InvalidArgument("geometric_schedule needs count > 0");
  if (first < 1 || ratio < 1) throw InvalidArgument("geometric_schedule needs first, ratio >= 1");
  std::vector<int> lengths;
  long long b = first;
  for (int k = 0; k < count; ++k) {
    lengths.push_back(static_cast<int>(std::min<long long>(b, cap)));
    b = std::min<long long>(b * ratio, cap);
  }
  return BlockSchedule(std::move(lengths), n);
}

}  // namespace pushsum
