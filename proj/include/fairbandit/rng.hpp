#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace fairbandit {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random stream. Every method documents how many engine outputs it
/// consumes so that runs are reproducible bit-for-bit across platforms: the
/// engine is std::mt19937_64 (output sequence fixed by the C++ standard) and
/// all distributions below are implemented here rather than taken from
/// <random>, whose distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream for replication `index` of an experiment with `master_seed`.
  static Rng for_replication(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53 bits of resolution. One engine output.
  double uniform();

  /// Uniform integer in [0, n). Rejection sampling; one output on average
  /// (at most a handful for any n < 2^63).
  std::uint64_t below(std::uint64_t n);

  /// true with probability p. One engine output.
  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the Marsaglia polar method; two outputs per attempt,
  /// the second variate is discarded so no hidden state is carried.
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze; for shape < 1 the
  /// Gamma(shape + 1) draw is boosted by U^(1/shape) (one extra output).
  double gamma(double shape);

  /// Beta(a, b) as X/(X+Y) with X ~ Gamma(a), Y ~ Gamma(b) (X drawn first),
  /// clamped to the open interval (0, 1).
  double beta(double a, double b);

  /// Index drawn from a probability vector by inversion. One engine output.
  template <typename Derived>
  int categorical(const Eigen::MatrixBase<Derived>& probs) {
    const double u = uniform();
    double acc = 0.0;
    const int n = static_cast<int>(probs.size());
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
      if (probs(i) <= 0.0) continue;
      last_positive = i;
      acc += probs(i);
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairbandit
