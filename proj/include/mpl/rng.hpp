#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace mpl {

/// Deterministic 64-bit stream generator (SplitMix64).
///
/// The state advances by the golden-ratio increment and each output is a
/// bit-mix of the new state, so identical seeds give identical streams on any
/// platform and standard library. Uniform doubles are built from the top 53
/// bits directly; no std::*_distribution is involved, keeping byte-level
/// reproducibility. The object has value semantics: copying forks the stream,
/// and fork(k) derives an independent child stream for sub-experiment k.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  /// Next raw 64-bit word.
  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Matrix with i.i.d. uniform entries in [lo, hi), filled row-major.
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                         double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  /// Vector with i.i.d. uniform entries in [lo, hi).
  Eigen::VectorXd vector(Eigen::Index size, double lo, double hi) {
    return matrix(size, 1, lo, hi).col(0);
  }

  /// Independent child stream for sub-experiment `index`.
  /// Derivation is a fixed function of (current state, index); the parent
  /// stream is not advanced.
  SeededRng fork(std::uint64_t index) const {
    SeededRng child(state_ ^ (0x632be59bd9b4e019ULL * (index + 1)));
    child.next_u64();  // decorrelate from a same-seed parent
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace mpl
