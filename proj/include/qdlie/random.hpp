#ifndef QDLIE_RANDOM_HPP
#define QDLIE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace qdlie {

/// Counter-based generator: the i-th draw of stream s under seed k is a pure
/// function of (k, s, i). Output is identical across platforms and standard
/// libraries, unlike the std:: distributions.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ mix(stream + 0xbb67ae8584caa73bULL)) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call, no caching, so the
  /// sequence depends only on the counter).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  Eigen::VectorXd unit_vector(Eigen::Index n) {
    Eigen::VectorXd v = normal_vector(n);
    while (v.norm() == 0.0) v = normal_vector(n);
    return v / v.norm();
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qdlie

#endif  // QDLIE_RANDOM_HPP
