#ifndef QDLIE_PROPAGATOR_HPP
#define QDLIE_PROPAGATOR_HPP

// Overflow-free integration of v' = Dv: the state is kept as a unit direction
// plus the logarithm of its norm.

#include <cmath>
#include <limits>
#include <vector>

#include "qdlie/spectra.hpp"

namespace qdlie {

enum class Direction { forward, backward };

inline const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

/// x = exp(log_norm) * unit. The zero vector has log_norm = -inf and unit = 0.
struct FlowState {
  Vector unit;
  double log_norm = -std::numeric_limits<double>::infinity();

  bool is_zero() const { return std::isinf(log_norm) && log_norm < 0.0; }
  /// The represented vector; overflows to inf for huge log_norm.
  Vector value() const { return is_zero() ? Vector::Zero(unit.size()) : Vector(std::exp(log_norm) * unit); }

  static FlowState from(const Vector& v) {
    if (!v.allFinite()) throw InvalidInput("flow state must be finite");
    const double n = v.norm();
    if (n == 0.0) return {Vector::Zero(v.size()), -std::numeric_limits<double>::infinity()};
    return {v / n, std::log(n)};
  }
};

/// Advances states by a fixed time step dt in the chosen direction. The step
/// is split so that each substep propagator exp(+-s D) has s*||D||_F <= 1/2,
/// and the direction is renormalized after every substep.
class Propagator {
 public:
  Propagator(const Endomorphism& d, double dt, Direction direction) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("propagator step must be positive and finite");
    const double growth = dt * d.norm();
    substeps_ = growth > 0.5 ? static_cast<int>(std::ceil(growth / 0.5)) : 1;
    const double sign = direction == Direction::forward ? 1.0 : -1.0;
    step_ = matrix_exp(d, sign * dt / substeps_).matrix();
  }

  double dt() const noexcept { return dt_; }
  int substeps() const noexcept { return substeps_; }

  void advance(FlowState& s) const {
    if (s.is_zero()) return;
    for (int k = 0; k < substeps_; ++k) {
      Vector w = step_ * s.unit;
      const double n = w.norm();
      s.unit = w / n;
      s.log_norm += std::log(n);
    }
  }

  /// Advances by the largest whole number of steps not exceeding duration.
  void advance_for(FlowState& s, double duration) const {
    const auto steps = static_cast<long>(std::floor(duration / dt_ + 1e-9));
    for (long k = 0; k < steps; ++k) advance(s);
  }

 private:
  double dt_;
  int substeps_ = 1;
  Matrix step_;
};

struct TrajectorySample {
  double t;
  FlowState state;
};

/// Samples exp(+-tD)v at t = 0, dt, 2dt, ..., up to horizon.
inline std::vector<TrajectorySample> sample_trajectory(const Endomorphism& d, const Vector& v, Direction direction,
                                                       double horizon, double dt) {
  if (v.size() != d.dim()) throw InvalidInput("vector dimension does not match the endomorphism");
  if (!(horizon >= 0.0)) throw InvalidInput("trajectory horizon must be nonnegative");
  const Propagator prop(d, dt, direction);
  const auto steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  FlowState s = FlowState::from(v);
  out.push_back({0.0, s});
  for (long k = 1; k <= steps; ++k) {
    prop.advance(s);
    out.push_back({static_cast<double>(k) * dt, s});
  }
  return out;
}

}  // namespace qdlie

#endif  // QDLIE_PROPAGATOR_HPP
