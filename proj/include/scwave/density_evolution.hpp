#ifndef SCWAVE_DENSITY_EVOLUTION_HPP
#define SCWAVE_DENSITY_EVOLUTION_HPP

#include "scwave/ensemble.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

namespace scwave {

/// max_z x_z below this counts as decoded. Also the T~10 criterion.
inline constexpr double kConvergenceCutoff = 1e-19;
inline constexpr int kDefaultMaxIters = 20000;
/// Entries below this are flushed to zero (avoids subnormal arithmetic).
inline constexpr double kFlushToZero = 1e-300;
/// A run whose largest per-iteration decrease falls below this fraction of
/// the largest entry has reached a nonzero fixed point.
inline constexpr double kStallRelativeChange = 1e-13;

/// Erasure probabilities of VN-to-CN messages at positions 1..L (stored 0-based).
struct DensityProfile {
  Vector x;
  int t = 0;
  double epsilon = 0.0;

  static DensityProfile initial(int L, double epsilon) {
    return {Vector::Constant(L, epsilon), 0, epsilon};
  }
};

namespace detail {

template <typename Scalar>
inline Scalar ipow(Scalar base, int exponent) {
  Scalar result(1);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

/// Sum of f(lo..hi) added as (f(lo) + f(hi)) + (f(lo+1) + f(hi-1)) + ..., so a
/// reversed term order gives the bit-identical result.
template <typename Scalar, typename F>
inline Scalar paired_sum(Eigen::Index lo, Eigen::Index hi, F&& f) {
  Scalar s(0);
  for (; lo < hi; ++lo, --hi) s += f(lo) + f(hi);
  if (lo == hi) s += f(lo);
  return s;
}

/// Non-uniform coupled BEC density evolution, one iteration.
///
/// The check-side aggregate y_k = sum_j nu_j x_{k-j} is formed once for each
/// check position k in [0, L+w-2]; the variable-side update then reads
/// 1 - y_{z+i} for every offset i. Entries of x outside [0, L) are zero.
template <typename Scalar, typename XIn, typename XOut, typename Buf>
void de_step_kernel(const XIn& x, const Eigen::Ref<const Vector>& nu, int dv, int dc,
                    Scalar epsilon, Buf& check_side, XOut& out) {
  const Eigen::Index L = x.size();
  const Eigen::Index w = nu.size();
  check_side.resize(L + w - 1);
  for (Eigen::Index k = 0; k < L + w - 1; ++k) {
    const Eigen::Index j_lo = std::max<Eigen::Index>(0, k - (L - 1));
    const Eigen::Index j_hi = std::min<Eigen::Index>(w - 1, k);
    check_side[k] = Scalar(1) - paired_sum<Scalar>(j_lo, j_hi, [&](Eigen::Index j) { return Scalar(nu[j]) * x[k - j]; });
  }
  out.resize(L);
  for (Eigen::Index z = 0; z < L; ++z) {
    const Scalar s = paired_sum<Scalar>(0, w - 1, [&](Eigen::Index i) { return Scalar(nu[i]) * ipow(check_side[z + i], dc - 1); });
    Scalar v = epsilon * ipow(Scalar(1) - s, dv - 1);
    out[z] = v < Scalar(kFlushToZero) ? Scalar(0) : v;
  }
}

}  // namespace detail

/// One density-evolution iteration x^{(t)} -> x^{(t+1)} for `spec` at
/// channel erasure probability `epsilon`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> de_step(
    const Eigen::MatrixBase<Derived>& x, const EnsembleSpec& spec,
    typename Derived::Scalar epsilon) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> check_side, out;
  detail::de_step_kernel<Scalar>(x.derived(), spec.profile.weights(), spec.dv, spec.dc, epsilon,
                                 check_side, out);
  return out;
}

DensityProfile de_step(const DensityProfile& profile, const EnsembleSpec& spec);

/// Stateful density-evolution runner with preallocated buffers.
class DensityEvolution {
 public:
  DensityEvolution(const EnsembleSpec& spec, double epsilon);

  void step();

  const Vector& x() const { return x_; }
  int iteration() const { return t_; }
  double epsilon() const { return epsilon_; }
  int length() const { return static_cast<int>(x_.size()); }
  double max_value() const { return max_; }

  bool converged() const { return max_ < kConvergenceCutoff; }
  /// True once the profile has stopped moving without converging.
  bool stalled() const { return t_ > 0 && !converged() && last_change_ <= kStallRelativeChange * max_; }

  DensityProfile profile() const { return {x_, t_, epsilon_}; }

 private:
  Vector nu_;
  int dv_;
  int dc_;
  double epsilon_;
  int t_ = 0;
  double max_ = 0.0;
  double last_change_ = 0.0;
  Vector x_;
  Vector next_;
  Vector check_side_;
};

enum class HistoryPolicy { none, wave_position, full };

struct DERunReport {
  bool converged = false;
  int iterations_used = 0;
  DensityProfile final_profile;
  /// Profiles x^{(1)}, x^{(2)}, ... (HistoryPolicy::full).
  std::vector<Vector> profiles;
  /// Left-front wave position per iteration, NaN where undefined
  /// (HistoryPolicy::wave_position and HistoryPolicy::full).
  std::vector<double> wave_positions;
};

/// Iterates from x^{(0)} = epsilon until max_z x_z < kConvergenceCutoff, the
/// profile stalls at a nonzero fixed point, or `max_iters` is reached.
DERunReport de_run(const EnsembleSpec& spec, double epsilon, int max_iters = kDefaultMaxIters,
                   HistoryPolicy record = HistoryPolicy::none);

bool de_converges(const EnsembleSpec& spec, double epsilon, int max_iters = kDefaultMaxIters);

/// Largest converging epsilon, by bisection on [0, 1] until the bracket is narrower than `tol`.
double bp_threshold(const EnsembleSpec& spec, double tol = 1e-5, int max_iters = kDefaultMaxIters);

}  // namespace scwave

#endif  // SCWAVE_DENSITY_EVOLUTION_HPP
