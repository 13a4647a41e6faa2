#ifndef SCWAVE_ENSEMBLE_HPP
#define SCWAVE_ENSEMBLE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace scwave {

using Vector = Eigen::VectorXd;

/// Input tolerance on the sum of a smoothing profile.
inline constexpr double kProfileSumTolerance = 1e-9;

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Distribution over edge offsets (nu_0, ..., nu_{w-1}). Always normalized.
class SmoothingProfile {
 public:
  SmoothingProfile() : nu_(Vector::Ones(1)) {}

  /// Validates and renormalizes so the weights sum to exactly 1.
  /// Throws SpecError on negative, non-finite or badly normalized input.
  explicit SmoothingProfile(const Vector& weights);

  static SmoothingProfile uniform(int w);

  int width() const { return static_cast<int>(nu_.size()); }
  double operator[](int i) const { return nu_[i]; }
  const Vector& weights() const { return nu_; }

  SmoothingProfile reversed() const;
  bool is_uniform(double tol = 1e-12) const;

  friend bool operator==(const SmoothingProfile& a, const SmoothingProfile& b) {
    return a.nu_.size() == b.nu_.size() && a.nu_ == b.nu_;
  }

 private:
  Vector nu_;
};

/// Unvalidated ensemble description, as read from a file or the command line.
struct EnsembleConfig {
  int dv = 3;
  int dc = 6;
  int L = 100;
  int M = 0;  // 0: asymptotic use only
  std::vector<double> nu{1.0};
};

/// A validated (d_v, d_c, nu, L, M) ensemble.
struct EnsembleSpec {
  int dv = 3;
  int dc = 6;
  SmoothingProfile profile;
  int L = 100;
  int M = 0;

  int coupling_width() const { return profile.width(); }
  /// Check nodes per spatial position, M * dv / dc.
  int checks_per_position() const { return M * dv / dc; }

  EnsembleSpec with_profile(SmoothingProfile p) const {
    EnsembleSpec s = *this;
    s.profile = std::move(p);
    return s;
  }
  EnsembleSpec with_length(int new_L) const {
    EnsembleSpec s = *this;
    s.L = new_L;
    return s;
  }
  EnsembleConfig config() const;
};

enum class Usage { asymptotic, finite_length };

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
  std::string message() const;
};

ValidationResult validate_spec(const EnsembleConfig& config, Usage usage = Usage::asymptotic);

/// Validates `config` and returns a spec with an exactly normalized profile.
EnsembleSpec make_spec(const EnsembleConfig& config, Usage usage = Usage::asymptotic);

struct RateReport {
  double delta = 0.0;
  double design_rate = 0.0;
  double asymptotic_rate = 0.0;
};

/// Design rate 1 - dv/dc - Delta/L, where Delta counts the expected
/// number of termination and unconnected boundary checks.
RateReport design_rate(const EnsembleSpec& spec);

/// Termination rate-loss term Delta for a profile and degree pair.
double rate_loss_delta(int dv, int dc, const SmoothingProfile& profile);

}  // namespace scwave

#endif  // SCWAVE_ENSEMBLE_HPP
