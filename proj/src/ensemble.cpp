#include "scwave/ensemble.hpp"

#include <cmath>
#include <sstream>

namespace scwave {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_profile(const std::vector<double>& nu, std::vector<std::string>& out) {
  if (nu.empty()) {
    out.emplace_back("profile is empty (w must be >= 1)");
    return;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!std::isfinite(nu[i])) {
      out.emplace_back("profile entry " + std::to_string(i) + " is not finite");
      return;
    }
    if (nu[i] < 0.0)
      out.emplace_back("profile entry " + std::to_string(i) + " is negative (" +
                       format_number(nu[i]) + ")");
    sum += nu[i];
  }
  if (std::abs(sum - 1.0) > kProfileSumTolerance)
    out.emplace_back("profile sums to " + format_number(sum));
}

}  // namespace

SmoothingProfile::SmoothingProfile(const Vector& weights) {
  std::vector<std::string> problems;
  check_profile(std::vector<double>(weights.data(), weights.data() + weights.size()), problems);
  if (!problems.empty()) throw SpecError(problems.front());
  nu_ = weights / weights.sum();
}

SmoothingProfile SmoothingProfile::uniform(int w) {
  if (w < 1) throw SpecError("coupling width must be >= 1");
  return SmoothingProfile(Vector::Constant(w, 1.0 / w));
}

SmoothingProfile SmoothingProfile::reversed() const {
  SmoothingProfile r;
  r.nu_ = nu_.reverse();
  return r;
}

bool SmoothingProfile::is_uniform(double tol) const {
  const double u = 1.0 / static_cast<double>(nu_.size());
  return ((nu_.array() - u).abs() <= tol).all();
}

EnsembleConfig EnsembleSpec::config() const {
  EnsembleConfig c;
  c.dv = dv;
  c.dc = dc;
  c.L = L;
  c.M = M;
  c.nu.assign(profile.weights().data(), profile.weights().data() + profile.width());
  return c;
}

std::string ValidationResult::message() const {
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v;
  }
  return s;
}

ValidationResult validate_spec(const EnsembleConfig& c, Usage usage) {
  ValidationResult r;
  if (c.dv < 2) r.violations.emplace_back("dv must be >= 2");
  if (c.dc <= c.dv) r.violations.emplace_back("dc must exceed dv");
  if (c.L < 1) r.violations.emplace_back("L must be >= 1");
  check_profile(c.nu, r.violations);
  if (!c.nu.empty() && static_cast<long>(c.nu.size()) > c.L)
    r.violations.emplace_back("w > L (coupling width " + std::to_string(c.nu.size()) +
                              " exceeds chain length " + std::to_string(c.L) + ")");
  if (c.M < 0) r.violations.emplace_back("M must be >= 0");
  if (usage == Usage::finite_length) {
    if (c.M < 1)
      r.violations.emplace_back("M must be >= 1 for finite-length construction");
    else if (c.dc > 0 && (static_cast<long>(c.M) * c.dv) % c.dc != 0)
      r.violations.emplace_back("M*dv/dc is not an integer");
  }
  return r;
}

EnsembleSpec make_spec(const EnsembleConfig& c, Usage usage) {
  const auto v = validate_spec(c, usage);
  if (!v) throw SpecError(v.message());
  EnsembleSpec s;
  s.dv = c.dv;
  s.dc = c.dc;
  s.L = c.L;
  s.M = c.M;
  s.profile = SmoothingProfile(Eigen::Map<const Vector>(c.nu.data(), static_cast<Eigen::Index>(c.nu.size())));
  return s;
}

double rate_loss_delta(int dv, int dc, const SmoothingProfile& profile) {
  const int w = profile.width();
  const Vector& nu = profile.weights();
  double boundary = 0.0;
  double head = 0.0;
  for (int k = 0; k + 1 < w; ++k) {
    head += nu[k];
    const double tail = nu.tail(w - 1 - k).sum();
    boundary += std::pow(head, dc) + std::pow(tail, dc);
  }
  return static_cast<double>(dv) / dc * (w - 1 - boundary);
}

RateReport design_rate(const EnsembleSpec& spec) {
  RateReport r;
  r.asymptotic_rate = 1.0 - static_cast<double>(spec.dv) / spec.dc;
  r.delta = rate_loss_delta(spec.dv, spec.dc, spec.profile);
  r.design_rate = r.asymptotic_rate - r.delta / spec.L;
  return r;
}

}  // namespace scwave
