#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hypowave {

enum class RegularityTag { LipschitzPositive, HoelderPositive, SmoothDegenerate, HoelderDegenerate };

std::string to_string(RegularityTag tag);

struct RegularityClass {
  RegularityTag tag = RegularityTag::LipschitzPositive;
  std::optional<double> alpha;     // exponent of a itself
  std::optional<int> smoothness_l;

  static RegularityClass lipschitz_positive();
  static RegularityClass hoelder_positive(double alpha);
  static RegularityClass smooth_degenerate(int l);
  static RegularityClass hoelder_degenerate(double alpha);

  bool positive() const {
    return tag == RegularityTag::LipschitzPositive || tag == RegularityTag::HoelderPositive;
  }
  // Throws PreconditionError if alpha/l presence or range is wrong for the tag.
  void validate() const;
};

// Hölder exponent of √a implied by the class: α for positive classes
// (1 when Lipschitz), α/2 for HoelderDegenerate. Empty for SmoothDegenerate.
std::optional<double> root_exponent(const RegularityClass& cls);

struct UniformGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n = 2;  // number of points, endpoints included

  double step() const { return (t1 - t0) / static_cast<double>(n - 1); }
  double at(std::size_t i) const { return i + 1 == n ? t1 : t0 + step() * static_cast<double>(i); }
  std::vector<double> times() const;

  static UniformGrid with_density(double t0, double t1, double points_per_unit);
};

constexpr double kDefaultPointsPerUnit = 4096.0;

struct SampledFunction {
  UniformGrid grid;
  std::vector<double> values;

  // Piecewise-linear interpolation, clamped to the grid range.
  double operator()(double t) const;
  void write_dat(const std::string& path, const std::string& value_name = "value") const;
};

// Catalogue entry: kind plus named parameters.
//   const        c
//   sin          c, b, omega            c + b sin(omega t)
//   holder_shift c, t0, alpha           c + |t - t0|^alpha
//   t_squared                           t^2
//   sin_squared                         sin(t)^2
//   holder       t0, alpha              |t - t0|^alpha
struct SpeedSpec {
  std::string kind;
  std::map<std::string, double> params;
  double horizon = 1.0;
  std::optional<RegularityClass> regularity;  // override of the catalogue default
};

// "kind:p1,p2,..." with positional parameters in the order listed above.
SpeedSpec parse_speed(std::string_view text, double horizon = 1.0);
SpeedSpec speed_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpeedSpec& spec);
nlohmann::json to_json(const RegularityClass& cls);
RegularityClass regularity_from_json(const nlohmann::json& j);

class PropagationSpeed {
 public:
  struct Bounds {
    double a0 = 0.0;
    double a_sup = 0.0;
    double hoelder_seminorm = 0.0;  // of a, at the class exponent (capped at 1)
    double lipschitz = 0.0;         // sup |a'|, +inf when a is not Lipschitz
  };

  PropagationSpeed(std::function<double(double)> a, double horizon, Bounds bounds,
                   RegularityClass cls, std::string label = "custom",
                   std::function<double(double)> derivative = {});

  double operator()(double t) const { return a_(t); }
  double evaluate(double t) const { return a_(t); }
  double horizon() const { return horizon_; }
  double a0() const { return bounds_.a0; }
  double a_sup() const { return bounds_.a_sup; }
  double hoelder_seminorm() const { return bounds_.hoelder_seminorm; }
  double lipschitz() const { return bounds_.lipschitz; }
  const RegularityClass& regularity() const { return cls_; }
  const std::string& label() const { return label_; }
  bool has_derivative() const { return static_cast<bool>(da_); }
  double derivative(double t) const { return da_(t); }
  // Set when a is constant; lets callers use closed forms.
  std::optional<double> constant_value() const { return constant_; }

  // t ↦ a(T - t) on the same horizon.
  PropagationSpeed reversed() const;

 private:
  friend PropagationSpeed make_speed(const SpeedSpec& spec);
  std::function<double(double)> a_;
  std::function<double(double)> da_;
  double horizon_;
  Bounds bounds_;
  RegularityClass cls_;
  std::string label_;
  std::optional<double> constant_;
};

PropagationSpeed make_speed(const SpeedSpec& spec);
inline PropagationSpeed make_speed(std::string_view text, double horizon = 1.0) {
  return make_speed(parse_speed(text, horizon));
}

// Normalized bump weights phi(j h / eps), |j h| < eps, summing to 1.
std::vector<double> mollifier_weights(double epsilon, double step);

// (√a ∗ φ_ε) sampled on [0, T], with a extended by even reflection at both ends.
SampledFunction mollify(const PropagationSpeed& a, double epsilon,
                        double points_per_unit = kDefaultPointsPerUnit);

struct RegularizedRoots {
  SampledFunction lambda1;
  SampledFunction lambda2;
  double epsilon = 0.0;
  bool shifted = false;
  std::optional<double> alpha;  // root exponent used for the shift
  double min_gap() const;
};

// Plain: (−√a∗φ_ε, √a∗φ_ε). Shifted: (−√a∗φ_ε + ε^α, √a∗φ_ε + 2ε^α), α the
// root exponent (explicit, or α/2 from a HoelderDegenerate class).
RegularizedRoots regularized_roots(const PropagationSpeed& a, double epsilon, bool shifted,
                                   std::optional<double> root_alpha = std::nullopt,
                                   double points_per_unit = kDefaultPointsPerUnit);

struct RootDeviation {
  double c1 = 0.0;  // sup |λ1 + √a| / ε^α
  double c2 = 0.0;  // sup |λ2 − √a| / ε^α
  double alpha = 0.0;
};

RootDeviation root_deviation_check(const RegularizedRoots& roots, const PropagationSpeed& a,
                                   std::optional<double> root_alpha = std::nullopt);

// sup |∂t λ2| · ε^{1−α} by central differences; requires grid step ≤ ε/10.
double root_derivative_check(const RegularizedRoots& roots, const PropagationSpeed& a,
                             std::optional<double> root_alpha = std::nullopt);

// Dyadic-separation estimate of sup |f(t) − f(t')| / |t − t'|^α on a uniform grid.
double hoelder_seminorm(const std::vector<double>& samples, double step, double alpha);
double hoelder_seminorm(const PropagationSpeed& a, double alpha, const UniformGrid& grid,
                        bool of_root = false);

}  // namespace hypowave
