#include "hypowave/coefficient.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hypowave/common.hpp"
#include "hypowave/report.hpp"

namespace hypowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

double param(const SpeedSpec& spec, const char* name) {
  auto it = spec.params.find(name);
  require(it != spec.params.end(), "speed '" + spec.kind + "' needs parameter '" + name + "'");
  require(std::isfinite(it->second), std::string("parameter '") + name + "' is not finite");
  return it->second;
}

const std::map<std::string, std::vector<std::string>>& catalogue() {
  static const std::map<std::string, std::vector<std::string>> kinds = {
      {"const", {"c"}},
      {"sin", {"c", "b", "omega"}},
      {"holder_shift", {"c", "t0", "alpha"}},
      {"t_squared", {}},
      {"sin_squared", {}},
      {"holder", {"t0", "alpha"}},
  };
  return kinds;
}

// Bounds and default class for c + |t - t0|^alpha on [0, T].
PropagationSpeed::Bounds power_bounds(double c, double t0, double alpha, double T) {
  PropagationSpeed::Bounds b;
  double dmin = (t0 >= 0.0 && t0 <= T) ? 0.0 : std::min(std::abs(t0), std::abs(t0 - T));
  double dmax = std::max(std::abs(t0), std::abs(T - t0));
  b.a0 = c + std::pow(dmin, alpha);
  b.a_sup = c + std::pow(dmax, alpha);
  if (alpha >= 1.0) {
    b.lipschitz = alpha * std::pow(dmax, alpha - 1.0);
    b.hoelder_seminorm = b.lipschitz;
  } else {
    b.lipschitz = dmin > 0.0 ? alpha * std::pow(dmin, alpha - 1.0) : kInf;
    b.hoelder_seminorm = 1.0;
  }
  return b;
}

RegularityClass power_class(double a0, double alpha) {
  if (a0 > 0.0)
    return alpha < 1.0 ? RegularityClass::hoelder_positive(alpha)
                       : RegularityClass::lipschitz_positive();
  if (alpha < 2.0) return RegularityClass::hoelder_degenerate(alpha);
  return RegularityClass::smooth_degenerate(2);
}

std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i > n - 1) i = period - i;
  return static_cast<std::size_t>(i);
}

double resolve_alpha(std::optional<double> explicit_alpha, const RegularizedRoots& roots,
                     const PropagationSpeed& a) {
  if (explicit_alpha) return *explicit_alpha;
  if (roots.alpha) return *roots.alpha;
  if (auto r = root_exponent(a.regularity())) return *r;
  throw PreconditionError("no Hölder exponent available for " + a.label());
}

}  // namespace

std::string to_string(RegularityTag tag) {
  switch (tag) {
    case RegularityTag::LipschitzPositive: return "LipschitzPositive";
    case RegularityTag::HoelderPositive: return "HoelderPositive";
    case RegularityTag::SmoothDegenerate: return "SmoothDegenerate";
    case RegularityTag::HoelderDegenerate: return "HoelderDegenerate";
  }
  return "?";
}

RegularityClass RegularityClass::lipschitz_positive() { return {}; }

RegularityClass RegularityClass::hoelder_positive(double alpha) {
  RegularityClass c{RegularityTag::HoelderPositive, alpha, std::nullopt};
  c.validate();
  return c;
}

RegularityClass RegularityClass::smooth_degenerate(int l) {
  RegularityClass c{RegularityTag::SmoothDegenerate, std::nullopt, l};
  c.validate();
  return c;
}

RegularityClass RegularityClass::hoelder_degenerate(double alpha) {
  RegularityClass c{RegularityTag::HoelderDegenerate, alpha, std::nullopt};
  c.validate();
  return c;
}

void RegularityClass::validate() const {
  const bool wants_alpha = tag == RegularityTag::HoelderPositive || tag == RegularityTag::HoelderDegenerate;
  require(wants_alpha == alpha.has_value(), "alpha must be given exactly for Hoelder classes");
  require(smoothness_l.has_value() == (tag == RegularityTag::SmoothDegenerate),
          "smoothness_l must be given exactly for SmoothDegenerate");
  if (tag == RegularityTag::HoelderPositive)
    require(*alpha > 0.0 && *alpha < 1.0, "HoelderPositive needs 0 < alpha < 1");
  if (tag == RegularityTag::HoelderDegenerate)
    require(*alpha > 0.0 && *alpha < 2.0, "HoelderDegenerate needs 0 < alpha < 2");
  if (tag == RegularityTag::SmoothDegenerate)
    require(*smoothness_l >= 2, "SmoothDegenerate needs l >= 2");
}

std::optional<double> root_exponent(const RegularityClass& cls) {
  switch (cls.tag) {
    case RegularityTag::LipschitzPositive: return 1.0;
    case RegularityTag::HoelderPositive: return cls.alpha;
    case RegularityTag::HoelderDegenerate: return *cls.alpha / 2.0;
    case RegularityTag::SmoothDegenerate: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<double> UniformGrid::times() const {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = at(i);
  return t;
}

UniformGrid UniformGrid::with_density(double t0, double t1, double points_per_unit) {
  require(t1 > t0, "grid needs t1 > t0");
  require(points_per_unit > 0.0, "grid density must be positive");
  auto n = static_cast<std::size_t>(std::ceil((t1 - t0) * points_per_unit)) + 1;
  return {t0, t1, std::max<std::size_t>(n, 2)};
}

double SampledFunction::operator()(double t) const {
  const double h = grid.step();
  double x = (t - grid.t0) / h;
  if (x <= 0.0) return values.front();
  if (x >= static_cast<double>(grid.n - 1)) return values.back();
  auto i = static_cast<std::size_t>(x);
  double f = x - static_cast<double>(i);
  return values[i] + f * (values[i + 1] - values[i]);
}

void SampledFunction::write_dat(const std::string& path, const std::string& value_name) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({grid.at(i), values[i]});
  write_file_atomic(path, dat_text({"t", value_name}, rows));
}

SpeedSpec parse_speed(std::string_view text, double horizon) {
  SpeedSpec spec;
  spec.horizon = horizon;
  auto colon = text.find(':');
  spec.kind = std::string(text.substr(0, colon));
  auto it = catalogue().find(spec.kind);
  require(it != catalogue().end(), "unknown speed kind '" + spec.kind + "'");
  std::vector<double> values;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string tok(rest.substr(0, comma));
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(tok, &used);
        require(used == tok.size(), "bad number '" + tok + "' in speed spec");
      } catch (const std::logic_error&) {
        throw PreconditionError("bad number '" + tok + "' in speed spec");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  const auto& names = it->second;
  require(values.size() == names.size(),
          "speed '" + spec.kind + "' takes " + std::to_string(names.size()) + " parameters");
  for (std::size_t i = 0; i < names.size(); ++i) spec.params[names[i]] = values[i];
  return spec;
}

nlohmann::json to_json(const RegularityClass& cls) {
  nlohmann::json j = {{"tag", to_string(cls.tag)}};
  if (cls.alpha) j["alpha"] = *cls.alpha;
  if (cls.smoothness_l) j["smoothness_l"] = *cls.smoothness_l;
  return j;
}

RegularityClass regularity_from_json(const nlohmann::json& j) {
  RegularityClass c;
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "LipschitzPositive") c.tag = RegularityTag::LipschitzPositive;
  else if (tag == "HoelderPositive") c.tag = RegularityTag::HoelderPositive;
  else if (tag == "SmoothDegenerate") c.tag = RegularityTag::SmoothDegenerate;
  else if (tag == "HoelderDegenerate") c.tag = RegularityTag::HoelderDegenerate;
  else throw PreconditionError("unknown regularity tag '" + tag + "'");
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("smoothness_l")) c.smoothness_l = j["smoothness_l"].get<int>();
  c.validate();
  return c;
}

SpeedSpec speed_from_json(const nlohmann::json& j) {
  SpeedSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  require(catalogue().count(spec.kind) > 0, "unknown speed kind '" + spec.kind + "'");
  if (j.contains("params"))
    for (auto& [k, v] : j["params"].items()) spec.params[k] = v.get<double>();
  if (j.contains("horizon")) spec.horizon = j["horizon"].get<double>();
  if (j.contains("class")) spec.regularity = regularity_from_json(j["class"]);
  return spec;
}

nlohmann::json to_json(const SpeedSpec& spec) {
  nlohmann::json j = {{"kind", spec.kind}, {"params", spec.params}, {"horizon", spec.horizon}};
  if (spec.regularity) j["class"] = to_json(*spec.regularity);
  return j;
}

PropagationSpeed::PropagationSpeed(std::function<double(double)> a, double horizon, Bounds bounds,
                                   RegularityClass cls, std::string label,
                                   std::function<double(double)> derivative)
    : a_(std::move(a)),
      da_(std::move(derivative)),
      horizon_(horizon),
      bounds_(bounds),
      cls_(std::move(cls)),
      label_(std::move(label)) {
  require(horizon_ > 0.0, "horizon must be positive");
  require(bounds_.a0 >= 0.0, "speed must be nonnegative (a0 >= 0)");
  require(bounds_.a_sup >= bounds_.a0, "a_sup must be >= a0");
  cls_.validate();
  require(!cls_.positive() || bounds_.a0 > 0.0,
          "class " + to_string(cls_.tag) + " requires a0 > 0 but the minimum is 0");
}

PropagationSpeed PropagationSpeed::reversed() const {
  const double T = horizon_;
  auto a = a_;
  std::function<double(double)> da;
  if (da_) {
    auto d = da_;
    da = [d, T](double t) { return -d(T - t); };
  }
  PropagationSpeed r([a, T](double t) { return a(T - t); }, T, bounds_, cls_,
                     label_ + " reversed", da);
  r.constant_ = constant_;
  return r;
}

PropagationSpeed make_speed(const SpeedSpec& spec) {
  const double T = spec.horizon;
  require(T > 0.0 && std::isfinite(T), "horizon must be positive");
  for (const auto& [name, v] : spec.params)
    require(std::isfinite(v), "parameter '" + name + "' is not finite");

  std::function<double(double)> a, da;
  PropagationSpeed::Bounds b;
  RegularityClass cls;
  std::optional<double> constant;
  std::ostringstream label;

  if (spec.kind == "const") {
    const double c = param(spec, "c");
    require(c >= 0.0, "constant speed must be nonnegative");
    a = [c](double) { return c; };
    da = [](double) { return 0.0; };
    b = {c, c, 0.0, 0.0};
    cls = c > 0.0 ? RegularityClass::lipschitz_positive() : RegularityClass::smooth_degenerate(2);
    constant = c;
    label << "const(" << c << ")";
  } else if (spec.kind == "sin") {
    const double c = param(spec, "c"), bb = param(spec, "b"), w = param(spec, "omega");
    require(c - std::abs(bb) >= 0.0, "c + b sin(wt) may be negative (need c >= |b|)");
    a = [=](double t) { return c + bb * std::sin(w * t); };
    da = [=](double t) { return bb * w * std::cos(w * t); };
    b = {c - std::abs(bb), c + std::abs(bb), std::abs(bb * w), std::abs(bb * w)};
    cls = b.a0 > 0.0 ? RegularityClass::lipschitz_positive() : RegularityClass::smooth_degenerate(2);
    if (bb == 0.0 || w == 0.0) constant = c;
    label << c << "+" << bb << "sin(" << w << "t)";
  } else if (spec.kind == "holder_shift" || spec.kind == "holder") {
    const double c = spec.kind == "holder" ? 0.0 : param(spec, "c");
    const double t0 = param(spec, "t0"), al = param(spec, "alpha");
    require(c >= 0.0, "holder_shift needs c >= 0");
    require(al > 0.0, "Hoelder exponent must be positive");
    a = [=](double t) { return c + std::pow(std::abs(t - t0), al); };
    if (al >= 1.0)
      da = [=](double t) {
        double d = t - t0;
        return al == 1.0 ? (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0))
                         : al * std::pow(std::abs(d), al - 1.0) * (d >= 0 ? 1.0 : -1.0);
      };
    b = power_bounds(c, t0, al, T);
    cls = power_class(b.a0, al);
    if (c != 0.0) label << c << "+";
    label << "|t-" << t0 << "|^" << al;
  } else if (spec.kind == "t_squared") {
    a = [](double t) { return t * t; };
    da = [](double t) { return 2.0 * t; };
    b = {0.0, T * T, 2.0 * T, 2.0 * T};
    cls = RegularityClass::smooth_degenerate(2);
    label << "t^2";
  } else if (spec.kind == "sin_squared") {
    using std::numbers::pi;
    a = [](double t) { double s = std::sin(t); return s * s; };
    da = [](double t) { return std::sin(2.0 * t); };
    double smax = T >= pi / 2 ? 1.0 : std::sin(T) * std::sin(T);
    double dmax = T >= pi / 4 ? 1.0 : std::sin(2.0 * T);
    b = {0.0, smax, dmax, dmax};
    cls = RegularityClass::smooth_degenerate(2);
    label << "sin^2(t)";
  } else {
    throw PreconditionError("unknown speed kind '" + spec.kind + "'");
  }

  require(b.a0 >= 0.0, "speed '" + label.str() + "' is negative somewhere");
  if (spec.regularity) {
    spec.regularity->validate();
    require(!spec.regularity->positive() || b.a0 > 0.0,
            "positive class requested but the analytic minimum of " + label.str() + " is 0");
    cls = *spec.regularity;
  }
  PropagationSpeed s(a, T, b, cls, label.str(), da);
  s.constant_ = constant;
  return s;
}

std::vector<double> mollifier_weights(double epsilon, double step) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "mollifier width must be positive");
  require(step > 0.0, "grid step must be positive");
  const long J = static_cast<long>(std::ceil(epsilon / step)) - 1;
  if (J <= 0) return {1.0};
  std::vector<double> w(2 * J + 1);
  for (long j = -J; j <= J; ++j) {
    double x = static_cast<double>(j) * step / epsilon;
    w[j + J] = std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  }
  double mass = 0.0;
  for (double v : w) mass += v;
  for (double& v : w) v /= mass;
  return w;
}

SampledFunction mollify(const PropagationSpeed& a, double epsilon, double points_per_unit) {
  require(epsilon > 0.0, "epsilon must be positive");
  SampledFunction out;
  out.grid = UniformGrid::with_density(0.0, a.horizon(), points_per_unit);
  const std::size_t n = out.grid.n;
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = a(out.grid.at(i));
    require(v >= 0.0, "speed is negative at t = " + std::to_string(out.grid.at(i)));
    root[i] = std::sqrt(v);
  }
  const auto w = mollifier_weights(epsilon, out.grid.step());
  const long J = static_cast<long>(w.size() / 2);
  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long j = -J; j <= J; ++j)
      acc += w[j + J] * root[reflect_index(static_cast<long>(i) - j, static_cast<long>(n))];
    out.values[i] = acc;
  }
  return out;
}

double RegularizedRoots::min_gap() const {
  double g = kInf;
  for (std::size_t i = 0; i < lambda1.values.size(); ++i)
    g = std::min(g, lambda2.values[i] - lambda1.values[i]);
  return g;
}

RegularizedRoots regularized_roots(const PropagationSpeed& a, double epsilon, bool shifted,
                                   std::optional<double> root_alpha, double points_per_unit) {
  RegularizedRoots r;
  r.epsilon = epsilon;
  r.shifted = shifted;
  if (shifted) {
    if (!root_alpha) {
      require(a.regularity().tag == RegularityTag::HoelderDegenerate,
              "shifted roots need a HoelderDegenerate class or an explicit exponent");
      root_alpha = root_exponent(a.regularity());
    }
    require(*root_alpha > 0.0, "root exponent must be positive");
  }
  r.alpha = root_alpha;
  const SampledFunction m = mollify(a, epsilon, points_per_unit);
  r.lambda1 = m;
  r.lambda2 = m;
  const double shift = shifted ? std::pow(epsilon, *root_alpha) : 0.0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    r.lambda1.values[i] = -m.values[i] + shift;
    r.lambda2.values[i] = m.values[i] + 2.0 * shift;
  }
  return r;
}

RootDeviation root_deviation_check(const RegularizedRoots& roots, const PropagationSpeed& a,
                                   std::optional<double> root_alpha) {
  RootDeviation d;
  d.alpha = resolve_alpha(root_alpha, roots, a);
  const double scale = std::pow(roots.epsilon, d.alpha);
  const auto& g = roots.lambda2.grid;
  for (std::size_t i = 0; i < g.n; ++i) {
    double r = std::sqrt(a(g.at(i)));
    d.c1 = std::max(d.c1, std::abs(roots.lambda1.values[i] + r));
    d.c2 = std::max(d.c2, std::abs(roots.lambda2.values[i] - r));
  }
  d.c1 /= scale;
  d.c2 /= scale;
  return d;
}

double root_derivative_check(const RegularizedRoots& roots, const PropagationSpeed& a,
                             std::optional<double> root_alpha) {
  const double alpha = resolve_alpha(root_alpha, roots, a);
  const auto& g = roots.lambda2.grid;
  const double h = g.step();
  if (h > roots.epsilon / 10.0)
    throw ResolutionError("grid step " + std::to_string(h) + " exceeds epsilon/10 = " +
                          std::to_string(roots.epsilon / 10.0));
  const auto& v = roots.lambda2.values;
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < g.n; ++i)
    sup = std::max(sup, std::abs(v[i + 1] - v[i - 1]) / (2.0 * h));
  return sup * std::pow(roots.epsilon, 1.0 - alpha);
}

double hoelder_seminorm(const std::vector<double>& samples, double step, double alpha) {
  require(!samples.empty(), "Hoelder seminorm of an empty grid");
  require(alpha > 0.0 && alpha <= 1.0, "Hoelder exponent must lie in (0, 1]");
  double sup = 0.0;
  const std::size_t n = samples.size();
  for (std::size_t d = 1; d < n; d *= 2) {
    const double denom = std::pow(static_cast<double>(d) * step, alpha);
    for (std::size_t i = 0; i + d < n; ++i)
      sup = std::max(sup, std::abs(samples[i + d] - samples[i]) / denom);
  }
  return sup;
}

double hoelder_seminorm(const PropagationSpeed& a, double alpha, const UniformGrid& grid,
                        bool of_root) {
  require(grid.n >= 1, "Hoelder seminorm of an empty grid");
  std::vector<double> f(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double v = a(grid.at(i));
    f[i] = of_root ? std::sqrt(std::max(v, 0.0)) : v;
  }
  return hoelder_seminorm(f, grid.n > 1 ? grid.step() : 1.0, alpha);
}

}  // namespace hypowave
