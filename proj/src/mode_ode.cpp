#include "hypowave/mode_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hypowave/parallel.hpp"
#include "hypowave/report.hpp"

namespace hypowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
  cplx v, w;
  State operator+(const State& o) const { return {v + o.v, w + o.w}; }
  State operator*(double s) const { return {v * s, w * s}; }
};
inline State operator*(double s, const State& x) { return x * s; }

std::vector<double> default_samples(double T, std::size_t n) {
  require(n >= 2, "need at least two sample times");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = T;
  return t;
}

double norm2x2(double m00, double m01, double m10, double m11) {
  const double f = m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11;
  const double d = m00 * m11 - m01 * m10;
  return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * d * d))));
}

double case_root_alpha(int case_tag, const PropagationSpeed& a) {
  const auto& cls = a.regularity();
  if (case_tag == 2) {
    require(cls.positive(), "case 2 needs a positive speed class");
    return *root_exponent(cls);
  }
  require(cls.tag == RegularityTag::HoelderDegenerate, "case 4 needs a HoelderDegenerate speed");
  return *cls.alpha / 2.0;
}

void require_case(int case_tag) {
  require(case_tag >= 1 && case_tag <= 4, "case tag must be 1..4");
}

}  // namespace

ModeProblem::ModeProblem(double beta_, PropagationSpeed speed_, cplx v0_, cplx v1_,
                         std::optional<double> horizon_)
    : beta(beta_), speed(std::move(speed_)), v0(v0_), v1(v1_),
      horizon(horizon_.value_or(speed.horizon())) {
  require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0");
  require(horizon > 0.0, "horizon must be positive");
  require(horizon <= speed.horizon() * (1.0 + 1e-12), "horizon exceeds the speed's horizon");
  require(std::isfinite(std::abs(v0)) && std::isfinite(std::abs(v1)), "initial data not finite");
}

FirstOrderSystem reduce_to_system(const ModeProblem& p) {
  FirstOrderSystem sys;
  sys.V0 << cplx(0.0, p.beta) * p.v0, p.v1;
  auto a = p.speed;
  sys.A = [a](double t) {
    Eigen::Matrix2d A;
    A << 0.0, 1.0, a(t), 0.0;
    return A;
  };
  return sys;
}

ModeTrajectory integrate_mode(const ModeProblem& p, double rel_tol, const IntegrateOptions& opts) {
  require(rel_tol > 1e-14 && rel_tol < 1e-4, "rel_tol must lie in (1e-14, 1e-4)");
  const double T = p.horizon;
  std::vector<double> samples =
      opts.sample_times.empty() ? default_samples(T, opts.n_samples) : opts.sample_times;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(samples[i] >= 0.0 && samples[i] <= T * (1.0 + 1e-12), "sample time outside [0, T]");
    require(i == 0 || samples[i] > samples[i - 1], "sample times must increase");
  }

  ModeTrajectory tr;
  tr.beta = p.beta;
  tr.accepted_tolerance = rel_tol;
  tr.times = samples;
  tr.v.reserve(samples.size());
  tr.v_prime.reserve(samples.size());
  tr.energy.reserve(samples.size());
  const double b2 = p.beta * p.beta;
  auto record = [&](const State& y) {
    tr.v.push_back(y.v);
    tr.v_prime.push_back(y.w);
    tr.energy.push_back(b2 * std::norm(y.v) + std::norm(y.w));
  };

  const double E0 = p.initial_energy();
  if (p.beta == 0.0 || E0 == 0.0) {
    for (double t : samples) record({p.v0 + t * p.v1, p.v1});
    tr.sup_energy = *std::max_element(tr.energy.begin(), tr.energy.end());
    return tr;
  }

  const auto& a = p.speed;
  auto f = [&](double t, const State& y) { return State{y.w, -b2 * a(t) * y.v}; };
  auto wnorm = [&](const State& y) { return std::sqrt(b2 * std::norm(y.v) + std::norm(y.w)); };

  const double root_sup = std::sqrt(a.a_sup());
  const double h_max = root_sup > 0.0
                           ? std::min(T, 2.0 * std::numbers::pi / (20.0 * p.beta * root_sup))
                           : T;
  const double h_min = 1e-14 * std::max(1.0, T);
  const std::size_t max_steps = 200'000'000;

  State y{p.v0, p.v1};
  double t = 0.0;
  double h = std::min(h_max, 1e-3 * T);
  State k1 = f(t, y);
  tr.sup_energy = E0;
  std::size_t next = 0;
  while (next < samples.size() && samples[next] <= 0.0) {
    record(y);
    ++next;
  }

  while (next < samples.size()) {
    const double target = samples[next];
    bool hit = false;
    double step = std::min(h, h_max);
    if (t + step >= target - 1e-13 * T) {
      step = target - t;
      hit = true;
    }
    if (step < h_min) throw IntegrationError("step size underflow", t);
    if (tr.steps + tr.rejected > max_steps) throw IntegrationError("step budget exhausted", t);

    const State k2 = f(t + c2 * step, y + step * (a21 * k1));
    const State k3 = f(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
    const State k4 = f(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 =
        f(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + step, y5);
    const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale = std::max(wnorm(y), wnorm(y5));
    // Error per unit step, floored so steps across a kink in a stay finite.
    const double tol = rel_tol * std::max(step / T, 1e-6) * scale;
    const double en = wnorm(err);
    if (!std::isfinite(en)) throw IntegrationError("non-finite state", t);

    if (en <= tol) {
      t = hit ? target : t + step;
      y = y5;
      k1 = k7;
      ++tr.steps;
      tr.sup_energy = std::max(tr.sup_energy, b2 * std::norm(y.v) + std::norm(y.w));
      if (hit) {
        record(y);
        ++next;
      }
      const double grow = en > 0.0 ? 0.9 * std::pow(tol / en, 0.25) : 5.0;
      // A clipped step says nothing about the natural step; keep h.
      if (!hit || step >= h) h = step * std::clamp(grow, 0.2, 5.0);
    } else {
      ++tr.rejected;
      h = step * std::clamp(0.9 * std::pow(tol / en, 0.25), 0.1, 0.9);
    }
  }
  return tr;
}

Eigen::Matrix2d symmetriser(double a_val) {
  require(a_val >= 0.0, "symmetriser needs a >= 0");
  Eigen::Matrix2d S;
  S << 2.0 * a_val, 0.0, 0.0, 2.0;
  return S;
}

Eigen::Matrix2d quasi_symmetriser(double a_val, double epsilon) {
  require(a_val >= 0.0, "quasi-symmetriser needs a >= 0");
  require(epsilon > 0.0 && epsilon <= 1.0, "quasi-symmetriser needs epsilon in (0, 1]");
  Eigen::Matrix2d Q;
  Q << 2.0 * a_val + 2.0 * epsilon * epsilon, 0.0, 0.0, 2.0;
  return Q;
}

double energy(const Eigen::Matrix2cd& M, const Eigen::Vector2cd& V) {
  const double dev = (M - M.adjoint()).cwiseAbs().maxCoeff();
  require(dev <= 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()), "energy needs a Hermitian matrix");
  return std::real(V.dot(M * V));
}

double energy(const Eigen::Matrix2d& M, const Eigen::Vector2cd& V) {
  return energy(Eigen::Matrix2cd(M.cast<cplx>()), V);
}

std::vector<double> symmetriser_energy(const ModeTrajectory& traj, const PropagationSpeed& a) {
  std::vector<double> E(traj.times.size());
  for (std::size_t i = 0; i < E.size(); ++i)
    E[i] = energy(symmetriser(a(traj.times[i])), traj.state(i));
  return E;
}

double case1_growth_rate(const PropagationSpeed& a) {
  require(a.a0() > 0.0, "case 1 needs a0 > 0");
  const double c0 = 2.0 * std::min(a.a0(), 1.0);
  return 2.0 * a.lipschitz() / c0;
}

GronwallReport gronwall_check(const ModeTrajectory& traj, const PropagationSpeed& a, double rel_tol) {
  GronwallReport r;
  r.rate = case1_growth_rate(a);
  const auto E = symmetriser_energy(traj, a);
  r.max_excess = -kInf;
  for (std::size_t i = 0; i + 1 < E.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    const double m = std::max(E[i], E[i + 1]);
    if (m <= 0.0) continue;
    r.max_excess = std::max(r.max_excess, (E[i + 1] - E[i]) / (dt * m) - r.rate);
  }
  r.pass = r.max_excess <= 10.0 * rel_tol;
  return r;
}

double case_epsilon(int case_tag, double beta, const CaseParams& params) {
  require_case(case_tag);
  require(case_tag != 1, "case 1 uses no epsilon");
  require(beta >= params.beta0, "beta below beta0");
  if (case_tag == 2) return 1.0 / beta;
  if (case_tag == 3) {
    require(params.l.has_value() && *params.l >= 2, "case 3 needs l >= 2");
    const double l = *params.l;
    return std::pow(beta, -l / (2.0 + l));
  }
  require(params.alpha.has_value() && *params.alpha > 0.0, "case 4 needs alpha > 0");
  return std::pow(beta, -1.0 / (*params.alpha + 1.0));
}

CaseParams case_params(int case_tag, const PropagationSpeed& a, double beta0) {
  CaseParams c;
  c.beta0 = beta0;
  const auto& cls = a.regularity();
  if (case_tag == 3) {
    require(cls.tag == RegularityTag::SmoothDegenerate, "case 3 needs a SmoothDegenerate speed");
    c.l = cls.smoothness_l;
  }
  if (case_tag == 2 || case_tag == 4) c.alpha = case_root_alpha(case_tag, a);
  return c;
}

double envelope_prefactor(int case_tag, double beta, const CaseParams& params) {
  if (case_tag == 3) {
    const double l = *params.l;
    return 1.0 + std::pow(beta, l / (1.0 + l / 2.0));
  }
  if (case_tag == 4) {
    const double al = *params.alpha;
    return 1.0 + std::pow(beta, 2.0 * al / (al + 1.0));
  }
  return 1.0;
}

void check_case_index(int case_tag, const PropagationSpeed& a, double s) {
  require_case(case_tag);
  const auto& cls = a.regularity();
  if (case_tag == 1) {
    require(cls.tag == RegularityTag::LipschitzPositive, "case 1 needs a LipschitzPositive speed");
    return;
  }
  require(std::isfinite(s), "Gevrey index must be finite");
  if (case_tag == 2) {
    require(cls.positive(), "case 2 needs a positive speed class");
    require(s >= 1.0, "case 2 needs s >= 1");
    if (cls.tag == RegularityTag::HoelderPositive) {
      const double al = *cls.alpha;
      require(s < 1.0 + al / (1.0 - al), "case 2 needs s < 1 + alpha/(1 - alpha)");
    }
  } else if (case_tag == 3) {
    require(cls.tag == RegularityTag::SmoothDegenerate, "case 3 needs a SmoothDegenerate speed");
    const double sigma = 1.0 + *cls.smoothness_l / 2.0;
    require(std::abs(s - sigma) <= 1e-12, "case 3 needs sigma = 1 + l/2");
  } else {
    require(cls.tag == RegularityTag::HoelderDegenerate, "case 4 needs a HoelderDegenerate speed");
    require(s >= 1.0 && s < 1.0 + *cls.alpha / 2.0, "case 4 needs 1 <= s < 1 + alpha/2");
  }
}

BoundPrediction predict_envelope(int case_tag, const ModeProblem& p, double s, double K, double C) {
  check_case_index(case_tag, p.speed, s);
  require(C > 0.0 && K >= 0.0, "envelope needs C > 0 and K >= 0");
  BoundPrediction b;
  b.case_tag = case_tag;
  b.K = K;
  b.C = C;
  b.E0 = p.initial_energy();
  const CaseParams cp = case_tag == 1 ? CaseParams{} : case_params(case_tag, p.speed);
  b.s_or_sigma = case_tag == 1 ? 1.0 : s;
  const double E0 = b.E0;
  switch (case_tag) {
    case 1:
      b.envelope = [=](double, double) { return C * E0; };
      break;
    case 3:
      b.envelope = [=](double, double beta) {
        return C * E0 * envelope_prefactor(3, beta, cp) * std::exp(K * std::pow(beta, 1.0 / s));
      };
      break;
    default:
      b.envelope = [=](double t, double beta) {
        return C * E0 * envelope_prefactor(case_tag, beta, cp) *
               std::exp(K * t * std::pow(beta, 1.0 / s));
      };
  }
  return b;
}

std::vector<double> transformed_log_energy(const ModeTrajectory& traj, const RegularizedRoots& roots,
                                           double rho0, double K, double s, double beta) {
  require(beta > 0.0, "transform defined for beta > 0");
  require(s > 0.0, "Gevrey index must be positive");
  const double bs = std::pow(beta, 1.0 / s);
  std::vector<double> out(traj.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = traj.times[i];
    const double l1 = roots.lambda1(t), l2 = roots.lambda2(t);
    if (!(l2 - l1 > 0.0)) throw PreconditionError("singular H at t = " + std::to_string(t));
    // det H · H^{-1} = [[λ2, −1], [−λ1, 1]]
    const Eigen::Vector2cd V = traj.state(i);
    const cplx w0 = l2 * V(0) - V(1);
    const cplx w1 = -l1 * V(0) + V(1);
    const double n = std::sqrt(std::norm(w0) + std::norm(w1));
    out[i] = (rho0 - K * t) * bs + std::log(n);
  }
  return out;
}

std::vector<double> transformed_energy(const ModeTrajectory& traj, const RegularizedRoots& roots,
                                       double rho0, double K, double s, double beta) {
  auto lw = transformed_log_energy(traj, roots, rho0, K, s, beta);
  for (double& x : lw) x = std::exp(x);
  return lw;
}

MonotonicityReport check_w_monotonicity(int case_tag, const PropagationSpeed& a,
                                        const std::vector<double>& beta_grid, double s,
                                        double rel_tol, double points_per_unit) {
  require(case_tag == 2 || case_tag == 4, "W-monotonicity applies to cases 2 and 4");
  require(!beta_grid.empty(), "empty beta grid");
  check_case_index(case_tag, a, s);
  MonotonicityReport rep;
  rep.case_tag = case_tag;
  rep.s = s;
  rep.alpha = case_root_alpha(case_tag, a);
  rep.gamma = case_tag == 2 ? 1.0 - rep.alpha : 1.0 / (1.0 + rep.alpha);
  rep.beta0 = *std::min_element(beta_grid.begin(), beta_grid.end());
  require(rep.beta0 > 0.0, "beta grid must be positive");
  CaseParams cp = case_params(case_tag, a, rep.beta0);

  struct Prepared {
    RegularizedRoots roots;
    double phi_max = 0.0;
  };
  auto prepared = parallel_map(beta_grid.size(), [&](std::size_t b) {
    const double beta = beta_grid[b];
    const double eps = case_epsilon(case_tag, beta, cp);
    Prepared pr{regularized_roots(a, eps, case_tag == 4, rep.alpha, points_per_unit), 0.0};
    const auto& g = pr.roots.lambda1.grid;
    const auto& L1 = pr.roots.lambda1.values;
    const auto& L2 = pr.roots.lambda2.values;
    const double h = g.step();
    for (std::size_t i = 0; i < g.n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == g.n ? i : i + 1;
      const double span = static_cast<double>(hi - lo) * h;
      const double d1 = (L1[hi] - L1[lo]) / span, d2 = (L2[hi] - L2[lo]) / span;
      const double l1 = L1[i], l2 = L2[i], det = l2 - l1;
      if (!(det > 0.0)) throw PreconditionError("singular H at t = " + std::to_string(g.at(i)));
      const double av = a(g.at(i));
      // H^{-1} H_t with H_t = [[0, 0], [λ1', λ2']]
      const double hh = norm2x2(-d1 / det, -d2 / det, d1 / det, d2 / det);
      // M = H^{-1} A H, A = [[0, 1], [a, 0]]
      const double m01 = (l2 * l2 - av) / det, m10 = (av - l1 * l1) / det;
      const double skew = std::abs(m01 - m10);  // ‖M − Mᵀ‖ for a real 2×2
      const double phi = std::abs(d2 - d1) / det + hh + 0.5 * beta * skew;
      pr.phi_max = std::max(pr.phi_max, phi);
    }
    return pr;
  });

  rep.k = 0.0;
  for (std::size_t b = 0; b < beta_grid.size(); ++b)
    rep.k = std::max(rep.k, prepared[b].phi_max / std::pow(beta_grid[b], rep.gamma));
  rep.K = rep.k * std::pow(rep.beta0, rep.gamma - 1.0 / s);

  rep.rows = parallel_map(beta_grid.size(), [&](std::size_t b) {
    const double beta = beta_grid[b];
    const auto& roots = prepared[b].roots;
    MonotonicityRow row;
    row.beta = beta;
    row.epsilon = roots.epsilon;
    row.phi_max = prepared[b].phi_max;
    IntegrateOptions opts;
    opts.sample_times = roots.lambda1.grid.times();
    for (int col = 0; col < 2; ++col) {
      ModeProblem p(beta, a, col == 0 ? cplx(1.0 / beta) : cplx(0.0), col == 0 ? 0.0 : 1.0);
      const auto tr = integrate_mode(p, rel_tol, opts);
      const auto lw = transformed_log_energy(tr, roots, 0.0, rep.K, s, beta);
      for (std::size_t i = 0; i + 1 < lw.size(); ++i)
        row.max_increase =
            std::max(row.max_increase, std::exp(lw[i + 1] - lw[0]) - std::exp(lw[i] - lw[0]));
    }
    row.pass = row.max_increase <= 10.0 * rel_tol;
    return row;
  });
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.pass; });
  return rep;
}

std::string VerificationReport::csv() const {
  CsvTable t{{"case", "beta", "s", "sup_ratio", "fitted_K", "residual"}, {}};
  for (const auto& r : rows)
    t.add_row({std::to_string(case_tag), format_double(r.beta), format_double(s),
               format_double(r.sup_ratio), format_double(fitted_K), format_double(r.residual)});
  return t.str();
}

VerificationReport verify_envelope(int case_tag, const PropagationSpeed& a,
                                   const std::vector<double>& beta_grid, double s, double T,
                                   double rel_tol, double beta0) {
  require(!beta_grid.empty(), "empty beta grid");
  for (double b : beta_grid) require(b >= beta0, "beta grid entries must be >= beta0");
  check_case_index(case_tag, a, s);
  require(T > 0.0 && T <= a.horizon() * (1.0 + 1e-12), "T must lie in (0, horizon]");

  VerificationReport rep;
  rep.case_tag = case_tag;
  rep.s = s;
  rep.T = T;
  const CaseParams cp = case_tag == 1 ? CaseParams{} : case_params(case_tag, a, beta0);
  if (case_tag == 1) rep.growth_rate = case1_growth_rate(a);

  std::vector<double> grid = beta_grid;
  std::sort(grid.begin(), grid.end());
  rep.rows = parallel_map(grid.size(), [&](std::size_t b) {
    const double beta = grid[b];
    VerificationRow row;
    row.beta = beta;
    for (int col = 0; col < 2; ++col) {
      ModeProblem p(beta, a, col == 0 ? cplx(1.0 / beta) : cplx(0.0), col == 0 ? 0.0 : 1.0, T);
      const auto tr = integrate_mode(p, rel_tol);
      row.sup_ratio = std::max(row.sup_ratio, tr.sup_energy / p.initial_energy());
    }
    const double idx = case_tag == 1 ? 1.0 : s;
    row.x = case_tag == 3 ? std::pow(beta, 1.0 / idx) : T * std::pow(beta, 1.0 / idx);
    row.y = std::log(row.sup_ratio / envelope_prefactor(case_tag, beta, cp));
    return row;
  });

  // Least squares y = log C + K x.
  const double n = static_cast<double>(rep.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rep.rows) {
    sx += r.x;
    sy += r.y;
    sxx += r.x * r.x;
    sxy += r.x * r.y;
  }
  const double den = n * sxx - sx * sx;
  if (rep.rows.size() >= 2 && den > 0.0) {
    rep.fitted_K = (n * sxy - sx * sy) / den;
    rep.fitted_log_C = (sy - rep.fitted_K * sx) / n;
  } else {
    rep.fitted_K = rep.rows[0].y / rep.rows[0].x;
    rep.fitted_log_C = 0.0;
  }
  double rmin = kInf, rmax = 0.0;
  for (auto& r : rep.rows) {
    r.residual = r.y - (rep.fitted_log_C + rep.fitted_K * r.x);
    rep.residual_spread = std::max(rep.residual_spread, std::abs(r.residual));
    rmin = std::min(rmin, r.sup_ratio);
    rmax = std::max(rmax, r.sup_ratio);
  }
  rep.ratio_spread = rmax / rmin;

  std::ostringstream detail;
  const bool finite = std::isfinite(rep.fitted_K) && std::isfinite(rep.residual_spread);
  if (case_tag == 1) {
    rep.pass = finite && rep.ratio_spread <= 2.0;
    detail << "ratio spread " << rep.ratio_spread << " (<= 2)";
  } else {
    // Per-β slope bound q_i = max(y_i, 0)/x_i must not grow along the tail.
    bool tail_ok = true;
    double prev = kInf;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const double q = std::max(rep.rows[i].y, 0.0) / rep.rows[i].x;
      if (i >= 2 && q > prev + 1e-9) tail_ok = false;
      prev = q;
    }
    rep.pass = finite && tail_ok;
    detail << "fitted K " << rep.fitted_K << (tail_ok ? ", tail nonincreasing" : ", tail grows");
  }
  rep.detail = detail.str();
  return rep;
}

}  // namespace hypowave
