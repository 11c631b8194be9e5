#include "hypowave/wave_solver.hpp"

#include <cmath>
#include <map>
#include <random>

#include "hypowave/parallel.hpp"
#include "hypowave/report.hpp"

namespace hypowave::wave {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

double su2_mu(int l2, int row) {
  const int m2 = 2 * row - l2;
  return (l2 * (l2 + 2) - m2 * m2) / 4.0;
}

void check_same_support(const SpectralField& f0, const SpectralField& f1) {
  require(f0.index() == f1.index(), "u0 and u1 live on different groups");
  if (const auto* a = std::get_if<su2::SpectralFieldSU2>(&f0)) {
    const auto& b = std::get<su2::SpectralFieldSU2>(f1);
    a->validate();
    b.validate();
    require(a->lmax.twice == b.lmax.twice, "u0 and u1 have different lmax");
    require(a->coeffs.size() == b.coeffs.size(), "u0 and u1 have different l supports");
    for (auto ia = a->coeffs.begin(), ib = b.coeffs.begin(); ia != a->coeffs.end(); ++ia, ++ib)
      require(ia->first == ib->first, "u0 and u1 have different l supports");
    return;
  }
  const auto& a = std::get<heis::SpectralFieldHeis>(f0);
  const auto& b = std::get<heis::SpectralFieldHeis>(f1);
  a.validate();
  b.validate();
  require(a.trunc == b.trunc, "u0 and u1 have different truncations");
  require(a.lambdas == b.lambdas, "u0 and u1 have different lambda grids");
}

std::vector<double> uniform_times(double T, std::size_t n) {
  require(n >= 2, "need at least two sample times");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = T;
  return t;
}

// Fundamental pair for one β: (v, v') from data (1, 0) and (0, 1).
struct Fundamental {
  std::vector<cplx> v0, dv0, v1, dv1;
};

// Builds û(t_i), ∂tû(t_i) from per-μ fundamental solutions.
WaveSolution assemble(const SpectralField& f0, const SpectralField& f1, const DecoupledSystem& sys,
                      const std::vector<double>& times, const std::vector<Fundamental>& fund) {
  std::map<double, std::size_t> index;
  for (std::size_t i = 0; i < sys.distinct_mu.size(); ++i) index[sys.distinct_mu[i]] = i;
  WaveSolution sol;
  sol.times = times;
  sol.u0 = f0;
  sol.u1 = f1;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    auto combine = [&](bool derivative) {
      SpectralField out = f0;
      if (auto* s = std::get_if<su2::SpectralFieldSU2>(&out)) {
        const auto& a = std::get<su2::SpectralFieldSU2>(f0);
        const auto& b = std::get<su2::SpectralFieldSU2>(f1);
        for (auto& [l2, m] : s->coeffs) {
          const auto& ma = a.coeffs.at(l2);
          const auto& mb = b.coeffs.at(l2);
          for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const auto& F = fund[index.at(su2_mu(l2, static_cast<int>(r)))];
            const cplx p = derivative ? F.dv0[ti] : F.v0[ti];
            const cplx q = derivative ? F.dv1[ti] : F.v1[ti];
            m.row(r) = p * ma.row(r) + q * mb.row(r);
          }
        }
      } else {
        auto& h = std::get<heis::SpectralFieldHeis>(out);
        const auto& a = std::get<heis::SpectralFieldHeis>(f0);
        const auto& b = std::get<heis::SpectralFieldHeis>(f1);
        for (std::size_t j = 0; j < h.lambdas.size(); ++j)
          for (Eigen::Index k = 0; k < h.coeffs[j].rows(); ++k) {
            const double mu = std::abs(h.lambdas[j]) * (2.0 * static_cast<double>(k) + 1.0);
            const auto& F = fund[index.at(mu)];
            const cplx p = derivative ? F.dv0[ti] : F.v0[ti];
            const cplx q = derivative ? F.dv1[ti] : F.v1[ti];
            h.coeffs[j].row(k) = p * a.coeffs[j].row(k) + q * b.coeffs[j].row(k);
          }
      }
      return out;
    };
    sol.u.push_back(combine(false));
    sol.ut.push_back(combine(true));
  }
  return sol;
}

double sup_ratio(std::vector<RatioRow>& rows) {
  double c = 0.0;
  for (auto& r : rows) {
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    c = std::max(c, r.ratio);
  }
  return c;
}

std::string ratio_csv(const std::vector<RatioRow>& rows) {
  CsvTable t{{"t", "lhs", "rhs", "ratio"}, {}};
  for (const auto& r : rows)
    t.add_row({format_double(r.t), format_double(r.lhs), format_double(r.rhs), format_double(r.ratio)});
  return t.str();
}

}  // namespace

DecoupledSystem decouple(const SpectralField& f0, const SpectralField& f1, const PropagationSpeed& speed) {
  check_same_support(f0, f1);
  DecoupledSystem sys{group_of(f0), {}, {}, speed};
  std::map<double, std::size_t> distinct;
  auto add = [&](ModeKey key, double mu, int mult) {
    auto [it, inserted] = distinct.emplace(mu, distinct.size());
    sys.modes.push_back({key, mu, std::sqrt(mu), mult, it->second});
  };
  if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&f0)) {
    for (const auto& [l2, m] : s->coeffs)
      for (int r = 0; r <= l2; ++r) add({l2, 2 * r - l2}, su2_mu(l2, r), l2 + 1);
  } else {
    const auto& h = std::get<heis::SpectralFieldHeis>(f0);
    for (std::size_t j = 0; j < h.lambdas.size(); ++j)
      for (int k = 0; k < h.trunc; ++k)
        add({static_cast<int>(j), k}, std::abs(h.lambdas[j]) * (2.0 * k + 1.0), h.trunc);
  }
  sys.distinct_mu.resize(distinct.size());
  for (const auto& [mu, i] : distinct) sys.distinct_mu[i] = mu;
  return sys;
}

WaveSolution solve_cauchy(const SpectralField& f0, const SpectralField& f1,
                          const PropagationSpeed& speed, double T, std::size_t n_samples,
                          double rel_tol) {
  require(T > 0.0 && speed.horizon() >= T * (1.0 - 1e-12), "speed horizon must cover T");
  const DecoupledSystem sys = decouple(f0, f1, speed);
  IntegrateOptions opts;
  opts.sample_times = uniform_times(T, n_samples);
  auto fund = parallel_map(sys.distinct_mu.size(), [&](std::size_t i) {
    const double beta = std::sqrt(sys.distinct_mu[i]);
    Fundamental F;
    try {
      const auto a = integrate_mode(ModeProblem(beta, speed, 1.0, 0.0, T), rel_tol, opts);
      const auto b = integrate_mode(ModeProblem(beta, speed, 0.0, 1.0, T), rel_tol, opts);
      F = {a.v, a.v_prime, b.v, b.v_prime};
    } catch (const IntegrationError& e) {
      std::string what = e.what();
      what = what.substr(0, what.rfind(" (t = "));
      throw IntegrationError("mode mu = " + format_double(sys.distinct_mu[i]) + ": " + what, e.time());
    }
    return F;
  });
  return assemble(f0, f1, sys, opts.sample_times, fund);
}

WaveSolution exact_const_solution(const SpectralField& f0, const SpectralField& f1, double c,
                                  double T, std::size_t n_samples) {
  require(c > 0.0, "exact solution needs a constant c > 0");
  const auto speed = make_speed("const:" + format_double(c), T);
  const DecoupledSystem sys = decouple(f0, f1, speed);
  const auto times = uniform_times(T, n_samples);
  std::vector<Fundamental> fund(sys.distinct_mu.size());
  for (std::size_t i = 0; i < fund.size(); ++i) {
    const double w = std::sqrt(c * sys.distinct_mu[i]);
    auto& F = fund[i];
    for (double t : times) {
      if (w == 0.0) {
        F.v0.push_back(1.0);
        F.dv0.push_back(0.0);
        F.v1.push_back(t);
        F.dv1.push_back(1.0);
      } else {
        F.v0.push_back(std::cos(w * t));
        F.dv0.push_back(-w * std::sin(w * t));
        F.v1.push_back(std::sin(w * t) / w);
        F.dv1.push_back(std::cos(w * t));
      }
    }
  }
  return assemble(f0, f1, sys, times, fund);
}

double max_deviation(const WaveSolution& a, const WaveSolution& b) {
  require(a.times.size() == b.times.size(), "solutions have different sample counts");
  double dev = 0.0;
  auto diff = [&](const SpectralField& x, const SpectralField& y) {
    if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&x)) {
      const auto& o = std::get<su2::SpectralFieldSU2>(y);
      for (const auto& [l2, m] : s->coeffs) dev = std::max(dev, (m - o.coeffs.at(l2)).cwiseAbs().maxCoeff());
    } else {
      const auto& h = std::get<heis::SpectralFieldHeis>(x);
      const auto& o = std::get<heis::SpectralFieldHeis>(y);
      for (std::size_t j = 0; j < h.coeffs.size(); ++j)
        dev = std::max(dev, (h.coeffs[j] - o.coeffs[j]).cwiseAbs().maxCoeff());
    }
  };
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    diff(a.u[i], b.u[i]);
    diff(a.ut[i], b.ut[i]);
  }
  return dev;
}

std::string SobolevReport::csv() const { return ratio_csv(rows); }

nlohmann::json SobolevReport::summary() const {
  return {{"s", s}, {"C_meas", C_meas}, {"zero_data", zero_data}, {"verdict", "PASS"}};
}

SobolevReport verify_sobolev_wellposedness(const WaveSolution& sol, double s) {
  SobolevReport r;
  r.s = s;
  auto sq = [](double x) { return x * x; };
  const double rhs = sq(gevrey::sobolev_norm(sol.u0, s + 1.0)) + sq(gevrey::sobolev_norm(sol.u1, s));
  r.zero_data = rhs == 0.0;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double lhs =
        sq(gevrey::sobolev_norm(sol.u[i], s + 1.0)) + sq(gevrey::sobolev_norm(sol.ut[i], s));
    r.rows.push_back({sol.times[i], lhs, rhs, 0.0});
  }
  r.C_meas = sup_ratio(r.rows);
  return r;
}

TruncationStudy sobolev_truncation_study(
    const std::function<std::pair<SpectralField, SpectralField>(int)>& data,
    const PropagationSpeed& speed, double T, double s, int trunc, std::size_t n_samples,
    double rel_tol) {
  TruncationStudy st;
  const auto [a0, a1] = data(trunc);
  st.coarse = verify_sobolev_wellposedness(solve_cauchy(a0, a1, speed, T, n_samples, rel_tol), s);
  const auto [b0, b1] = data(2 * trunc);
  st.fine = verify_sobolev_wellposedness(solve_cauchy(b0, b1, speed, T, n_samples, rel_tol), s);
  if (st.coarse.zero_data && st.fine.zero_data) {
    st.pass = true;
    return st;
  }
  st.log_ratio = std::log(st.fine.C_meas / st.coarse.C_meas);
  st.pass = std::isfinite(st.log_ratio) && std::abs(st.log_ratio) <= std::log(2.0);
  return st;
}

std::string GevreyWellposedness::csv() const { return ratio_csv(rows); }

nlohmann::json GevreyWellposedness::summary() const {
  const char* v = verdict == GevreyVerdict::Pass ? "PASS"
                  : verdict == GevreyVerdict::Fail ? "FAIL" : "INCONCLUSIVE";
  nlohmann::json j = {{"case", case_tag}, {"s", s},           {"A", A},     {"K_fit", K_fit},
                      {"B", B},           {"C_meas", C_meas}, {"verdict", v}};
  if (!note.empty()) j["note"] = note;
  return j;
}

GevreyWellposedness verify_gevrey_wellposedness(const WaveSolution& sol, int case_tag, double s,
                                                double A, double T, double K_fit, double C_bound) {
  require(case_tag >= 2 && case_tag <= 4, "Gevrey well-posedness covers cases 2-4");
  require(s >= 1.0, "s must be >= 1");
  require(A > 0.0, "A must be positive");
  GevreyWellposedness g;
  g.case_tag = case_tag;
  g.s = s;
  g.A = A;
  g.K_fit = K_fit;
  g.B = A - std::max(K_fit, 0.0) * T;
  if (!(g.B > 0.0)) {
    g.verdict = GevreyVerdict::Inconclusive;
    g.note = "K too large for this (A, T)";
    return g;
  }
  const double p = 1.0 / (2.0 * s);
  auto ewt = [&](double D, double extra) {
    return [=](double mu) { return std::exp(D * std::pow(mu, p)) * std::pow(mu, extra); };
  };
  const double rhs = plancherel_norm(apply_multiplier(sol.u0, ewt(A, 0.5))) +
                     plancherel_norm(apply_multiplier(sol.u1, ewt(A, 0.0)));
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double lhs = plancherel_norm(apply_multiplier(sol.u[i], ewt(g.B, 0.0))) +
                       plancherel_norm(apply_multiplier(sol.ut[i], ewt(g.B, 0.0)));
    g.rows.push_back({sol.times[i], lhs, rhs, 0.0});
  }
  g.C_meas = sup_ratio(g.rows);
  g.verdict = std::isfinite(g.C_meas) && g.C_meas <= C_bound ? GevreyVerdict::Pass : GevreyVerdict::Fail;
  return g;
}

double fitted_growth_constant(int case_tag, const PropagationSpeed& speed, double s, double T,
                              const std::vector<double>& beta_grid, double rel_tol) {
  return verify_envelope(case_tag, speed, beta_grid, s, T, rel_tol).fitted_K;
}

su2::SpectralFieldSU2 weighted_su2_field(int lmax2, double c, unsigned seed, int lmin2) {
  require(lmax2 >= 0 && lmin2 >= 0 && lmin2 <= lmax2, "bad l range");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  su2::SpectralFieldSU2 f;
  f.lmax = {lmax2};
  for (int l2 = lmin2; l2 <= lmax2; ++l2) {
    CMatrix m(l2 + 1, l2 + 1);
    const double w = std::exp(-c * (l2 + 1));  // 2l + 1 = l2 + 1
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double re = u(rng);
        const double im = u(rng);
        m(i, j) = w * cplx(re, im);
      }
    f.coeffs[l2] = m;
  }
  return f;
}

heis::SpectralFieldHeis weighted_heis_field(const std::vector<double>& lambdas, int N, double c,
                                           unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  heis::SpectralFieldHeis f;
  f.lambdas = lambdas;
  f.trunc = N;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    CMatrix m(N, N);
    for (Eigen::Index col = 0; col < N; ++col)
      for (Eigen::Index k = 0; k < N; ++k) {
        const double re = u(rng);
        const double im = u(rng);
        m(k, col) = std::exp(-c * (2.0 * k + 1.0)) * cplx(re, im);
      }
    f.coeffs.push_back(m);
  }
  f.validate();
  return f;
}

}  // namespace hypowave::wave
