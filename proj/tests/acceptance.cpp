// Acceptance run: one PASS/FAIL line per criterion, INFO lines for related measurements.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hypowave/gevrey.hpp"
#include "hypowave/heisenberg.hpp"
#include "hypowave/mode_ode.hpp"
#include "hypowave/su2.hpp"
#include "hypowave/wave_solver.hpp"

using namespace hypowave;

namespace {

struct Outcome {
  bool pass = false;
  std::string measured;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d  %-34s %s  [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              o.measured.c_str(), dt, limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("INFO      %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<std::string> words(const std::string& letters, int max_len, bool with_empty) {
  std::vector<std::string> out, layer{""};
  if (with_empty) out.push_back("");
  for (int n = 1; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& w : layer)
      for (char c : letters) next.push_back(w + c);
    layer = next;
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

su2::SpectralFieldSU2 zero_like(su2::SpectralFieldSU2 f) {
  for (auto& [l2, m] : f.coeffs) m.setZero();
  return f;
}

// 1. ------------------------------------------------------------------------
void symbol_algebra() {
  double minus = 0.0, plus = 0.0;
  criterion(1, "SU(2) ladder anticommutator", 1.0, [&] {
    for (int l2 = 0; l2 <= 20; ++l2) {
      const su2::HalfInt l{l2};
      const CMatrix X = su2::ladder_symbol(su2::Ladder::X, l).matrix;
      const CMatrix Y = su2::ladder_symbol(su2::Ladder::Y, l).matrix;
      const CMatrix L = su2::sublaplacian_symbol(l).matrix;
      const CMatrix ac = X * Y + Y * X;
      minus = std::max(minus, max_abs(-0.5 * ac - L));
      plus = std::max(plus, max_abs(0.5 * ac - L));
    }
    return Outcome{minus <= 1e-12, fmt("max|-1/2(XY+YX) - L| = %.3g (tol 1e-12)", minus)};
  });
  info(fmt("C1 with the opposite sign: max|+1/2(XY+YX) - L| = %.3g over l <= 10", plus));
}

// 2. ------------------------------------------------------------------------
void riesz_uniformity() {
  double worst_ratio = 0.0, single_dev = 0.0, factorial_ratio = 0.0;
  std::string worst_word;
  double worst_l = 0.0;
  criterion(2, "SU(2) Riesz norms <= 2^|w|", 10.0, [&] {
    for (const auto& w : words("XY", 6, false)) {
      const double q = static_cast<double>(w.size());
      const double bound = std::pow(2.0, q);
      const double limit = std::sqrt(std::pow(2.0, q) * std::tgamma(q + 1.0));
      for (int l2 = 1; l2 <= 100; ++l2) {
        const double n = su2::matrix_norms(su2::riesz_symbol(w, su2::HalfInt{l2}).matrix).op;
        if (n / bound > worst_ratio) {
          worst_ratio = n / bound;
          worst_word = w;
          worst_l = l2 / 2.0;
        }
        factorial_ratio = std::max(factorial_ratio, n / limit);
        if (w.size() == 1) single_dev = std::max(single_dev, std::abs(n - std::sqrt(2.0)));
      }
    }
    const bool pass = worst_ratio <= 1.0 && single_dev <= 1e-10;
    return Outcome{pass, "max op/2^|w| = " + fmt("%.4g", worst_ratio) + " (" + worst_word + " at l = " +
                             fmt("%g", worst_l) + "); single letter |op - sqrt2| = " + fmt("%.2g", single_dev)};
  });
  info(fmt("C2 single-letter norm sqrt2 = %.12f against the stated bound 2", std::sqrt(2.0)));
  info(fmt("C2 max op/sqrt(2^q q!) over |w| <= 6, l <= 50: %.6f (<= 1 holds)", factorial_ratio));
}

// 3. ------------------------------------------------------------------------
void lambda_invariance() {
  double all = 0.0, same = 0.0, mirror = 0.0;
  criterion(3, "Heisenberg Riesz lambda invariance", 10.0, [&] {
    const std::vector<double> lams{-10.0, -1.0, -0.1, 0.1, 1.0, 10.0};
    for (const auto& w : words("ZB", 6, true)) {
      std::vector<CMatrix> v;
      for (double l : lams) v.push_back(heis::riesz_symbol(w, l, 128).valid());
      for (std::size_t i = 1; i < v.size(); ++i) all = std::max(all, max_abs(v[i] - v[0]));
      for (std::size_t i : {1u, 2u}) same = std::max(same, max_abs(v[i] - v[0]));
      for (std::size_t i : {4u, 5u}) same = std::max(same, max_abs(v[i] - v[3]));
      mirror = std::max(mirror, max_abs(v[2] - heis::riesz_symbol(heis::conjugate_word(w), 0.1, 128).valid()));
    }
    return Outcome{all <= 1e-12, fmt("max deviation across all six lambdas = %.3g (tol 1e-12)", all)};
  });
  info(fmt("C3 within one sign of lambda: max deviation = %.3g", same));
  info(fmt("C3 mirror riesz(w, -lambda) = riesz(conj w, lambda): max deviation = %.3g", mirror));
}

// 4. ------------------------------------------------------------------------
void commutation() {
  criterion(4, "Heisenberg commutator and sub-Laplacian", 1.0, [&] {
    const int N = 64;
    double comm = 0.0, sq = 0.0;
    for (double lam : {1.0, -1.0, 4.0, -4.0}) {
      comm = std::max(comm, heis::commutator_check(lam, N));
      const CMatrix X = heis::vectorfield_symbol(heis::Field::X, lam, N).matrix;
      const CMatrix Y = heis::vectorfield_symbol(heis::Field::Y, lam, N).matrix;
      const CMatrix d = -(X * X + Y * Y) - heis::sublaplacian_symbol(lam, N).matrix;
      sq = std::max(sq, max_abs(d.topLeftCorner(N - 2, N - 2)));
    }
    return Outcome{comm <= 1e-12 && sq <= 1e-12,
                   fmt("commutator dev = %.3g, -(X^2+Y^2) - L dev = %.3g (tol 1e-12)", comm, sq)};
  });
}

// 5. ------------------------------------------------------------------------
void case1_energy() {
  criterion(5, "Case 1 energy ratio", 30.0, [&] {
    const auto a = make_speed("sin:2,1,4");
    const auto rep = verify_envelope(1, a, {1, 10, 100, 1000}, 1.0, 1.0, 1e-10);
    double sup = 0.0;
    for (const auto& r : rep.rows) sup = std::max(sup, r.sup_ratio);
    const double bound = std::exp(rep.growth_rate);
    const auto ctl = verify_envelope(1, make_speed("const:1"), {1, 10, 100, 1000}, 1.0, 1.0, 1e-10);
    double ctl_dev = 0.0;
    for (const auto& r : ctl.rows) ctl_dev = std::max(ctl_dev, std::abs(r.sup_ratio - 1.0));
    const bool pass = rep.ratio_spread <= 2.0 && sup <= bound && ctl_dev <= 1e-8;
    return Outcome{pass, fmt("spread %.4f (<= 2), sup ratio %.4f", rep.ratio_spread, sup) +
                             fmt(" <= e^c' = %.4f, control |ratio-1| = %.2g", bound, ctl_dev)};
  });
}

// 6. ------------------------------------------------------------------------
void cases_2_to_4() {
  criterion(6, "Cases 2-4 envelopes and W monotonicity", 300.0, [&] {
    const std::vector<double> grid{4, 16, 64, 256};
    struct Run {
      int case_tag;
      const char* speed;
      double s;
    };
    bool pass = true;
    std::string measured;
    for (const Run& r : {Run{2, "holder_shift:1,0.5,0.5", 1.5}, Run{3, "t_squared", 2.0},
                         Run{3, "sin_squared", 2.0}, Run{4, "holder:0.5,0.5", 1.2}}) {
      const auto a = make_speed(r.speed);
      const auto rep = verify_envelope(r.case_tag, a, grid, r.s, 1.0, 1e-10);
      pass = pass && rep.pass;
      measured += fmt("c%g K=%.3g", r.case_tag, rep.fitted_K) + (rep.pass ? " ok; " : " FAIL; ");
      if (r.case_tag == 2 || r.case_tag == 4) {
        const auto w = check_w_monotonicity(r.case_tag, a, grid, r.s, 1e-10);
        pass = pass && w.pass;
        measured += fmt("W(K=%.3g)", w.K) + (w.pass ? " ok; " : " FAIL; ");
      }
    }
    return Outcome{pass, measured};
  });
}

// 7. ------------------------------------------------------------------------
void wave_oracle() {
  criterion(7, "Wave solver oracle and Sobolev check", 60.0, [&] {
    const double tol = 1e-10;
    const auto one = make_speed("const:1");
    const auto f0 = wave::weighted_su2_field(12, 0.2, 1), f1 = wave::weighted_su2_field(12, 0.2, 2);
    const double d_su2 = wave::max_deviation(wave::solve_cauchy(f0, f1, one, 1.0, 201, tol),
                                             wave::exact_const_solution(f0, f1, 1.0, 1.0, 201));
    const std::vector<double> lams{-4, -2, -1, -0.5, 0.5, 1, 2, 4, 8};
    const auto h0 = wave::weighted_heis_field(lams, 32, 0.2, 1), h1 = wave::weighted_heis_field(lams, 32, 0.2, 2);
    const double d_heis = wave::max_deviation(wave::solve_cauchy(h0, h1, one, 1.0, 201, tol),
                                              wave::exact_const_solution(h0, h1, 1.0, 1.0, 201));

    const auto data = [](int lmax2) {
      return std::make_pair(SpectralField(wave::weighted_su2_field(lmax2, 0.2, 1)),
                            SpectralField(wave::weighted_su2_field(lmax2, 0.2, 2)));
    };
    const auto st = wave::sobolev_truncation_study(data, make_speed("sin:2,1,4"), 1.0, 1.0, 12, 201, tol);
    const auto cons = wave::verify_sobolev_wellposedness(wave::solve_cauchy(f0, zero_like(f0), one, 1.0, 201, tol), 1.0);
    const double cdev = std::abs(cons.C_meas - 1.0);
    const bool pass = d_su2 <= 10 * tol && d_heis <= 10 * tol && st.pass && cdev <= 1e-8;
    return Outcome{pass, fmt("oracle dev su2 %.2g, heis %.2g (<= 1e-9); ", d_su2, d_heis) +
                             fmt("C_meas %.4f -> %.4f on doubling; ", st.coarse.C_meas, st.fine.C_meas) +
                             fmt("a=1 |C_meas-1| = %.2g", cdev)};
  });
}

// 8. ------------------------------------------------------------------------
void gevrey_constants() {
  criterion(8, "Gevrey forward constants", 5.0, [&] {
    std::vector<SpectralField> fields;
    for (int l2 : {1, 2, 5, 10}) {
      su2::SpectralFieldSU2 f;
      f.lmax = {l2};
      f.coeffs[l2] = CMatrix::Identity(l2 + 1, l2 + 1);
      fields.emplace_back(f);
    }
    for (double c : {0.5, 1.0, 2.0}) fields.emplace_back(wave::weighted_su2_field(20, c));
    bool pass = true;
    double min_rel = INFINITY;
    for (const auto& f : fields)
      for (double s : {1.0, 1.5, 2.0}) {
        const auto fc = gevrey::forward_constant_check(f, 1.0, s, 20);
        pass = pass && fc.pass;
        for (std::size_t k = 0; k < fc.margin.size(); ++k) min_rel = std::min(min_rel, fc.margin[k] / fc.bound[k]);
      }
    const double spot = gevrey::sup_multiplier(1, 1.0, 1.0).value;
    const double sdev = std::abs(spot - 4.0 * std::exp(-2.0));
    pass = pass && sdev <= 1e-12;
    return Outcome{pass, fmt("min relative margin %.3g (>= 0); sup multiplier dev %.2g (tol 1e-12)", min_rel, sdev)};
  });
}

// 9. ------------------------------------------------------------------------
double last_increment_ratio(double s, su2::SymbolChoice sym, double* first = nullptr) {
  std::vector<double> sums;
  for (int l2 : {50, 100, 200, 400}) sums.push_back(su2::bessel_partial_sum(s, su2::HalfInt{l2}, sym));
  if (first) *first = (sums[2] - sums[1]) / (sums[1] - sums[0]);
  return (sums[3] - sums[2]) / (sums[2] - sums[1]);
}

void bessel() {
  criterion(9, "Bessel trace sums", 5.0, [&] {
    double r1_first = 0.0;
    const double r1 = last_increment_ratio(1.0, su2::SymbolChoice::SubLaplacian, &r1_first);
    const double rh = last_increment_ratio(0.5, su2::SymbolChoice::SubLaplacian);
    const double s_half = su2::bessel_partial_sum(1.0, su2::HalfInt{1});
    const double dev = std::abs(s_half - 25.0 / 9.0);
    const bool pass = r1_first <= 2.0 / 3.0 && r1 <= 2.0 / 3.0 && rh > 2.0 / 3.0 && dev <= 1e-12;
    return Outcome{pass, fmt("s=1 increment ratios %.4f, %.4f (<= 2/3); ", r1_first, r1) +
                             fmt("s=0.5 ratio %.4f (> 2/3); lmax=1/2 sum dev %.2g", rh, dev)};
  });
  info(fmt("C9 s = 1.5, sub-Laplacian: increment ratio %.4f",
           last_increment_ratio(1.5, su2::SymbolChoice::SubLaplacian)));
  info(fmt("C9 s = 1, Laplacian symbol: increment ratio %.4f",
           last_increment_ratio(1.0, su2::SymbolChoice::Laplacian)));
}

// 10. -----------------------------------------------------------------------
void order_fit() {
  criterion(10, "Gevrey order fit", 1.0, [&] {
    std::vector<int> k;
    std::vector<double> n;
    for (int i = 1; i <= 20; ++i) {
      k.push_back(i);
      n.push_back(std::exp(2.0 * i * std::log(1.5) + 1.2 * std::lgamma(2.0 * i + 1.0)));
    }
    const auto fit = gevrey::gevrey_order_fit(k, n);
    return Outcome{std::abs(fit.s - 1.2) <= 0.05, fmt("recovered s = %.6f, A = %.6f (planted 1.2, 1.5)", fit.s, fit.A)};
  });
}

}  // namespace

int main() {
  symbol_algebra();
  riesz_uniformity();
  lambda_invariance();
  commutation();
  case1_energy();
  cases_2_to_4();
  wave_oracle();
  gevrey_constants();
  bessel();
  order_fit();
  std::printf("%d of 10 criteria pass\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
