#include <doctest.h>

#include <cmath>
#include <random>

#include "hypowave/mode_ode.hpp"
#include "hypowave/report.hpp"

using namespace hypowave;

namespace {

const cplx I(0.0, 1.0);

Eigen::Matrix2d A_of(double a) {
  Eigen::Matrix2d A;
  A << 0.0, 1.0, a, 0.0;
  return A;
}

}  // namespace

TEST_CASE("reduction to a first-order system") {
  const auto one = make_speed("const:1");
  const auto s = reduce_to_system(ModeProblem(2.0, one, 1.0, 0.0));
  CHECK(s.V0(0) == 2.0 * I);
  CHECK(s.V0(1) == 0.0);
  const auto z = reduce_to_system(ModeProblem(0.0, one, 1.0, 3.0));
  CHECK(z.V0(0) == 0.0);
  CHECK(z.V0(1) == 3.0);
  const auto three = reduce_to_system(ModeProblem(1.0, make_speed("const:3"), 1.0, 0.0));
  CHECK(three.A(0.0) == A_of(3.0));
  CHECK(three.A(0.7) == A_of(3.0));
  CHECK_THROWS_AS(ModeProblem(-1.0, one, 1.0, 0.0), PreconditionError);
}

TEST_CASE("integrator against closed forms") {
  const auto one = make_speed("const:1", 3.0);
  SUBCASE("sine") {
    const auto tr = integrate_mode(ModeProblem(1.0, one, 0.0, 1.0, 1.0), 1e-10);
    CHECK(std::abs(tr.v.back() - std::sin(1.0)) <= 1e-8);
    CHECK(tr.times.size() == tr.v.size());
    CHECK(tr.v.size() == tr.v_prime.size());
    CHECK(tr.v.size() == tr.energy.size());
  }
  SUBCASE("conservation") {
    const auto tr = integrate_mode(ModeProblem(2.0, one, 1.0, 0.0, 1.0), 1e-10);
    for (double e : tr.energy) CHECK(std::abs(e - 4.0) <= 1e-8);
  }
  SUBCASE("drift") {
    IntegrateOptions o;
    o.sample_times = {0.0, 1.5, 3.0};
    const auto tr = integrate_mode(ModeProblem(0.0, one, 1.0, 2.0, 3.0), 1e-10, o);
    CHECK(tr.v.back() == 7.0);
    CHECK(tr.v_prime.back() == 2.0);
  }
  SUBCASE("tolerance range") {
    CHECK_THROWS_AS(integrate_mode(ModeProblem(1.0, one, 1.0, 0.0), 1e-15), PreconditionError);
    CHECK_THROWS_AS(integrate_mode(ModeProblem(1.0, one, 1.0, 0.0), 1e-3), PreconditionError);
  }
}

TEST_CASE("conservation for constant speeds (property)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double c = 0.2 + 3.0 * (U(rng) + 1.0);
    const double beta = std::pow(10.0, 1.5 * (U(rng) + 1.0));
    const cplx v0(U(rng), U(rng)), v1(U(rng), U(rng));
    const double tol = 1e-10;
    const auto a = make_speed("const:" + format_double(c));
    const auto tr = integrate_mode(ModeProblem(beta, a, v0, v1), tol);
    const double E0 = c * beta * beta * std::norm(v0) + std::norm(v1);
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      dev = std::max(dev, std::abs(c * beta * beta * std::norm(tr.v[i]) + std::norm(tr.v_prime[i]) - E0));
    CHECK(dev <= 10.0 * tol * E0);
  }
}

TEST_CASE("integrator error shrinks with the tolerance") {
  const auto one = make_speed("const:1");
  IntegrateOptions ends;
  ends.sample_times = {0.0, 1.0};
  for (double beta : {7.0, 50.0}) {
    auto err = [&](double tol) {
      const auto tr = integrate_mode(ModeProblem(beta, one, 1.0, 0.0), tol, ends);
      return std::abs(tr.v.back() - std::cos(beta));
    };
    for (double tol : {1e-6, 1e-7, 1e-8, 1e-9}) CHECK(err(tol / 2.0) * 2.0 <= err(tol));
  }
}

TEST_CASE("time reversal") {
  for (const char* k : {"sin:2,1,4", "holder_shift:1,0.5,0.5", "t_squared"}) {
    const auto a = make_speed(k);
    const double tol = 1e-10;
    const double beta = 13.0;
    const cplx v0(0.3, -0.2), v1(1.0, 0.4);
    const auto fwd = integrate_mode(ModeProblem(beta, a, v0, v1), tol);
    const auto back = integrate_mode(ModeProblem(beta, a.reversed(), fwd.v.back(), -fwd.v_prime.back()), tol);
    const double E0 = beta * beta * std::norm(v0) + std::norm(v1);
    CHECK(std::abs(back.v.back() - v0) <= 20.0 * tol * (1.0 + E0));
    CHECK(std::abs(back.v_prime.back() + v1) <= 20.0 * tol * (1.0 + E0));
  }
}

TEST_CASE("symmetrisers") {
  Eigen::Matrix2d S3;
  S3 << 6, 0, 0, 2;
  CHECK(symmetriser(3.0) == S3);
  Eigen::Matrix2d S0;
  S0 << 0, 0, 0, 2;
  CHECK(symmetriser(0.0) == S0);
  const Eigen::Matrix2d S5 = symmetriser(5.0);
  CHECK((S5 * A_of(5.0) - A_of(5.0).transpose() * S5).cwiseAbs().maxCoeff() == 0.0);

  Eigen::Matrix2d Q;
  Q << 0.5, 0, 0, 2;
  CHECK((quasi_symmetriser(0.0, 0.5) - Q).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((quasi_symmetriser(1.0, 1e-9) - symmetriser(1.0)).cwiseAbs().maxCoeff() <= 1e-15);
  const Eigen::Matrix2d Q7 = quasi_symmetriser(7.0, 0.1);
  Eigen::Matrix2d J;
  J << 0, 1, -1, 0;
  CHECK((Q7 * A_of(7.0) - A_of(7.0).transpose() * Q7 - 2 * 0.01 * J).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(quasi_symmetriser(1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(quasi_symmetriser(1.0, 1.5), PreconditionError);
}

TEST_CASE("energy functional") {
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity() * 2.0;
  CHECK(energy(M, Eigen::Vector2cd(I, 1.0)) == doctest::Approx(4.0));
  const cplx v(0.3, 0.1), w(-0.5, 0.2);
  CHECK(energy(symmetriser(1.0), Eigen::Vector2cd(I * v, w)) ==
        doctest::Approx(2.0 * (std::norm(v) + std::norm(w))));
  CHECK(energy(quasi_symmetriser(0.0, 0.3), Eigen::Vector2cd(1.0, 0.0)) == doctest::Approx(2 * 0.09));
  Eigen::Matrix2cd N;
  N << 1, I, 0, 1;
  CHECK_THROWS_AS(energy(N, Eigen::Vector2cd(1.0, 0.0)), PreconditionError);
}

TEST_CASE("quasi-symmetriser coercivity (property)") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double a_sup = 1.0;
  for (double eps : {1.0, 0.3, 0.05, 0.01}) {
    const double c1 = std::max(1.0, 2.0 * (a_sup + eps * eps));
    for (int i = 0; i < 200; ++i) {
      const double a = 0.5 * (U(rng) + 1.0) * a_sup;
      const Eigen::Vector2cd V(cplx(U(rng), U(rng)), cplx(U(rng), U(rng)));
      const double e = energy(quasi_symmetriser(a, eps), V);
      CHECK(e >= eps * eps * V.squaredNorm() / c1 - 1e-15);
      CHECK(e <= c1 * V.squaredNorm() + 1e-15);
    }
  }
}

TEST_CASE("Gronwall bound along trajectories") {
  for (const char* k : {"sin:2,1,4", "holder_shift:1,0.5,0.5", "const:2"}) {
    const auto a = make_speed(k);
    if (a.regularity().tag != RegularityTag::LipschitzPositive) continue;
    for (double beta : {1.0, 10.0, 100.0}) {
      const auto tr = integrate_mode(ModeProblem(beta, a, 1.0 / beta, 0.0), 1e-10);
      const auto g = gronwall_check(tr, a, 1e-10);
      CHECK(g.pass);
    }
  }
  CHECK(case1_growth_rate(make_speed("sin:2,1,4")) == doctest::Approx(4.0));
}

TEST_CASE("case epsilon") {
  CHECK(case_epsilon(3, 16.0, {2, std::nullopt, 1.0}) == doctest::Approx(0.25));
  CHECK(case_epsilon(4, 16.0, {std::nullopt, 1.0, 1.0}) == doctest::Approx(0.25));
  CHECK(case_epsilon(2, 8.0, {}) == doctest::Approx(0.125));
  CHECK_THROWS_AS(case_epsilon(1, 8.0, {}), PreconditionError);
  CHECK_THROWS_AS(case_epsilon(2, 0.5, {}), PreconditionError);
}

TEST_CASE("predicted envelopes") {
  const auto one = make_speed("const:1");
  const auto c1 = predict_envelope(1, ModeProblem(3.0, one, 1.0 / 3.0, 0.0), 1.0, 0.0, 2.0);
  CHECK(c1.envelope(0.1, 3.0) == doctest::Approx(2.0));
  CHECK(c1.envelope(0.9, 300.0) == doctest::Approx(2.0));

  const auto a2 = make_speed("holder_shift:1,0.5,0.5");
  const auto c2 = predict_envelope(2, ModeProblem(16.0, a2, 1.0 / 16.0, 0.0), 1.5, 0.5, 1.0);
  CHECK(c2.envelope(1.0, 16.0) == doctest::Approx(std::exp(0.5 * std::pow(16.0, 1.0 / 1.5))));
  const auto lip = make_speed("sin:2,1,4");
  const auto c2b = predict_envelope(2, ModeProblem(16.0, lip, 1.0 / 16.0, 0.0), 2.0, 0.5, 1.0);
  CHECK(c2b.envelope(1.0, 16.0) == doctest::Approx(std::exp(2.0)));

  const auto t2 = make_speed("t_squared");
  const auto c3 = predict_envelope(3, ModeProblem(16.0, t2, 1.0 / 16.0, 0.0), 2.0, 1.0, 1.0);
  CHECK(c3.envelope(0.3, 16.0) == doctest::Approx(17.0 * std::exp(4.0)));
  CHECK_THROWS_AS(predict_envelope(3, ModeProblem(16.0, t2, 1.0, 0.0), 1.5, 1.0, 1.0), PreconditionError);

  const auto h = make_speed("holder:0.5,1");
  CHECK_NOTHROW(predict_envelope(4, ModeProblem(4.0, h, 1.0, 0.0), 1.4, 1.0, 1.0));
  CHECK_THROWS_AS(predict_envelope(4, ModeProblem(4.0, h, 1.0, 0.0), 1.5, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(predict_envelope(2, ModeProblem(4.0, a2, 1.0, 0.0), 2.0, 1.0, 1.0), PreconditionError);

  // Nondecreasing in t and beta for cases 2-4.
  const auto c4 = predict_envelope(4, ModeProblem(4.0, h, 1.0, 0.0), 1.4, 0.7, 1.0);
  for (const auto* b : {&c2, &c3, &c4}) {
    double prev = 0.0;
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
      CHECK(b->envelope(t, 8.0) >= prev);
      prev = b->envelope(t, 8.0);
    }
    prev = 0.0;
    for (double beta : {1.0, 4.0, 16.0, 64.0}) {
      CHECK(b->envelope(0.5, beta) >= prev);
      prev = b->envelope(0.5, beta);
    }
  }
}

TEST_CASE("transformed energy") {
  SUBCASE("sharp roots, no damping") {
    const auto one = make_speed("const:1");
    const auto roots = regularized_roots(one, 0.1, false);
    const auto tr = integrate_mode(ModeProblem(5.0, one, 0.2, 0.3), 1e-10);
    const auto w = transformed_energy(tr, roots, 0.0, 0.0, 1.5, 5.0);
    for (double x : w) CHECK(x == doctest::Approx(w.front()).epsilon(1e-8));
  }
  SUBCASE("large K is nonincreasing") {
    const auto a = make_speed("holder_shift:1,0.5,0.5");
    for (double beta : {4.0, 32.0, 100.0}) {
      const auto roots = regularized_roots(a, 1.0 / beta, false);
      const auto tr = integrate_mode(ModeProblem(beta, a, 1.0 / beta, 0.0), 1e-10);
      const auto w = transformed_energy(tr, roots, 0.0, 1e3, 1.5, beta);
      CHECK(w.back() <= w.front());
    }
  }
  SUBCASE("log form agrees") {
    const auto a = make_speed("sin:2,1,4");
    const auto roots = regularized_roots(a, 0.05, false);
    const auto tr = integrate_mode(ModeProblem(20.0, a, 0.05, 0.0), 1e-10);
    const auto w = transformed_energy(tr, roots, 0.1, 0.3, 1.5, 20.0);
    const auto lw = transformed_log_energy(tr, roots, 0.1, 0.3, 1.5, 20.0);
    for (std::size_t i = 0; i < w.size(); i += 20) CHECK(std::log(w[i]) == doctest::Approx(lw[i]));
  }
  SUBCASE("beta zero rejected") {
    const auto one = make_speed("const:1");
    const auto tr = integrate_mode(ModeProblem(0.0, one, 1.0, 0.0), 1e-10);
    CHECK_THROWS_AS(transformed_energy(tr, regularized_roots(one, 0.1, false), 0.0, 0.0, 1.5, 0.0),
                    PreconditionError);
  }
}

TEST_CASE("W monotonicity with the chosen K") {
  const auto r2 = check_w_monotonicity(2, make_speed("holder_shift:1,0.5,0.5"), {4, 16, 64}, 1.5, 1e-9);
  CHECK(r2.pass);
  CHECK(r2.K > 0.0);
  CHECK(std::isfinite(r2.K));
  const auto r4 = check_w_monotonicity(4, make_speed("holder:0.5,0.5"), {4, 16, 64}, 1.2, 1e-9);
  CHECK(r4.pass);
  CHECK(r4.gamma == doctest::Approx(1.0 / 1.25));
}

TEST_CASE("envelope verification") {
  SUBCASE("case 1 conservation") {
    const auto r = verify_envelope(1, make_speed("const:1"), {1, 10, 100, 1000}, 1.0, 1.0, 1e-10);
    CHECK(r.pass);
    for (const auto& row : r.rows) CHECK(row.sup_ratio == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(r.fitted_K) <= 1e-8);
  }
  SUBCASE("case 1 oscillating speed") {
    const auto r = verify_envelope(1, make_speed("sin:2,1,4"), {1, 10, 100, 1000}, 1.0, 1.0, 1e-10);
    CHECK(r.pass);
    CHECK(r.ratio_spread <= 2.0);
    for (const auto& row : r.rows) CHECK(row.sup_ratio <= std::exp(r.growth_rate));
  }
  SUBCASE("case 4 on |t - 1/2|") {
    const auto r = verify_envelope(4, make_speed("holder:0.5,1"), {4, 16, 64, 256}, 1.4, 1.0, 1e-8);
    CHECK(r.pass);
    CHECK(std::isfinite(r.fitted_K));
  }
  SUBCASE("case and class mismatch") {
    CHECK_THROWS_AS(verify_envelope(1, make_speed("t_squared"), {1, 2}, 1.0, 1.0, 1e-8), PreconditionError);
    CHECK_THROWS_AS(verify_envelope(2, make_speed("sin:2,1,4"), {0.5, 2}, 1.5, 1.0, 1e-8), PreconditionError);
  }
  SUBCASE("csv columns") {
    const auto r = verify_envelope(1, make_speed("const:1"), {1, 10}, 1.0, 1.0, 1e-10);
    CHECK(r.csv().rfind("case,beta,s,sup_ratio,fitted_K,residual\n", 0) == 0);
  }
}
