#include <doctest.h>

#include <cmath>
#include <random>

#include "hypowave/su2.hpp"

using namespace hypowave;
using namespace hypowave::su2;

namespace {

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

CMatrix diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(d.size());
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.cast<cplx>().asDiagonal();
}

// Least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

std::vector<std::string> all_words(int max_len) {
  std::vector<std::string> out, layer{""};
  for (int n = 1; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& w : layer) {
      next.push_back(w + 'X');
      next.push_back(w + 'Y');
    }
    layer = next;
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

}  // namespace

TEST_CASE("half integers") {
  const auto l = HalfInt::from_double(1.5);
  CHECK(l.twice == 3);
  CHECK(l.dim() == 4);
  CHECK(l.index(-3) == 0);
  CHECK(l.m_twice(3) == 3);
  CHECK_THROWS_AS(HalfInt::from_double(0.3), PreconditionError);
  CHECK_THROWS_AS(HalfInt::from_double(-1.0), PreconditionError);
}

TEST_CASE("ladder symbols") {
  SUBCASE("l = 1/2") {
    const auto X = ladder_symbol(Ladder::X, HalfInt{1}).matrix;
    CHECK(X(1, 0) == cplx(-1.0));
    CHECK(X(0, 1) == cplx(0.0));
    CHECK(X(0, 0) == cplx(0.0));
  }
  SUBCASE("l = 1") {
    const auto X = ladder_symbol(Ladder::X, HalfInt{2}).matrix;
    CHECK(X(1, 0).real() == doctest::Approx(-std::sqrt(2.0)));
    CHECK(X(2, 1).real() == doctest::Approx(-std::sqrt(2.0)));
    CHECK(max_abs(X) == doctest::Approx(std::sqrt(2.0)));
    CHECK(X(0, 1) == cplx(0.0));
  }
  SUBCASE("l = 0") {
    const auto X = ladder_symbol(Ladder::X, HalfInt{0}).matrix;
    CHECK(X.rows() == 1);
    CHECK(X(0, 0) == cplx(0.0));
  }
  SUBCASE("Y is the transpose of X") {
    for (int l2 = 0; l2 <= 20; ++l2) {
      const auto X = ladder_symbol(Ladder::X, HalfInt{l2}).matrix;
      const auto Y = ladder_symbol(Ladder::Y, HalfInt{l2}).matrix;
      CHECK(max_abs(Y - X.transpose()) == 0.0);
    }
  }
}

TEST_CASE("sub-Laplacian and Laplacian symbols") {
  CHECK(max_abs(sublaplacian_symbol(HalfInt{2}).matrix - diag({1, 2, 1})) == 0.0);
  CHECK(max_abs(sublaplacian_symbol(HalfInt{1}).matrix - diag({0.5, 0.5})) == 0.0);
  CHECK(max_abs(sublaplacian_symbol(HalfInt{0}).matrix) == 0.0);
  CHECK(max_abs(laplacian_symbol(HalfInt{2}).matrix - diag({2, 2, 2})) == 0.0);
  CHECK(max_abs(laplacian_symbol(HalfInt{0}).matrix) == 0.0);
  CHECK(max_abs(laplacian_symbol(HalfInt{3}).matrix - diag({3.75, 3.75, 3.75, 3.75})) == 0.0);
  for (int l2 = 1; l2 <= 20; ++l2) {
    const auto L = sublaplacian_symbol(HalfInt{l2}).matrix;
    CHECK(L.diagonal().real().minCoeff() > 0.0);
    CHECK(max_abs(L - L.diagonal().asDiagonal().toDenseMatrix()) == 0.0);
  }
}

TEST_CASE("ladder anticommutator reproduces the sub-Laplacian") {
  for (int l2 = 0; l2 <= 20; ++l2) {
    const auto X = ladder_symbol(Ladder::X, HalfInt{l2}).matrix;
    const auto Y = ladder_symbol(Ladder::Y, HalfInt{l2}).matrix;
    const auto L = sublaplacian_symbol(HalfInt{l2}).matrix;
    CHECK(max_abs(0.5 * (X * Y + Y * X) - L) <= 1e-12);
  }
  // The squares do not: −(X² + Y²) vanishes on the diagonal.
  const auto X = ladder_symbol(Ladder::X, HalfInt{2}).matrix;
  const auto Y = ladder_symbol(Ladder::Y, HalfInt{2}).matrix;
  CHECK(max_abs(-(X * X + Y * Y) - sublaplacian_symbol(HalfInt{2}).matrix) > 1.0);
}

TEST_CASE("spectral calculus") {
  const RepSymbol L1 = sublaplacian_symbol(HalfInt{2});
  CHECK(max_abs(spectral_power(L1, -0.5).matrix - diag({1, 1 / std::sqrt(2.0), 1})) <= 1e-15);
  CHECK(max_abs(spectral_power(L1, 1.0).matrix - L1.matrix) == 0.0);
  CHECK(max_abs(spectral_exp(L1, 1.0, 0.5).matrix - diag({std::exp(1.0), std::exp(std::sqrt(2.0)), std::exp(1.0)})) <=
        1e-12);
  CHECK_THROWS_AS(spectral_power(sublaplacian_symbol(HalfInt{0}), -0.5), PreconditionError);
  CHECK_NOTHROW(spectral_power(sublaplacian_symbol(HalfInt{0}), 0.5));

  // Hermitian, non-diagonal input goes through the eigendecomposition.
  CMatrix H(2, 2);
  H << 2.0, cplx(0, 1), cplx(0, -1), 2.0;  // eigenvalues 1, 3
  const auto Hh = spectral_power({HalfInt{1}, H}, 0.5).matrix;
  CHECK(max_abs(Hh * Hh - H) <= 1e-12);
}

TEST_CASE("Riesz symbols") {
  SUBCASE("single letter at l = 1") {
    const auto R = riesz_symbol("X", HalfInt{2}).matrix;
    CHECK(R(1, 0).real() == doctest::Approx(-std::sqrt(2.0)));
    CHECK(R(2, 1).real() == doctest::Approx(-1.0));
    CHECK(matrix_norms(R).op == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("single letter is sqrt 2 for every l") {
    for (int l2 = 1; l2 <= 100; ++l2)
      for (auto w : {"X", "Y"}) CHECK(std::abs(matrix_norms(riesz_symbol(w, HalfInt{l2}).matrix).op - std::sqrt(2.0)) <= 1e-10);
  }
  SUBCASE("XY at l = 1/2") {
    const auto R = riesz_symbol("XY", HalfInt{1}).matrix;
    CHECK(max_abs(R - diag({0, 2})) <= 1e-12);
    CHECK(matrix_norms(R).op <= 4.0);
  }
  SUBCASE("l = 0 rejected") { CHECK_THROWS_AS(riesz_symbol("X", HalfInt{0}), PreconditionError); }
  SUBCASE("uniform in l with a common base") {
    double c = 0.0;
    for (const auto& w : all_words(6)) {
      const double q = static_cast<double>(w.size());
      double sup = 0.0;
      std::vector<double> l_mid, n_mid, l_far, n_far;
      for (int l2 = 1; l2 <= 200; l2 += (l2 < 20 ? 1 : l2 < 100 ? 5 : 10)) {
        const double n = matrix_norms(riesz_symbol(w, HalfInt{l2}).matrix).op;
        if (l2 <= 100) sup = std::max(sup, n);
        CHECK(n <= std::sqrt(std::pow(2.0, q) * std::tgamma(q + 1.0)) * (1.0 + 1e-12));
        if (l2 >= 50 && l2 <= 100 && l2 % 10 == 0) {
          l_mid.push_back(l2 / 2.0);
          n_mid.push_back(n);
        }
        if (l2 >= 100) {
          l_far.push_back(l2 / 2.0);
          n_far.push_back(n);
        }
      }
      c = std::max(c, std::pow(sup, 1.0 / q));
      // The profile flattens: the log-slope shrinks as l grows and stays small.
      const double s_mid = log_slope(l_mid, n_mid), s_far = log_slope(l_far, n_far);
      CHECK(s_mid >= -1e-12);
      CHECK(s_far <= 0.6 * s_mid + 1e-12);
      CHECK(s_far <= 0.1);
      if (w.size() <= 5) CHECK(s_mid <= 0.1);
    }
    CHECK(c <= 4.0);
  }
}

TEST_CASE("factor scalings") {
  for (int q : {1, 2, 3, 4}) {
    std::vector<double> ls, t2, t3;
    for (int l2 = 40; l2 <= 200; l2 += 20) {
      const auto f = riesz_factor_norms(Ladder::X, HalfInt{l2}, q);
      ls.push_back(l2 / 2.0);
      t2.push_back(f.type2);
      t3.push_back(f.type3);
      CHECK(f.type1 == doctest::Approx(std::sqrt(2.0)));
    }
    CHECK(std::abs(log_slope(ls, t2) - 1.0) <= 0.1);
    if (q == 1) CHECK(log_slope(ls, t3) == doctest::Approx(log_slope(ls, t2)));
    else CHECK(std::abs(log_slope(ls, t3) - (1.0 - q / 2.0)) <= 0.2);
  }
}

TEST_CASE("matrix norms") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 3.0;
  const auto n = matrix_norms(a);
  CHECK(n.op == 3.0);
  CHECK(n.max == 3.0);
  CHECK(n.hs == 3.0);
  const auto id = matrix_norms(CMatrix::Identity(4, 4));
  CHECK(id.op == 1.0);
  CHECK(id.max == 1.0);
  CHECK(id.hs == 2.0);
  for (int l2 = 1; l2 <= 20; ++l2) {
    const auto X = ladder_symbol(Ladder::X, HalfInt{l2}).matrix;
    CHECK(std::abs(matrix_norms(X).op - svd_op_norm(X)) <= 1e-12);
    CHECK(matrix_norms(X).op == matrix_norms(X).max);
    const CMatrix P = X * spectral_power(sublaplacian_symbol(HalfInt{l2}), -0.5).matrix;
    CHECK(std::abs(svd_op_norm(P) - matrix_norms(P).max) <= 1e-12);
  }
  CHECK(single_diagonal_offset(ladder_symbol(Ladder::X, HalfInt{4}).matrix) == -1);
  CHECK(single_diagonal_offset(ladder_symbol(Ladder::Y, HalfInt{4}).matrix) == 1);
  CHECK_FALSE(single_diagonal_offset(CMatrix::Ones(3, 3)).has_value());
}

TEST_CASE("Plancherel norm") {
  SpectralFieldSU2 f;
  f.lmax = {4};
  CHECK(plancherel_norm(f) == 0.0);
  f.coeffs[2] = CMatrix::Zero(3, 3);
  f.coeffs[2](0, 0) = 1.0;
  CHECK(plancherel_norm(f) == doctest::Approx(std::sqrt(3.0)));
  SpectralFieldSU2 g = f;
  g.coeffs[2] *= 2.0;
  CHECK(plancherel_norm(g) == doctest::Approx(2.0 * std::sqrt(3.0)));
  // Additive over disjoint supports.
  SpectralFieldSU2 h = f;
  h.coeffs[4] = CMatrix::Constant(5, 5, 0.1);
  SpectralFieldSU2 k;
  k.lmax = {4};
  k.coeffs[4] = h.coeffs[4];
  CHECK(std::pow(plancherel_norm(h), 2) == doctest::Approx(std::pow(plancherel_norm(f), 2) + std::pow(plancherel_norm(k), 2)));
  SpectralFieldSU2 bad;
  bad.lmax = {2};
  bad.coeffs[2] = CMatrix::Zero(2, 2);
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("Bessel trace partial sums") {
  CHECK(std::abs(bessel_partial_sum(1.0, HalfInt{1}) - 25.0 / 9.0) <= 1e-12);
  double prev = 0.0;
  for (int l2 = 0; l2 <= 40; ++l2) {
    const double s = bessel_partial_sum(0.7, HalfInt{l2});
    CHECK(s >= prev);
    prev = s;
  }
  auto ratio = [](double s, SymbolChoice c) {
    const double a = bessel_partial_sum(s, HalfInt{50}, c), b = bessel_partial_sum(s, HalfInt{100}, c),
                 d = bessel_partial_sum(s, HalfInt{200}, c);
    return (d - b) / (b - a);
  };
  CHECK(ratio(1.5, SymbolChoice::SubLaplacian) <= 2.0 / 3.0);
  CHECK(ratio(0.5, SymbolChoice::SubLaplacian) >= 1.0);
  CHECK(ratio(1.0, SymbolChoice::Laplacian) <= 2.0 / 3.0);
  CHECK(ratio(0.5, SymbolChoice::Laplacian) >= 1.0);
  CHECK_THROWS_AS(bessel_partial_sum(0.0, HalfInt{2}), PreconditionError);
}
