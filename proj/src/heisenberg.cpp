#include "hypowave/heisenberg.hpp"

#include <cmath>
#include <numbers>

namespace hypowave::heis {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

double signed_root(double lambda) {
  return std::copysign(std::sqrt(std::abs(lambda)), lambda);
}

CMatrix raw_symbol(Field which, double lambda, int N) {
  const double r = std::sqrt(std::abs(lambda));
  const double sr = signed_root(lambda);
  const cplx I(0.0, 1.0);
  CMatrix m = CMatrix::Zero(N, N);
  auto X = [&] {
    CMatrix x = CMatrix::Zero(N, N);
    for (int k = 0; k + 1 < N; ++k) {
      x(k, k + 1) = r * std::sqrt((k + 1) / 2.0);
      x(k + 1, k) = -r * std::sqrt((k + 1) / 2.0);
    }
    return x;
  };
  auto Y = [&] {
    CMatrix y = CMatrix::Zero(N, N);
    for (int k = 0; k + 1 < N; ++k) {
      y(k, k + 1) = I * sr * std::sqrt((k + 1) / 2.0);
      y(k + 1, k) = I * sr * std::sqrt((k + 1) / 2.0);
    }
    return y;
  };
  switch (which) {
    case Field::X: m = X(); break;
    case Field::Y: m = Y(); break;
    case Field::Z: m = X() + I * Y(); break;
    case Field::Zbar: m = X() - I * Y(); break;
    case Field::T: m = I * lambda * CMatrix::Identity(N, N); break;
  }
  return m;
}

}  // namespace

double hermite_function(int k, double x) {
  require(k >= 0, "Hermite index must be nonnegative");
  if (k > 500) throw std::overflow_error("Hermite index beyond the recursion domain (k <= 500)");
  double prev = 0.0;
  double cur = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  for (int j = 0; j < k; ++j) {
    const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteSymbol vectorfield_symbol(Field which, double lambda, int N) {
  require(lambda != 0.0 && std::isfinite(lambda), "lambda must be nonzero");
  require(N >= 2, "truncation N must be >= 2");
  return {lambda, N, raw_symbol(which, lambda, N), which == Field::T ? 0 : 1};
}

HermiteSymbol sublaplacian_symbol(double lambda, int N) {
  require(lambda != 0.0 && std::isfinite(lambda), "lambda must be nonzero");
  require(N >= 1, "truncation N must be >= 1");
  CMatrix m = CMatrix::Zero(N, N);
  for (int k = 0; k < N; ++k) m(k, k) = std::abs(lambda) * (2.0 * k + 1.0);
  return {lambda, N, m, 0};
}

double commutator_check(double lambda, int N) {
  require(N >= 3, "commutator check needs N >= 3");
  const CMatrix X = vectorfield_symbol(Field::X, lambda, N).matrix;
  const CMatrix Y = vectorfield_symbol(Field::Y, lambda, N).matrix;
  const CMatrix c = X * Y - Y * X - cplx(0.0, lambda) * CMatrix::Identity(N, N);
  return c.topLeftCorner(N - 1, N - 1).cwiseAbs().maxCoeff();
}

std::string conjugate_word(std::string_view word) {
  std::string out(word);
  for (char& c : out) c = c == 'Z' ? 'B' : (c == 'B' ? 'Z' : c);
  return out;
}

namespace {

// m·M for M with at most one nonzero per column.
CMatrix times_banded(const CMatrix& m, const CMatrix& M) {
  CMatrix out = CMatrix::Zero(m.rows(), M.cols());
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      if (M(i, j) != cplx(0.0)) out.col(j) += m.col(i) * M(i, j);
  return out;
}

}  // namespace

HermiteSymbol riesz_symbol(std::string_view word, double lambda, int N) {
  require(lambda != 0.0 && std::isfinite(lambda), "lambda must be nonzero");
  const int q = static_cast<int>(word.size());
  require(2 * q < N, "word too long for the truncation (need |word| < N/2)");
  const CMatrix Z = raw_symbol(Field::Z, lambda, N);
  const CMatrix B = raw_symbol(Field::Zbar, lambda, N);
  CMatrix m = CMatrix::Identity(N, N);
  for (char c : word) {
    require(c == 'Z' || c == 'B', std::string("word letter must be Z or B, got '") + c + "'");
    m = times_banded(m, c == 'Z' ? Z : B);
  }
  for (int k = 0; k < N; ++k)
    m.col(k) *= std::pow(std::abs(lambda) * (2.0 * k + 1.0), -q / 2.0);
  return {lambda, N, m, q};
}

void SpectralFieldHeis::validate() const {
  require(trunc >= 1, "truncation must be >= 1");
  require(coeffs.size() == lambdas.size(), "one coefficient matrix per lambda required");
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    require(lambdas[j] != 0.0 && std::isfinite(lambdas[j]), "lambda grid must exclude 0");
    require(j == 0 || lambdas[j] > lambdas[j - 1], "lambda grid must be strictly increasing");
    require(coeffs[j].rows() == trunc && coeffs[j].cols() == trunc,
            "coefficient matrix " + std::to_string(j) + " is not trunc x trunc");
  }
}

std::vector<double> plancherel_weights(const std::vector<double>& lambdas) {
  std::vector<double> w(lambdas.size(), 0.0);
  auto branch = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    const std::size_t m = hi - lo;
    if (m == 0) return;
    if (m == 1) {
      w[lo] = 1.0;
      return;
    }
    for (std::size_t j = lo; j < hi; ++j) {
      const double left = j == lo ? lambdas[j] : lambdas[j - 1];
      const double right = j + 1 == hi ? lambdas[j] : lambdas[j + 1];
      w[j] = 0.5 * (right - left);
    }
  };
  std::size_t split = 0;
  while (split < lambdas.size() && lambdas[split] < 0.0) ++split;
  branch(0, split);
  branch(split, lambdas.size());
  return w;
}

double plancherel_norm(const SpectralFieldHeis& f) {
  require(!f.lambdas.empty(), "Plancherel norm of an empty lambda grid");
  f.validate();
  const auto w = plancherel_weights(f.lambdas);
  double acc = 0.0;
  for (std::size_t j = 0; j < f.lambdas.size(); ++j)
    acc += w[j] * f.coeffs[j].squaredNorm() * std::abs(f.lambdas[j]);
  return std::sqrt(kPlancherelConstant * acc);
}

std::vector<double> default_lambda_grid(double lo, double hi, int per_sign) {
  require(lo > 0.0 && hi > lo && per_sign >= 1, "bad lambda grid parameters");
  std::vector<double> pos(per_sign);
  for (int i = 0; i < per_sign; ++i)
    pos[i] = per_sign == 1 ? lo
                           : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (per_sign - 1));
  std::vector<double> grid;
  for (int i = per_sign - 1; i >= 0; --i) grid.push_back(-pos[i]);
  for (double p : pos) grid.push_back(p);
  return grid;
}

}  // namespace hypowave::heis
