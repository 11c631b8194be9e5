#include "hypowave/su2.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace hypowave::su2 {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

bool is_diagonal(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0.0)) return false;
  return true;
}

// l(l+1) − m² with both given doubled.
double sl_eigen(int l2, int m2) { return (l2 * (l2 + 2) - m2 * m2) / 4.0; }

}  // namespace

HalfInt HalfInt::from_double(double l) {
  const double t = 2.0 * l;
  require(l >= 0.0 && std::abs(t - std::round(t)) < 1e-12, "l must be a nonnegative half-integer");
  return {static_cast<int>(std::lround(t))};
}

RepSymbol ladder_symbol(Ladder which, HalfInt l) {
  const int d = l.dim();
  const double lv = l.value();
  RepSymbol r{l, CMatrix::Zero(d, d)};
  for (int j = 0; j < d; ++j) {
    const double n = l.m_twice(j) / 2.0;
    if (which == Ladder::X && j + 1 < d)
      r.matrix(j + 1, j) = -std::sqrt((lv - n) * (lv + n + 1.0));
    if (which == Ladder::Y && j >= 1)
      r.matrix(j - 1, j) = -std::sqrt((lv + n) * (lv - n + 1.0));
  }
  return r;
}

RepSymbol sublaplacian_symbol(HalfInt l) {
  const int d = l.dim();
  RepSymbol r{l, CMatrix::Zero(d, d)};
  for (int j = 0; j < d; ++j) r.matrix(j, j) = sl_eigen(l.twice, l.m_twice(j));
  return r;
}

RepSymbol laplacian_symbol(HalfInt l) {
  const double lv = l.value();
  return {l, CMatrix::Identity(l.dim(), l.dim()) * (lv * (lv + 1.0))};
}

RepSymbol spectral_power(const RepSymbol& sym, double p) {
  const bool integral = p == std::floor(p) && p >= 0.0;
  auto power = [&](double x) {
    if (x <= 0.0 && !integral) {
      if (x == 0.0 && p > 0.0) return 0.0;
      throw PreconditionError("nonpositive eigenvalue with negative or fractional power");
    }
    return std::pow(x, p);
  };
  RepSymbol r{sym.l, CMatrix::Zero(sym.matrix.rows(), sym.matrix.cols())};
  if (is_diagonal(sym.matrix)) {
    for (Eigen::Index i = 0; i < sym.matrix.rows(); ++i) {
      require(std::abs(sym.matrix(i, i).imag()) <= 1e-14 * (1.0 + std::abs(sym.matrix(i, i))),
              "spectral power needs a real diagonal");
      r.matrix(i, i) = power(sym.matrix(i, i).real());
    }
    return r;
  }
  require((sym.matrix - sym.matrix.adjoint()).cwiseAbs().maxCoeff() <=
              1e-12 * (1.0 + sym.matrix.cwiseAbs().maxCoeff()),
          "spectral power needs a diagonal or Hermitian symbol");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym.matrix);
  Eigen::VectorXcd ev(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = power(es.eigenvalues()(i));
  r.matrix = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return r;
}

RepSymbol spectral_exp(const RepSymbol& sym, double c, double p) {
  RepSymbol r = spectral_power(sym, p);
  if (is_diagonal(r.matrix)) {
    for (Eigen::Index i = 0; i < r.matrix.rows(); ++i)
      r.matrix(i, i) = std::exp(c * r.matrix(i, i).real());
    return r;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r.matrix);
  Eigen::VectorXcd ev = (c * es.eigenvalues().array()).exp().cast<cplx>();
  r.matrix = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return r;
}

CMatrix word_symbol(std::string_view word, HalfInt l) {
  const CMatrix X = ladder_symbol(Ladder::X, l).matrix;
  const CMatrix Y = ladder_symbol(Ladder::Y, l).matrix;
  const int d = l.dim();
  CMatrix m = CMatrix::Identity(d, d);
  for (char c : word) {
    require(c == 'X' || c == 'Y', std::string("word letter must be X or Y, got '") + c + "'");
    // Each ladder has one off-diagonal, so a right product shifts columns.
    CMatrix next = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      if (c == 'X' && j + 1 < d) next.col(j) = m.col(j + 1) * X(j + 1, j);
      if (c == 'Y' && j >= 1) next.col(j) = m.col(j - 1) * Y(j - 1, j);
    }
    m = std::move(next);
  }
  return m;
}

RepSymbol riesz_symbol(std::string_view word, HalfInt l) {
  require(l.twice >= 1, "Riesz symbols need l >= 1/2");
  const double q = static_cast<double>(word.size());
  const CMatrix right = spectral_power(sublaplacian_symbol(l), -q / 2.0).matrix;
  return {l, word_symbol(word, l) * right.diagonal().asDiagonal()};
}

std::optional<int> single_diagonal_offset(const CMatrix& m) {
  std::optional<int> off;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) == cplx(0.0)) continue;
      const int d = static_cast<int>(j - i);
      if (off && *off != d) return std::nullopt;
      off = d;
    }
  return off ? off : std::optional<int>(0);
}

double svd_op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

MatrixNorms matrix_norms(const CMatrix& m) {
  MatrixNorms n;
  if (m.size() == 0) return n;
  n.max = m.cwiseAbs().maxCoeff();
  n.hs = m.norm();
  // A single-diagonal matrix is a permutation times a diagonal: ‖A‖ = max |a_ij|.
  n.op = single_diagonal_offset(m) ? n.max : svd_op_norm(m);
  return n;
}

FactorNorms riesz_factor_norms(Ladder which, HalfInt l, int q) {
  require(l.twice >= 1, "Riesz factors need l >= 1/2");
  require(q >= 1, "type-3 factor needs q >= 1");
  const RepSymbol L = sublaplacian_symbol(l);
  const CMatrix Lh = spectral_power(L, 0.5).matrix;
  const CMatrix Lmh = spectral_power(L, -0.5).matrix;
  const CMatrix Lmq = spectral_power(L, -q / 2.0).matrix;
  const CMatrix V = ladder_symbol(which, l).matrix;
  FactorNorms f;
  f.type1 = matrix_norms(V * Lmh).op;
  f.type2 = matrix_norms(Lh * V * Lmh).op;
  f.type3 = matrix_norms(Lh * V * Lmq).op;
  return f;
}

void SpectralFieldSU2::validate() const {
  for (const auto& [l2, m] : coeffs) {
    require(l2 >= 0 && l2 <= lmax.twice, "coefficient key " + std::to_string(l2) + " outside lmax");
    require(m.rows() == l2 + 1 && m.cols() == l2 + 1,
            "coefficient for 2l = " + std::to_string(l2) + " has the wrong size");
  }
}

double plancherel_norm(const SpectralFieldSU2& f) {
  double acc = 0.0;
  for (const auto& [l2, m] : f.coeffs) acc += (l2 + 1) * m.squaredNorm();
  return std::sqrt(acc);
}

double bessel_partial_sum(double s, HalfInt lmax, SymbolChoice symbol) {
  require(s > 0.0, "Bessel sum needs s > 0");
  double total = 0.0;
  for (int l2 = 0; l2 <= lmax.twice; ++l2) {
    double hs2 = 0.0;
    for (int m2 = -l2; m2 <= l2; m2 += 2) {
      const double mu = symbol == SymbolChoice::SubLaplacian ? sl_eigen(l2, m2) : sl_eigen(l2, 0);
      hs2 += std::pow(1.0 + mu, -2.0 * s);
    }
    total += (l2 + 1) * hs2;
  }
  return total;
}

}  // namespace hypowave::su2
