#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hypowave/common.hpp"

namespace hypowave::heis {

// Normalized Hermite function h_k(x), k ≤ 500.
double hermite_function(int k, double x);

struct HermiteSymbol {
  double lambda = 1.0;
  int trunc = 2;
  CMatrix matrix;
  int pad = 0;  // trailing rows/cols touched by truncation

  int valid_block() const { return trunc - pad; }
  CMatrix valid() const { return matrix.topLeftCorner(valid_block(), valid_block()); }
};

enum class Field { X, Y, Z, Zbar, T };

HermiteSymbol vectorfield_symbol(Field which, double lambda, int N);
HermiteSymbol sublaplacian_symbol(double lambda, int N);

// max |[π(X), π(Y)] − iλI| on the top-left (N−1) block.
double commutator_check(double lambda, int N);

// Word over {Z, B}, B standing for Z̄; e.g. "ZBZ".
// π(w1)···π(wq) π(L)^{−q/2}, pad = q.
HermiteSymbol riesz_symbol(std::string_view word, double lambda, int N);

// Z ↔ Z̄ swapped letter by letter.
std::string conjugate_word(std::string_view word);

struct SpectralFieldHeis {
  std::vector<double> lambdas;   // strictly increasing, nonzero
  std::vector<CMatrix> coeffs;   // one N×N matrix per λ
  int trunc = 0;

  void validate() const;
};

// Trapezoid weights computed separately on the negative and positive branches;
// a single-point branch gets weight 1.
std::vector<double> plancherel_weights(const std::vector<double>& lambdas);

constexpr double kPlancherelConstant = 1.0 / (4.0 * 3.14159265358979323846 * 3.14159265358979323846);

double plancherel_norm(const SpectralFieldHeis& f);

// Symmetric log-spaced grid ±[lo, hi] with per_sign points on each side.
std::vector<double> default_lambda_grid(double lo = 1e-2, double hi = 1e2, int per_sign = 33);

}  // namespace hypowave::heis
