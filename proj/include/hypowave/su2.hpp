#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hypowave/common.hpp"

namespace hypowave::su2 {

// l stored as 2l so half-integers are exact keys.
struct HalfInt {
  int twice = 0;

  static HalfInt from_double(double l);
  double value() const { return twice / 2.0; }
  int dim() const { return twice + 1; }
  // Storage offset of m, given as 2m.
  int index(int m_twice) const { return (m_twice + twice) / 2; }
  // 2m for storage offset i.
  int m_twice(int i) const { return 2 * i - twice; }
  auto operator<=>(const HalfInt&) const = default;
};

struct RepSymbol {
  HalfInt l;
  CMatrix matrix;
};

enum class Ladder { X, Y };

RepSymbol ladder_symbol(Ladder which, HalfInt l);
RepSymbol sublaplacian_symbol(HalfInt l);
RepSymbol laplacian_symbol(HalfInt l);

// sym^p: entrywise on diagonal input, by eigendecomposition on Hermitian input.
RepSymbol spectral_power(const RepSymbol& sym, double p);
// exp(c · sym^p) under the same contract.
RepSymbol spectral_exp(const RepSymbol& sym, double c, double p);

// Word over {X, Y}, e.g. "XYX".
CMatrix word_symbol(std::string_view word, HalfInt l);

// σ_word(l) · σ_L(l)^{−|word|/2}; requires l ≥ 1/2.
RepSymbol riesz_symbol(std::string_view word, HalfInt l);

struct MatrixNorms {
  double op = 0.0;
  double max = 0.0;
  double hs = 0.0;
};

// Operator norm is exact (max |entry|) for matrices supported on one diagonal,
// singular values otherwise.
MatrixNorms matrix_norms(const CMatrix& m);
double svd_op_norm(const CMatrix& m);
// Offset d if every nonzero entry satisfies col − row = d.
std::optional<int> single_diagonal_offset(const CMatrix& m);

struct FactorNorms {
  double type1 = 0.0;  // ‖σ_X σ_L^{−1/2}‖
  double type2 = 0.0;  // ‖σ_L^{1/2} σ_X σ_L^{−1/2}‖
  double type3 = 0.0;  // ‖σ_L^{1/2} σ_X σ_L^{−q/2}‖
};

FactorNorms riesz_factor_norms(Ladder which, HalfInt l, int q);

struct SpectralFieldSU2 {
  std::map<int, CMatrix> coeffs;  // key 2l
  HalfInt lmax;

  void validate() const;
};

double plancherel_norm(const SpectralFieldSU2& f);

enum class SymbolChoice { SubLaplacian, Laplacian };

// Σ_{l ≤ lmax} (2l+1) ‖(I + σ(l))^{−s}‖²_HS.
double bessel_partial_sum(double s, HalfInt lmax, SymbolChoice symbol = SymbolChoice::SubLaplacian);

}  // namespace hypowave::su2
