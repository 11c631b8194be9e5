#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hypowave/coefficient.hpp"
#include "hypowave/gevrey.hpp"
#include "hypowave/mode_ode.hpp"

namespace hypowave::wave {

// SU(2): (2l, 2m). ℍ₁: (λ index, k).
struct ModeKey {
  int first = 0;
  int second = 0;
};

struct DecoupledMode {
  ModeKey key;
  double mu = 0.0;     // σ_L eigenvalue, β = √μ
  double beta = 0.0;
  int multiplicity = 0;  // columns sharing this row
  std::size_t problem = 0;  // index into distinct_mu
};

struct DecoupledSystem {
  Group group = Group::SU2;
  std::vector<DecoupledMode> modes;
  std::vector<double> distinct_mu;  // one mode problem per entry
  PropagationSpeed speed;
};

DecoupledSystem decouple(const SpectralField& f0, const SpectralField& f1, const PropagationSpeed& speed);

struct WaveSolution {
  std::vector<double> times;
  std::vector<SpectralField> u;
  std::vector<SpectralField> ut;
  SpectralField u0;
  SpectralField u1;
};

WaveSolution solve_cauchy(const SpectralField& f0, const SpectralField& f1,
                          const PropagationSpeed& speed, double T, std::size_t n_samples = 201,
                          double rel_tol = 1e-10);

// Closed form for a ≡ c: cos(√c β t) û0 + sin(√c β t)/(√c β) û1 (drift at β = 0).
WaveSolution exact_const_solution(const SpectralField& f0, const SpectralField& f1, double c,
                                  double T, std::size_t n_samples = 201);

// max over samples and entries of |û − û'| and |∂tû − ∂tû'|.
double max_deviation(const WaveSolution& a, const WaveSolution& b);

struct RatioRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SobolevReport {
  double s = 0.0;
  std::vector<RatioRow> rows;
  double C_meas = 0.0;
  bool zero_data = false;

  std::string csv() const;
  nlohmann::json summary() const;
};

// ‖u(t)‖²_{H^{s+1}} + ‖∂tu(t)‖²_{H^s} against the same at t = 0.
SobolevReport verify_sobolev_wellposedness(const WaveSolution& sol, double s);

struct TruncationStudy {
  SobolevReport coarse;
  SobolevReport fine;
  double log_ratio = 0.0;  // log(C_fine / C_coarse)
  bool pass = false;       // |log_ratio| ≤ log 2
};

// Data built at truncation `trunc` and again at 2·trunc (2l or N, per group).
TruncationStudy sobolev_truncation_study(
    const std::function<std::pair<SpectralField, SpectralField>(int)>& data,
    const PropagationSpeed& speed, double T, double s, int trunc, std::size_t n_samples,
    double rel_tol);

enum class GevreyVerdict { Pass, Fail, Inconclusive };

struct GevreyWellposedness {
  int case_tag = 2;
  double s = 1.0;
  double A = 0.0;
  double K_fit = 0.0;
  double B = 0.0;
  std::vector<RatioRow> rows;
  double C_meas = 0.0;
  GevreyVerdict verdict = GevreyVerdict::Inconclusive;
  std::string note;

  std::string csv() const;
  nlohmann::json summary() const;
};

// LHS(t) = ‖e^{B L^{1/(2s)}} u(t)‖ + ‖e^{B L^{1/(2s)}} ∂tu(t)‖,
// RHS = ‖e^{A L^{1/(2s)}} L^{1/2} u0‖ + ‖e^{A L^{1/(2s)}} u1‖, B = A − max(K_fit, 0)·T.
// C_bound caps C_meas for a Pass verdict.
GevreyWellposedness verify_gevrey_wellposedness(const WaveSolution& sol, int case_tag, double s,
                                                double A, double T, double K_fit,
                                                double C_bound = 1e6);

// K_fit for a speed from the mode-level envelope fit on a β grid.
double fitted_growth_constant(int case_tag, const PropagationSpeed& speed, double s, double T,
                              const std::vector<double>& beta_grid, double rel_tol);

// e^{−c(2l+1)}-weighted SU(2) data with deterministic entries, all l ≤ lmax (2l ≤ lmax2).
su2::SpectralFieldSU2 weighted_su2_field(int lmax2, double c, unsigned seed = 7, int lmin2 = 0);

// Per-λ e^{−c(2k+1)}-weighted ℍ₁ data on the given grid.
heis::SpectralFieldHeis weighted_heis_field(const std::vector<double>& lambdas, int N, double c,
                                           unsigned seed = 7);

}  // namespace hypowave::wave
