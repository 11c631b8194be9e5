#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypowave/coefficient.hpp"
#include "hypowave/common.hpp"

namespace hypowave {

// v'' + β² a(t) v = 0 on [0, horizon].
struct ModeProblem {
  double beta = 0.0;
  PropagationSpeed speed;
  cplx v0{0.0, 0.0};
  cplx v1{0.0, 0.0};
  double horizon = 1.0;

  ModeProblem(double beta, PropagationSpeed speed, cplx v0, cplx v1,
              std::optional<double> horizon = std::nullopt);
  double initial_energy() const { return beta * beta * std::norm(v0) + std::norm(v1); }
};

struct FirstOrderSystem {
  Eigen::Vector2cd V0;                        // (iβ v0, v1)
  std::function<Eigen::Matrix2d(double)> A;   // [[0, 1], [a(t), 0]]
};

// V = (iβ v, v') satisfies V' = iβ A(t) V.
FirstOrderSystem reduce_to_system(const ModeProblem& p);

struct IntegrateOptions {
  std::vector<double> sample_times;  // increasing, inside [0, horizon]; overrides n_samples
  std::size_t n_samples = 201;
};

struct ModeTrajectory {
  double beta = 0.0;
  std::vector<double> times;
  std::vector<cplx> v;
  std::vector<cplx> v_prime;
  std::vector<double> energy;    // β²|v|² + |v'|²
  double accepted_tolerance = 0.0;
  double sup_energy = 0.0;       // over every accepted step, not only samples
  std::size_t steps = 0;
  std::size_t rejected = 0;

  Eigen::Vector2cd state(std::size_t i) const {
    return {cplx(0.0, beta) * v[i], v_prime[i]};
  }
};

// Adaptive Dormand–Prince 5(4). β = 0 gives the exact drift v0 + t v1.
ModeTrajectory integrate_mode(const ModeProblem& p, double rel_tol,
                              const IntegrateOptions& opts = {});

Eigen::Matrix2d symmetriser(double a_val);
Eigen::Matrix2d quasi_symmetriser(double a_val, double epsilon);

// (M V, V); M must be Hermitian.
double energy(const Eigen::Matrix2cd& M, const Eigen::Vector2cd& V);
double energy(const Eigen::Matrix2d& M, const Eigen::Vector2cd& V);

// (S(t) V, V) along a trajectory.
std::vector<double> symmetriser_energy(const ModeTrajectory& traj, const PropagationSpeed& a);

// sup ‖S_t‖ / c0 with c0 = 2 min(a0, 1): the Grönwall rate of the symmetriser energy.
double case1_growth_rate(const PropagationSpeed& a);

struct GronwallReport {
  double rate = 0.0;        // c'
  double max_excess = 0.0;  // max over samples of discrete E'/E − c'
  bool pass = false;
};

// (E_{i+1} − E_i)/dt ≤ (c' + 10 rel_tol) max(E_i, E_{i+1}) at every sample.
GronwallReport gronwall_check(const ModeTrajectory& traj, const PropagationSpeed& a, double rel_tol);

struct CaseParams {
  std::optional<int> l;          // case 3
  std::optional<double> alpha;   // case 4: exponent of √a
  double beta0 = 1.0;
};

double case_epsilon(int case_tag, double beta, const CaseParams& params);

// Case-3 and case-4 constants taken from the class of a.
CaseParams case_params(int case_tag, const PropagationSpeed& a, double beta0 = 1.0);

struct BoundPrediction {
  int case_tag = 1;
  double s_or_sigma = 1.0;
  double K = 0.0;
  double C = 1.0;
  double E0 = 0.0;
  std::function<double(double, double)> envelope;  // (t, β)
};

// Multiplier in front of the exponential (1, 1 + β^{l/σ}, or 1 + β^{2α/(α+1)}).
double envelope_prefactor(int case_tag, double beta, const CaseParams& params);

BoundPrediction predict_envelope(int case_tag, const ModeProblem& p, double s, double K, double C);

// |W(t_i)| with W = e^{(ρ0 − K t) β^{1/s}} det H · H^{-1} V and H = [[1, 1], [λ1, λ2]].
std::vector<double> transformed_energy(const ModeTrajectory& traj, const RegularizedRoots& roots,
                                       double rho0, double K, double s, double beta);
// Same quantity as log|W|, free of overflow.
std::vector<double> transformed_log_energy(const ModeTrajectory& traj, const RegularizedRoots& roots,
                                           double rho0, double K, double s, double beta);

struct MonotonicityRow {
  double beta = 0.0;
  double epsilon = 0.0;
  double phi_max = 0.0;        // sup_t of the W growth bracket
  double max_increase = 0.0;   // max_i |W_{i+1}|/|W_0| − |W_i|/|W_0|
  bool pass = false;
};

struct MonotonicityReport {
  int case_tag = 2;
  double s = 1.0;
  double alpha = 1.0;     // root exponent
  double gamma = 0.0;     // bracket ≤ k β^γ
  double k = 0.0;
  double beta0 = 1.0;
  double K = 0.0;         // k β0^{γ − 1/s}
  std::vector<MonotonicityRow> rows;
  bool pass = false;
};

// Cases 2 and 4: measure k on the grid, set K by the K-choice rule, integrate
// both unit columns and check |W| is nonincreasing up to 10 rel_tol.
MonotonicityReport check_w_monotonicity(int case_tag, const PropagationSpeed& a,
                                        const std::vector<double>& beta_grid, double s,
                                        double rel_tol,
                                        double points_per_unit = kDefaultPointsPerUnit);

struct VerificationRow {
  double beta = 0.0;
  double sup_ratio = 0.0;   // max over both unit columns of sup_t E(t)/E0
  double x = 0.0;           // T β^{1/s}, or β^{1/σ} in case 3
  double y = 0.0;           // log(sup_ratio / prefactor)
  double residual = 0.0;
};

struct VerificationReport {
  int case_tag = 1;
  double s = 1.0;
  double T = 1.0;
  std::vector<VerificationRow> rows;
  double fitted_K = 0.0;
  double fitted_log_C = 0.0;
  double residual_spread = 0.0;
  double ratio_spread = 1.0;   // max/min sup_ratio
  double growth_rate = 0.0;    // c' for case 1
  bool pass = false;
  std::string detail;

  std::string csv() const;
};

VerificationReport verify_envelope(int case_tag, const PropagationSpeed& a,
                                   const std::vector<double>& beta_grid, double s, double T,
                                   double rel_tol, double beta0 = 1.0);

// Inclusive admissible range check for s used by predict_envelope and verify_envelope.
void check_case_index(int case_tag, const PropagationSpeed& a, double s);

}  // namespace hypowave
