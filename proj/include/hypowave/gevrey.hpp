#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hypowave/heisenberg.hpp"
#include "hypowave/su2.hpp"

namespace hypowave {

using SpectralField = std::variant<su2::SpectralFieldSU2, heis::SpectralFieldHeis>;

enum class Group { SU2, Heis };
Group group_of(const SpectralField& f);

double plancherel_norm(const SpectralField& f);

// Row i of every coefficient block scaled by g(μ_i), μ_i the sub-Laplacian eigenvalue.
SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& g);

// Eigenvalues of σ_L on the nonzero rows of f (sorted, unique).
std::vector<double> support_eigenvalues(const SpectralField& f);

bool is_zero(const SpectralField& f);

namespace gevrey {

// ‖L^k f‖ for k = 0..k_max (k_max ≤ 64).
std::vector<double> lk_norms(const SpectralField& f, int k_max);

// ‖exp(D L^{1/(2s)}) f‖.
double exp_norm(const SpectralField& f, double D, double s);

// ‖(I + L)^{s/2} f‖.
double sobolev_norm(const SpectralField& f, double s);

// s^s / D^s.
double forward_constant(double D, double s);

struct SupMultiplier {
  double lambda_star = 0.0;  // (2ks/D)^{2s}
  double value = 0.0;        // λ^k e^{−D λ^{1/(2s)}} at λ_star
};
SupMultiplier sup_multiplier(int k, double D, double s);

struct ForwardCheck {
  std::vector<int> k;
  std::vector<double> lk;
  std::vector<double> bound;   // M (s^s/D^s)^{2k} ((2k)!)^s
  std::vector<double> margin;  // bound − lk, +inf for the zero field
  double M = 0.0;
  bool pass = false;
};

ForwardCheck forward_constant_check(const SpectralField& f, double D, double s, int k_max);

struct OrderFit {
  double C = 0.0;
  double A = 0.0;
  double s = 0.0;
  double rms_residual = 0.0;
};

constexpr int kFitWindowStart = 3;

// Least squares of log‖L^k f‖ on log C + 2k log A + s log Γ(2k+1) over k ≥ 3.
OrderFit gevrey_order_fit(const std::vector<int>& k, const std::vector<double>& norms);
OrderFit gevrey_order_fit(const std::vector<double>& norms);  // k = 0, 1, ...

struct MultinomialCheck {
  int k = 0;
  double lhs = 0.0;          // ‖σ_L^k f‖
  double word_sum = 0.0;     // Σ over all 4^k words w of length 2k of ‖σ_w f‖
  double A = 0.0;            // smallest A with max_{|w|=j} ‖σ_w f‖ ≤ ‖f‖ A^j (j!)^s, j ≤ 2k
  double A_prime = 0.0;      // A · r, r = 2
  double bound = 0.0;        // ‖f‖ A'^{2k} ((2k)!)^s
  bool pass = false;
};

MultinomialCheck multinomial_growth_check(const su2::SpectralFieldSU2& f, int k, double s = 1.0);

struct GevreyReport {
  std::vector<int> k_values;
  std::vector<double> lk_norms;
  OrderFit fitted;
  bool fit_ok = false;
  std::map<std::pair<double, double>, double> exp_norms;  // (D, s) → norm
  std::map<std::pair<double, double>, ForwardCheck> forward;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string csv() const;  // k, D, s, lk_norm, bound, margin
};

GevreyReport gevrey_report(const SpectralField& f, int k_max, const std::vector<double>& D_values,
                           const std::vector<double>& s_values);

}  // namespace gevrey
}  // namespace hypowave
