#include "hypowave/gevrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/QR>

#include "hypowave/report.hpp"

namespace hypowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw PreconditionError(msg);
}

double su2_mu(int l2, int row) {
  const int m2 = 2 * row - l2;
  return (l2 * (l2 + 2) - m2 * m2) / 4.0;
}

double heis_mu(double lambda, int k) { return std::abs(lambda) * (2.0 * k + 1.0); }

// Allows a rounding-level shortfall when comparing a bound against a norm.
bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-12); }

}  // namespace

Group group_of(const SpectralField& f) {
  return std::holds_alternative<su2::SpectralFieldSU2>(f) ? Group::SU2 : Group::Heis;
}

double plancherel_norm(const SpectralField& f) {
  return std::visit([](const auto& x) { return plancherel_norm(x); }, f);
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& g) {
  if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&f)) {
    su2::SpectralFieldSU2 out = *s;
    for (auto& [l2, m] : out.coeffs)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= g(su2_mu(l2, static_cast<int>(i)));
    return out;
  }
  heis::SpectralFieldHeis out = std::get<heis::SpectralFieldHeis>(f);
  for (std::size_t j = 0; j < out.lambdas.size(); ++j)
    for (Eigen::Index k = 0; k < out.coeffs[j].rows(); ++k)
      out.coeffs[j].row(k) *= g(heis_mu(out.lambdas[j], static_cast<int>(k)));
  return out;
}

std::vector<double> support_eigenvalues(const SpectralField& f) {
  std::set<double> mus;
  if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&f)) {
    for (const auto& [l2, m] : s->coeffs)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.row(i).squaredNorm() > 0.0) mus.insert(su2_mu(l2, static_cast<int>(i)));
  } else {
    const auto& h = std::get<heis::SpectralFieldHeis>(f);
    for (std::size_t j = 0; j < h.lambdas.size(); ++j)
      for (Eigen::Index k = 0; k < h.coeffs[j].rows(); ++k)
        if (h.coeffs[j].row(k).squaredNorm() > 0.0)
          mus.insert(heis_mu(h.lambdas[j], static_cast<int>(k)));
  }
  return {mus.begin(), mus.end()};
}

bool is_zero(const SpectralField& f) { return support_eigenvalues(f).empty(); }

namespace gevrey {

std::vector<double> lk_norms(const SpectralField& f, int k_max) {
  require(k_max >= 0 && k_max <= 64, "k_max must lie in [0, 64]");
  std::vector<double> out;
  out.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    const double n = plancherel_norm(apply_multiplier(f, [k](double mu) { return std::pow(mu, k); }));
    if (!std::isfinite(n)) throw OverflowError("norm of L^k f overflowed; rescale the field", k);
    out.push_back(n);
  }
  return out;
}

double exp_norm(const SpectralField& f, double D, double s) {
  require(D >= 0.0, "D must be nonnegative");
  require(s >= 1.0, "s must be >= 1");
  return plancherel_norm(
      apply_multiplier(f, [=](double mu) { return std::exp(D * std::pow(mu, 1.0 / (2.0 * s))); }));
}

double sobolev_norm(const SpectralField& f, double s) {
  return plancherel_norm(apply_multiplier(f, [=](double mu) { return std::pow(1.0 + mu, s / 2.0); }));
}

double forward_constant(double D, double s) {
  require(D > 0.0 && s > 0.0, "forward constant needs D, s > 0");
  return std::pow(s, s) / std::pow(D, s);
}

SupMultiplier sup_multiplier(int k, double D, double s) {
  require(k >= 0 && D > 0.0 && s > 0.0, "sup multiplier needs k >= 0, D > 0, s > 0");
  SupMultiplier r;
  r.lambda_star = std::pow(2.0 * k * s / D, 2.0 * s);
  r.value = std::pow(r.lambda_star, k) * std::exp(-D * std::pow(r.lambda_star, 1.0 / (2.0 * s)));
  return r;
}

ForwardCheck forward_constant_check(const SpectralField& f, double D, double s, int k_max) {
  ForwardCheck c;
  c.M = exp_norm(f, D, s);
  const auto lk = lk_norms(f, k_max);
  const bool zero = is_zero(f);
  const double logA = std::log(forward_constant(D, s));
  c.pass = true;
  for (int k = 0; k <= k_max; ++k) {
    c.k.push_back(k);
    c.lk.push_back(lk[k]);
    if (zero) {
      c.bound.push_back(0.0);
      c.margin.push_back(kInf);
      continue;
    }
    const double logb = std::log(c.M) + 2.0 * k * logA + s * std::lgamma(2.0 * k + 1.0);
    const double b = std::exp(logb);
    c.bound.push_back(b);
    c.margin.push_back(b - lk[k]);
    if (!within(lk[k], b)) c.pass = false;
  }
  return c;
}

OrderFit gevrey_order_fit(const std::vector<int>& k, const std::vector<double>& norms) {
  require(k.size() == norms.size(), "k and norms must have equal length");
  std::vector<std::pair<int, double>> pts;
  for (std::size_t i = 0; i < k.size(); ++i) {
    require(std::isfinite(norms[i]) && norms[i] >= 0.0, "norms must be finite and nonnegative");
    if (k[i] >= kFitWindowStart && norms[i] > 0.0) pts.emplace_back(k[i], norms[i]);
  }
  require(pts.size() >= 5, "degenerate input: fewer than 5 positive norms with k >= 3");
  Eigen::MatrixXd X(pts.size(), 3);
  Eigen::VectorXd y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double kk = pts[i].first;
    X(i, 0) = 1.0;
    X(i, 1) = 2.0 * kk;
    X(i, 2) = std::lgamma(2.0 * kk + 1.0);
    y(i) = std::log(pts[i].second);
  }
  const Eigen::Vector3d beta = X.colPivHouseholderQr().solve(y);
  OrderFit fit;
  fit.C = std::exp(beta(0));
  fit.A = std::exp(beta(1));
  fit.s = beta(2);
  fit.rms_residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(pts.size()));
  return fit;
}

OrderFit gevrey_order_fit(const std::vector<double>& norms) {
  std::vector<int> k(norms.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<int>(i);
  return gevrey_order_fit(k, norms);
}

MultinomialCheck multinomial_growth_check(const su2::SpectralFieldSU2& f, int k, double s) {
  require(k >= 0 && 2 * k <= 4, "word length 2k must be <= 4");
  f.validate();
  MultinomialCheck c;
  c.k = k;
  const double C = su2::plancherel_norm(f);
  c.lhs = plancherel_norm(apply_multiplier(SpectralField(f), [k](double mu) { return std::pow(mu, k); }));

  auto word_norm = [&](const std::string& w) {
    su2::SpectralFieldSU2 g = f;
    for (auto& [l2, m] : g.coeffs) m = su2::word_symbol(w, su2::HalfInt{l2}) * m;
    return su2::plancherel_norm(g);
  };
  auto words = [](int len) {
    std::vector<std::string> out{""};
    for (int i = 0; i < len; ++i) {
      std::vector<std::string> next;
      for (const auto& w : out) {
        next.push_back(w + 'X');
        next.push_back(w + 'Y');
      }
      out = std::move(next);
    }
    return out;
  };

  for (const auto& w : words(2 * k)) c.word_sum += word_norm(w);
  c.A = 0.0;
  if (C > 0.0) {
    for (int j = 1; j <= 2 * k; ++j) {
      double Mj = 0.0;
      for (const auto& w : words(j)) Mj = std::max(Mj, word_norm(w));
      if (Mj > 0.0) c.A = std::max(c.A, std::pow(Mj / (C * std::pow(std::tgamma(j + 1.0), s)), 1.0 / j));
    }
  }
  c.A_prime = 2.0 * c.A;
  c.bound = C * std::pow(c.A_prime, 2.0 * k) * std::pow(std::tgamma(2.0 * k + 1.0), s);
  c.pass = within(c.lhs, c.word_sum) && within(c.lhs, c.bound) && within(c.word_sum, c.bound);
  return c;
}

nlohmann::json GevreyReport::to_json() const {
  nlohmann::json j;
  j["k"] = k_values;
  j["lk_norms"] = lk_norms;
  if (fit_ok) j["fit"] = {{"C", fitted.C}, {"A", fitted.A}, {"s", fitted.s}, {"rms", fitted.rms_residual}};
  j["exp_norms"] = nlohmann::json::array();
  for (const auto& [key, v] : exp_norms)
    j["exp_norms"].push_back({{"D", key.first}, {"s", key.second}, {"norm", v}});
  j["forward_checks"] = nlohmann::json::array();
  for (const auto& [key, fc] : forward)
    j["forward_checks"].push_back({{"D", key.first}, {"s", key.second}, {"pass", fc.pass}});
  j["pass"] = pass;
  return j;
}

std::string GevreyReport::csv() const {
  CsvTable t{{"k", "D", "s", "lk_norm", "bound", "margin"}, {}};
  for (const auto& [key, fc] : forward)
    for (std::size_t i = 0; i < fc.k.size(); ++i)
      t.add_row({std::to_string(fc.k[i]), format_double(key.first), format_double(key.second),
                 format_double(fc.lk[i]), format_double(fc.bound[i]), format_double(fc.margin[i])});
  return t.str();
}

GevreyReport gevrey_report(const SpectralField& f, int k_max, const std::vector<double>& D_values,
                           const std::vector<double>& s_values) {
  GevreyReport r;
  r.lk_norms = lk_norms(f, k_max);
  for (int k = 0; k <= k_max; ++k) r.k_values.push_back(k);
  try {
    r.fitted = gevrey_order_fit(r.k_values, r.lk_norms);
    r.fit_ok = true;
  } catch (const PreconditionError&) {
    r.fit_ok = false;
  }
  r.pass = true;
  for (double D : D_values)
    for (double s : s_values) {
      r.exp_norms[{D, s}] = exp_norm(f, D, s);
      auto fc = forward_constant_check(f, D, s, k_max);
      r.pass = r.pass && fc.pass;
      r.forward[{D, s}] = std::move(fc);
    }
  return r;
}

}  // namespace gevrey
}  // namespace hypowave
