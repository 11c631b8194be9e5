#include "hypowave/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypowave/field_io.hpp"
#include "hypowave/mode_ode.hpp"
#include "hypowave/report.hpp"
#include "hypowave/wave_solver.hpp"

namespace hypowave::cli {

namespace {

using nlohmann::json;

// Bad flags, bad config, or parameters rejected before any computation.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageFailure(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageFailure(flag + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

// Runs `f`, turning precondition failures into usage errors.
template <class F>
auto validated(F&& f) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    throw UsageFailure(e.what());
  } catch (const SchemaError& e) {
    throw UsageFailure(e.what());
  }
}

struct Context {
  std::filesystem::path out_dir;
  std::ostream& out;

  void write(const std::string& name, const std::string& content) const {
    write_file_atomic((out_dir / name).string(), content);
  }
};

int finish(const Context& ctx, const std::string& prefix, const std::vector<CheckRow>& rows,
           json extra) {
  const Summary s = summarize(rows);
  const json j = {{"checks", s.json}, {"all_pass", s.all_pass}, {"details", std::move(extra)}};
  ctx.write(prefix + "_summary.json", j.dump(2) + "\n");
  ctx.out << s.table;
  return s.all_pass ? kPass : kViolated;
}

Verdict verdict(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

// ---- ode-energy ------------------------------------------------------------

struct OdeArgs {
  int case_tag = 1;
  std::string speed;
  std::string beta_grid = "1,10,100";
  double T = 1.0;
  std::optional<double> s;
  double rel_tol = 1e-10;
  bool check_w = false;
  std::optional<double> trajectory_beta;
};

int run_ode(const OdeArgs& a, const Context& ctx) {
  const auto grid = parse_list(a.beta_grid, "--beta-grid");
  auto [speed, s] = validated([&] {
    if (a.case_tag < 1 || a.case_tag > 4) throw PreconditionError("--case must be 1, 2, 3 or 4");
    if (!(a.rel_tol > 0.0)) throw PreconditionError("--rel-tol must be positive");
    auto sp = make_speed(a.speed, a.T);
    double sv = 1.0;
    if (a.s) {
      sv = *a.s;
    } else if (a.case_tag == 3) {
      sv = 1.0 + *case_params(3, sp).l / 2.0;
    } else if (a.case_tag != 1) {
      throw PreconditionError("--s is required for case " + std::to_string(a.case_tag));
    }
    check_case_index(a.case_tag, sp, sv);
    for (double b : grid)
      if (b < 1.0) throw PreconditionError("beta grid entries must be >= 1");
    return std::pair{sp, sv};
  });

  const auto rep = verify_envelope(a.case_tag, speed, grid, s, a.T, a.rel_tol);
  ctx.write("ode_energy.csv", rep.csv());
  std::vector<std::vector<double>> dat;
  for (const auto& r : rep.rows) dat.push_back({r.beta, r.sup_ratio, r.x, r.y});
  ctx.write("ode_energy.dat", dat_text({"beta", "sup_ratio", "x", "y"}, dat));

  std::vector<CheckRow> rows;
  double sup = 0.0;
  for (const auto& r : rep.rows) sup = std::max(sup, r.sup_ratio);
  if (a.case_tag == 1) {
    rows.push_back({"ratio spread", "energy ratio uniform in beta", rep.ratio_spread, 2.0,
                    verdict(rep.ratio_spread <= 2.0), ""});
    const double bound = std::exp(rep.growth_rate * a.T);
    rows.push_back({"sup ratio", "exp(c' T)", sup, bound, verdict(sup <= bound * (1 + 1e-9)), ""});
  } else {
    rows.push_back({"envelope fit", "log ratio <= log C + K x", rep.fitted_K, 0.0,
                    verdict(rep.pass), rep.detail});
  }
  json extra = {{"case", a.case_tag}, {"s", s},          {"T", a.T},
                {"speed", speed.label()}, {"fitted_K", rep.fitted_K},
                {"fitted_log_C", rep.fitted_log_C}, {"ratio_spread", rep.ratio_spread}};

  if (a.check_w) {
    if (a.case_tag != 2 && a.case_tag != 4) throw UsageFailure("--check-w applies to cases 2 and 4");
    const auto w = check_w_monotonicity(a.case_tag, speed, grid, s, a.rel_tol);
    double worst = 0.0;
    for (const auto& r : w.rows) worst = std::max(worst, r.max_increase);
    rows.push_back({"W monotonicity", "|W| nonincreasing with chosen K", worst, 10 * a.rel_tol,
                    verdict(w.pass), ""});
    extra["w_K"] = w.K;
    extra["w_k"] = w.k;
    extra["w_gamma"] = w.gamma;
  }

  if (a.trajectory_beta) {
    const auto traj = integrate_mode(ModeProblem(*a.trajectory_beta, speed, 1.0, 0.0, a.T), a.rel_tol);
    std::vector<std::vector<double>> td;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      td.push_back({traj.times[i], traj.v[i].real(), traj.v[i].imag(), traj.v_prime[i].real(),
                    traj.v_prime[i].imag(), traj.energy[i]});
    ctx.write("ode_trajectory.dat", dat_text({"t", "re_v", "im_v", "re_dv", "im_dv", "E"}, td));
  }
  return finish(ctx, "ode_energy", rows, extra);
}

// ---- su2-riesz ---------------------------------------------------------------

struct Su2Args {
  std::string words = "X";
  double lmax = 50.0;
  double lmin = 0.5;
  std::optional<double> bound;
};

int run_su2(const Su2Args& a, const Context& ctx) {
  std::vector<std::string> words;
  {
    std::stringstream ss(a.words);
    std::string w;
    while (std::getline(ss, w, ',')) words.push_back(w);
  }
  const auto [lo, hi] = validated([&] {
    const auto l0 = su2::HalfInt::from_double(a.lmin);
    const auto l1 = su2::HalfInt::from_double(a.lmax);
    if (l0.twice < 1) throw PreconditionError("--lmin must be >= 1/2");
    if (l1 < l0) throw PreconditionError("--lmax must be >= --lmin");
    if (words.empty()) throw PreconditionError("--word is empty");
    for (const auto& w : words)
      if (w.find_first_not_of("XY") != std::string::npos)
        throw PreconditionError("word '" + w + "' must use letters X and Y");
    return std::pair{l0, l1};
  });

  CsvTable csv{{"l", "word", "op_norm", "max_norm"}, {}};
  std::vector<CheckRow> rows;
  json extra = json::object();
  for (const auto& w : words) {
    double sup = 0.0;
    std::vector<double> tail;
    for (int l2 = lo.twice; l2 <= hi.twice; ++l2) {
      const auto n = su2::matrix_norms(su2::riesz_symbol(w, su2::HalfInt{l2}).matrix);
      csv.add_row({format_double(l2 / 2.0), w, format_double(n.op), format_double(n.max)});
      sup = std::max(sup, n.op);
      if (2 * l2 >= hi.twice) tail.push_back(n.op);
    }
    const double bound = a.bound.value_or(std::pow(2.0, static_cast<double>(w.size())));
    const auto [mn, mx] = std::minmax_element(tail.begin(), tail.end());
    const double flatness = *mn > 0.0 ? *mx / *mn : 0.0;
    rows.push_back({"riesz " + (w.empty() ? std::string("(empty)") : w), "sup_l op norm <= bound",
                    sup, bound, verdict(sup <= bound), ""});
    extra[w] = {{"sup_op_norm", sup}, {"upper_half_max_over_min", flatness}};
  }
  ctx.write("su2_riesz.csv", csv.str());
  return finish(ctx, "su2_riesz", rows, extra);
}

// ---- heis-riesz --------------------------------------------------------------

struct HeisArgs {
  std::string words = "Z";
  std::string lambdas = "-10,-1,-0.1,0.1,1,10";
  int N = 128;
  double tol = 1e-12;
};

int run_heis(const HeisArgs& a, const Context& ctx) {
  const auto lambdas = parse_list(a.lambdas, "--lambdas");
  std::vector<std::string> words;
  {
    std::stringstream ss(a.words);
    std::string w;
    while (std::getline(ss, w, ',')) words.push_back(w);
  }
  validated([&] {
    if (words.empty()) throw PreconditionError("--word is empty");
    for (const auto& w : words) {
      if (w.find_first_not_of("ZB") != std::string::npos)
        throw PreconditionError("word '" + w + "' must use letters Z and B");
      if (2 * static_cast<int>(w.size()) >= a.N) throw PreconditionError("word too long for --N");
    }
    for (double l : lambdas)
      if (l == 0.0 || !std::isfinite(l)) throw PreconditionError("lambda must be finite and nonzero");
    return 0;
  });

  CsvTable csv{{"lambda", "word", "op_norm", "block_size"}, {}};
  std::vector<CheckRow> rows;
  json extra = json::object();
  for (const auto& w : words) {
    std::optional<CMatrix> ref_pos, ref_neg;
    double dev_same = 0.0, dev_cross = 0.0;
    for (double l : lambdas) {
      const auto sym = heis::riesz_symbol(w, l, a.N);
      const CMatrix v = sym.valid();
      csv.add_row({format_double(l), w, format_double(su2::matrix_norms(v).op),
                   std::to_string(sym.valid_block())});
      auto& ref = l > 0 ? ref_pos : ref_neg;
      if (!ref) ref = v;
      else dev_same = std::max(dev_same, (v - *ref).cwiseAbs().maxCoeff());
    }
    if (ref_pos && ref_neg) dev_cross = (*ref_pos - *ref_neg).cwiseAbs().maxCoeff();
    rows.push_back({"lambda invariance " + w, "same-sign entries agree", dev_same, a.tol,
                    verdict(dev_same <= a.tol), ""});
    extra[w] = {{"same_sign_deviation", dev_same}, {"cross_sign_deviation", dev_cross}};
  }
  ctx.write("heis_riesz.csv", csv.str());
  return finish(ctx, "heis_riesz", rows, extra);
}

// ---- wave --------------------------------------------------------------------

struct WaveArgs {
  std::string group = "su2";
  std::string speed = "const:1";
  double T = 1.0;
  std::string mode = "sobolev";
  double s = 1.0;
  int case_tag = 2;
  double A = 1.0;
  std::string beta_grid = "4,16,64,256";
  std::string u0_path, u1_path;
  int lmax2 = 12;
  int N = 32;
  std::string lambdas = "-4,-2,-1,-0.5,0.5,1,2,4,8";
  double weight = 1.0;
  unsigned seed = 7;
  std::size_t n_samples = 201;
  double rel_tol = 1e-10;
  std::string save_solution;
};

SpectralField zero_like(const SpectralField& f) {
  return apply_multiplier(f, [](double) { return 0.0; });
}

// Same field inside a doubled truncation, zero outside.
SpectralField padded(const SpectralField& f) {
  if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&f)) {
    su2::SpectralFieldSU2 g = *s;
    g.lmax = {std::max(1, 2 * s->lmax.twice)};
    return g;
  }
  heis::SpectralFieldHeis g = std::get<heis::SpectralFieldHeis>(f);
  for (auto& m : g.coeffs) {
    CMatrix big = CMatrix::Zero(2 * g.trunc, 2 * g.trunc);
    big.topLeftCorner(g.trunc, g.trunc) = m;
    m = big;
  }
  g.trunc *= 2;
  return g;
}

int run_wave(const WaveArgs& a, const Context& ctx) {
  using DataFn = std::function<std::pair<SpectralField, SpectralField>(int)>;
  auto prepared = validated([&] {
    if (a.group != "su2" && a.group != "heis") throw PreconditionError("--group must be su2 or heis");
    if (a.mode != "sobolev" && a.mode != "gevrey") throw PreconditionError("--mode must be sobolev or gevrey");
    if (!(a.T > 0.0)) throw PreconditionError("--T must be positive");
    if (a.n_samples < 2) throw PreconditionError("--n-samples must be >= 2");
    auto sp = make_speed(a.speed, a.T);
    if (a.mode == "gevrey") {
      if (a.case_tag < 2 || a.case_tag > 4) throw PreconditionError("--case must be 2, 3 or 4");
      check_case_index(a.case_tag, sp, a.s);
    }
    DataFn data;
    int trunc = 0;
    if (!a.u0_path.empty()) {
      auto f0 = io::load_field(a.u0_path);
      auto f1 = a.u1_path.empty() ? zero_like(f0) : io::load_field(a.u1_path);
      wave::decouple(f0, f1, sp);
      trunc = 1;
      data = [f0, f1](int t) {
        return t == 1 ? std::pair{f0, f1} : std::pair{padded(f0), padded(f1)};
      };
    } else if (a.group == "su2") {
      if (a.lmax2 < 0) throw PreconditionError("--lmax2 must be >= 0");
      trunc = a.lmax2;
      data = [w = a.weight, seed = a.seed](int l2) {
        return std::pair<SpectralField, SpectralField>{wave::weighted_su2_field(l2, w, seed),
                                                       wave::weighted_su2_field(l2, w, seed + 1)};
      };
    } else {
      if (a.N < 1) throw PreconditionError("--N must be >= 1");
      trunc = a.N;
      data = [lam = parse_list(a.lambdas, "--lambdas"), w = a.weight, seed = a.seed](int n) {
        return std::pair<SpectralField, SpectralField>{wave::weighted_heis_field(lam, n, w, seed),
                                                       wave::weighted_heis_field(lam, n, w, seed + 1)};
      };
      data(trunc);
    }
    return std::tuple{sp, data, trunc};
  });
  auto& [speed, data, trunc] = prepared;
  const auto [f0, f1] = data(trunc);
  const auto sol = wave::solve_cauchy(f0, f1, speed, a.T, a.n_samples, a.rel_tol);
  if (!a.save_solution.empty()) io::save_field(a.save_solution, sol.u.back());

  std::vector<CheckRow> rows;
  json extra = {{"speed", speed.label()}, {"T", a.T}, {"s", a.s}, {"group", a.group}};
  if (auto c = speed.constant_value()) {
    const double dev = wave::max_deviation(sol, wave::exact_const_solution(f0, f1, *c, a.T, a.n_samples));
    rows.push_back({"closed-form agreement", "cos/sin solution for constant a", dev, 10 * a.rel_tol,
                    verdict(dev <= 10 * a.rel_tol), ""});
  }
  if (a.mode == "sobolev") {
    const auto study = wave::sobolev_truncation_study(data, speed, a.T, a.s, trunc, a.n_samples, a.rel_tol);
    ctx.write("wave.csv", study.coarse.csv());
    rows.push_back({"Sobolev C_meas", "energy in H^{s+1} x H^s", study.coarse.C_meas,
                    study.fine.C_meas, Verdict::Info, "bound column holds the doubled-truncation value"});
    rows.push_back({"truncation stability", "|log(C_fine / C_coarse)| <= log 2", std::abs(study.log_ratio),
                    std::log(2.0), verdict(study.pass), ""});
    extra["sobolev"] = study.coarse.summary();
    extra["sobolev_fine"] = study.fine.summary();
  } else {
    const double K = wave::fitted_growth_constant(a.case_tag, speed, a.s, a.T,
                                                  parse_list(a.beta_grid, "--beta-grid"), a.rel_tol);
    const auto g = wave::verify_gevrey_wellposedness(sol, a.case_tag, a.s, a.A, a.T, K);
    ctx.write("wave.csv", g.csv());
    const Verdict v = g.verdict == wave::GevreyVerdict::Pass   ? Verdict::Pass
                      : g.verdict == wave::GevreyVerdict::Fail ? Verdict::Fail
                                                               : Verdict::Inconclusive;
    rows.push_back({"Gevrey C_meas", "exp(B L^{1/(2s)}) estimate, B = A - K T", g.C_meas, 1e6, v, g.note});
    extra["gevrey"] = g.summary();
  }
  return finish(ctx, "wave", rows, extra);
}

// ---- gevrey ------------------------------------------------------------------

struct GevreyArgs {
  std::string field_path;
  int lmax2 = 12;
  double weight = 1.0;
  std::optional<int> single;
  unsigned seed = 7;
  std::string D = "1";
  std::string s = "1,1.5,2";
  int k_max = 20;
};

int run_gevrey(const GevreyArgs& a, const Context& ctx) {
  const auto Ds = parse_list(a.D, "--D");
  const auto ss = parse_list(a.s, "--s");
  const SpectralField f = validated([&]() -> SpectralField {
    if (a.k_max < 0 || a.k_max > 64) throw PreconditionError("--k-max must lie in [0, 64]");
    for (double d : Ds)
      if (!(d > 0.0)) throw PreconditionError("--D entries must be positive");
    for (double s : ss)
      if (!(s >= 1.0)) throw PreconditionError("--s entries must be >= 1");
    if (!a.field_path.empty()) return io::load_field(a.field_path);
    if (a.single) {
      if (*a.single < 0) throw PreconditionError("--single must be >= 0");
      su2::SpectralFieldSU2 g;
      g.lmax = {*a.single};
      g.coeffs[*a.single] = CMatrix::Identity(*a.single + 1, *a.single + 1);
      return g;
    }
    if (a.lmax2 < 0) throw PreconditionError("--lmax2 must be >= 0");
    return wave::weighted_su2_field(a.lmax2, a.weight, a.seed);
  });
  const auto rep = gevrey::gevrey_report(f, a.k_max, Ds, ss);
  ctx.write("gevrey.csv", rep.csv());
  std::vector<CheckRow> rows;
  for (const auto& [key, fc] : rep.forward) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fc.margin.size(); ++i)
      worst = std::min(worst, fc.bound[i] > 0.0 ? fc.margin[i] / fc.bound[i] : fc.margin[i]);
    rows.push_back({"forward D=" + format_double(key.first) + " s=" + format_double(key.second),
                    "||L^k f|| <= M A^{2k} ((2k)!)^s", worst, 0.0, verdict(fc.pass),
                    "measured is the smallest relative margin"});
  }
  return finish(ctx, "gevrey", rows, rep.to_json());
}

// ---- bessel ------------------------------------------------------------------

struct BesselArgs {
  double s = 1.0;
  double lmax = 200.0;
  std::string symbol = "sub";
};

int run_bessel(const BesselArgs& a, const Context& ctx) {
  const auto [lmax, sym] = validated([&] {
    if (!(a.s > 0.0)) throw PreconditionError("--s must be positive");
    if (a.symbol != "sub" && a.symbol != "full") throw PreconditionError("--symbol must be sub or full");
    const auto l = su2::HalfInt::from_double(a.lmax);
    if (l.twice < 2) throw PreconditionError("--lmax must be >= 1");
    return std::pair{l, a.symbol == "sub" ? su2::SymbolChoice::SubLaplacian : su2::SymbolChoice::Laplacian};
  });
  // Doubling ladder ending at lmax.
  std::vector<int> ladder;
  for (int t = lmax.twice;; t /= 2) {
    ladder.push_back(t);
    if (t % 2 != 0 || t < 4) break;
  }
  std::reverse(ladder.begin(), ladder.end());
  CsvTable csv{{"lmax", "partial_sum", "increment", "increment_ratio"}, {}};
  std::vector<double> sums, incs;
  for (int t : ladder) {
    sums.push_back(su2::bessel_partial_sum(a.s, su2::HalfInt{t}, sym));
    const double inc = sums.size() > 1 ? sums.back() - sums[sums.size() - 2] : 0.0;
    const double ratio = incs.size() >= 1 && incs.back() > 0.0 ? inc / incs.back() : 0.0;
    if (sums.size() > 1) incs.push_back(inc);
    csv.add_row({format_double(t / 2.0), format_double(sums.back()), format_double(inc), format_double(ratio)});
  }
  ctx.write("bessel.csv", csv.str());
  double last_ratio = 0.0;
  if (incs.size() >= 2 && incs[incs.size() - 2] > 0.0) last_ratio = incs.back() / incs[incs.size() - 2];
  const bool convergent = incs.size() >= 2 && last_ratio <= 2.0 / 3.0;
  std::vector<CheckRow> rows{{"Bessel partial sums", "increment ratio per doubling", last_ratio, 2.0 / 3.0,
                              Verdict::Info, convergent ? "convergent" : "divergent"}};
  json extra = {{"s", a.s}, {"lmax", lmax.value()}, {"symbol", a.symbol},
                {"classification", convergent ? "convergent" : "divergent"},
                {"final_partial_sum", sums.back()}};
  return finish(ctx, "bessel", rows, extra);
}

// ---- config ------------------------------------------------------------------

const std::vector<std::string> kSubcommands{"ode-energy", "su2-riesz", "heis-riesz", "wave", "gevrey", "bessel"};

// Splices --config FILE into flags placed right after the subcommand, so explicit
// flags given later on the command line override file values.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageFailure("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::ifstream in(path);
  if (!in) throw UsageFailure("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageFailure("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageFailure("config " + path + ": expected an object");

  auto sub_it = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  std::string sub;
  if (j.contains("command")) {
    if (!j["command"].is_string()) throw UsageFailure("config: command must be a string");
    sub = j["command"].get<std::string>();
  }
  std::vector<std::string> flags;
  for (const auto& [key, val] : j.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    if (val.is_boolean()) {
      if (val.get<bool>()) flags.push_back(flag);
    } else if (val.is_number()) {
      flags.push_back(flag);
      flags.push_back(val.is_number_integer() ? std::to_string(val.get<long long>())
                                              : format_double(val.get<double>()));
    } else if (val.is_string()) {
      flags.push_back(flag);
      flags.push_back(val.get<std::string>());
    } else if (val.is_array()) {
      std::vector<double> xs;
      for (const auto& x : val) {
        if (!x.is_number()) throw UsageFailure("config: " + key + " must hold numbers");
        xs.push_back(x.get<double>());
      }
      flags.push_back(flag);
      flags.push_back(join(xs));
    } else {
      throw UsageFailure("config: unsupported value for " + key);
    }
  }
  if (sub_it == rest.end()) {
    if (sub.empty()) throw UsageFailure("config names no command and none was given");
    rest.insert(rest.begin(), sub);
    sub_it = rest.begin();
  } else if (!sub.empty() && sub != *sub_it) {
    throw UsageFailure("config command '" + sub + "' conflicts with '" + *sub_it + "'");
  }
  rest.insert(sub_it + 1, flags.begin(), flags.end());
  return rest;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const UsageFailure& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Weakly hyperbolic wave equations on SU(2) and the Heisenberg group"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Directory for artifacts");

  OdeArgs ode;
  auto* c_ode = app.add_subcommand("ode-energy", "Mode energy envelopes on a beta grid");
  c_ode->add_option("--case", ode.case_tag)->required();
  c_ode->add_option("--speed", ode.speed, "e.g. const:1, sin:2,1,4, holder:0.5,0.5")->required();
  c_ode->add_option("--beta-grid", ode.beta_grid);
  c_ode->add_option("--T", ode.T);
  c_ode->add_option("--s", ode.s);
  c_ode->add_option("--rel-tol", ode.rel_tol);
  c_ode->add_flag("--check-w", ode.check_w, "Also check the transformed energy is nonincreasing");
  c_ode->add_option("--trajectory-beta", ode.trajectory_beta, "Export one trajectory as .dat");

  Su2Args su2a;
  auto* c_su2 = app.add_subcommand("su2-riesz", "Riesz symbol norms over l on SU(2)");
  c_su2->add_option("--word", su2a.words, "Comma-separated words over {X, Y}");
  c_su2->add_option("--lmax", su2a.lmax);
  c_su2->add_option("--lmin", su2a.lmin);
  c_su2->add_option("--bound", su2a.bound, "Default 2^|word|");

  HeisArgs heisa;
  auto* c_heis = app.add_subcommand("heis-riesz", "Riesz symbols across lambda on the Heisenberg group");
  c_heis->add_option("--word", heisa.words, "Comma-separated words over {Z, B}, B = Zbar");
  c_heis->add_option("--lambdas", heisa.lambdas);
  c_heis->add_option("--N", heisa.N);
  c_heis->add_option("--tol", heisa.tol);

  WaveArgs wa;
  auto* c_wave = app.add_subcommand("wave", "Cauchy problem solve and well-posedness check");
  c_wave->add_option("--group", wa.group);
  c_wave->add_option("--speed", wa.speed);
  c_wave->add_option("--T", wa.T);
  c_wave->add_option("--mode", wa.mode, "sobolev or gevrey");
  c_wave->add_option("--s", wa.s);
  c_wave->add_option("--case", wa.case_tag);
  c_wave->add_option("--A", wa.A);
  c_wave->add_option("--beta-grid", wa.beta_grid);
  c_wave->add_option("--u0", wa.u0_path);
  c_wave->add_option("--u1", wa.u1_path);
  c_wave->add_option("--lmax2", wa.lmax2);
  c_wave->add_option("--N", wa.N);
  c_wave->add_option("--lambdas", wa.lambdas);
  c_wave->add_option("--weight", wa.weight);
  c_wave->add_option("--seed", wa.seed);
  c_wave->add_option("--n-samples", wa.n_samples);
  c_wave->add_option("--rel-tol", wa.rel_tol);
  c_wave->add_option("--save-solution", wa.save_solution, "Write u(T) as field JSON");

  GevreyArgs ga;
  auto* c_gev = app.add_subcommand("gevrey", "Forward Gevrey constants and order fit");
  c_gev->add_option("--field", ga.field_path);
  c_gev->add_option("--lmax2", ga.lmax2);
  c_gev->add_option("--weight", ga.weight);
  c_gev->add_option("--single", ga.single, "Identity block at this 2l only");
  c_gev->add_option("--seed", ga.seed);
  c_gev->add_option("--D", ga.D);
  c_gev->add_option("--s", ga.s);
  c_gev->add_option("--k-max", ga.k_max);

  BesselArgs ba;
  auto* c_bes = app.add_subcommand("bessel", "Bessel-potential trace partial sums on SU(2)");
  c_bes->add_option("--s", ba.s);
  c_bes->add_option("--lmax", ba.lmax);
  c_bes->add_option("--symbol", ba.symbol, "sub or full");

  // Lets --out follow the subcommand.
  for (auto* c : {c_ode, c_su2, c_heis, c_wave, c_gev, c_bes}) c->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const Context ctx{out_dir, out};
    if (c_ode->parsed()) return run_ode(ode, ctx);
    if (c_su2->parsed()) return run_su2(su2a, ctx);
    if (c_heis->parsed()) return run_heis(heisa, ctx);
    if (c_wave->parsed()) return run_wave(wa, ctx);
    if (c_gev->parsed()) return run_gevrey(ga, ctx);
    if (c_bes->parsed()) return run_bessel(ba, ctx);
  } catch (const UsageFailure& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kViolated;
  }
  return kUsage;
}

}  // namespace hypowave::cli
