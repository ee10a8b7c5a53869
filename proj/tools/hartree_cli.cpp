#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hartree/bubble.hpp"
#include "hartree/multibubble.hpp"
#include "hartree/nondegeneracy.hpp"
#include "hartree/params_special.hpp"
#include "hartree/pohozaev.hpp"
#include "hartree/quadrature.hpp"
#include "hartree/reduced_energy.hpp"

using json = nlohmann::ordered_json;
using namespace hartree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInput = 2;

// Below this the float path cannot resolve |mu_k - 1|.
constexpr double kSpectrumTolFloor = 1e-13;

struct InputError : std::runtime_error {
  std::string pointer;
  InputError(std::string ptr, const std::string& what) : std::runtime_error(what), pointer(std::move(ptr)) {}
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format;  // empty: per-command default
  std::optional<double> tol;
};

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(fmt_double(v));
    row_strings(s);
  }
  std::string str() const { return os_.str(); }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  std::ostringstream os_;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw InputError("/out", "cannot open output file " + g.out);
  f << text;
}

void emit(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

bool want_csv(const Globals& g, bool csv_default) {
  if (g.format.empty()) return csv_default;
  return g.format == "csv";
}

SystemParams make_params(int N, double alpha) {
  auto rep = check_admissible(N, alpha);
  if (!rep.admissible) {
    std::string msg = "inadmissible (N, alpha):";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw InputError("/alpha", msg);
  }
  return SystemParams(N, alpha);
}

json vec_json(const Vec& v) { return json(v); }

// ---- reduced_energy config ---------------------------------------------------------

struct RunConfig {
  int N = 5;
  double alpha = 1.0;
  PotentialPair pot;
  std::optional<double> L0, L1;
};

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError("/" + key, "missing required field");
  return j.at(key);
}

double get_number(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw InputError("/" + key, "expected a number");
  return v.get<double>();
}

std::optional<double> get_optional_number(const json& j, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j.at(key).is_number()) throw InputError("/" + key, "expected a number");
  return j.at(key).get<double>();
}

Vec get_vector(const json& j, const std::string& key, std::size_t n, bool required = true) {
  if (!j.contains(key)) {
    if (required) throw InputError("/" + key, "missing required field");
    return {};
  }
  const json& v = j.at(key);
  if (!v.is_array()) throw InputError("/" + key, "expected an array");
  if (v.size() != n)
    throw InputError("/" + key, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  Vec out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_number()) throw InputError("/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& key, int n) {
  const json& v = require(j, key);
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw InputError("/" + key, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  Eigen::MatrixXd M(n, n);
  for (int r = 0; r < n; ++r) {
    std::string ptr = "/" + key + "/" + std::to_string(r);
    if (!v[r].is_array() || static_cast<int>(v[r].size()) != n)
      throw InputError(ptr, "expected a row of " + std::to_string(n) + " numbers");
    for (int c = 0; c < n; ++c) {
      if (!v[r][c].is_number()) throw InputError(ptr + "/" + std::to_string(c), "expected a number");
      M(r, c) = v[r][c].get<double>();
    }
  }
  if (!M.isApprox(M.transpose(), 1e-12)) throw InputError("/" + key, "matrix must be symmetric");
  return M;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("", "config must be a JSON object");
  RunConfig cfg;
  const json& Nj = require(j, "N");
  if (!Nj.is_number_integer()) throw InputError("/N", "expected an integer");
  cfg.N = Nj.get<int>();
  cfg.alpha = get_number(j, "alpha");
  if (!check_admissible(cfg.N, cfg.alpha).admissible) throw InputError("/alpha", "inadmissible (N, alpha)");
  int n = cfg.N - 1;
  double r0 = get_number(j, "r0");
  if (!(r0 > 0.0)) throw InputError("/r0", "r0 must be positive");
  Vec x0pp = get_vector(j, "x0pp", cfg.N - 2);
  double delta = get_number(j, "delta");
  if (!(delta > 0.0 && delta < r0 / 2.0)) throw InputError("/delta", "delta must lie in (0, r0/2)");
  cfg.pot = PotentialPair::quadratic(cfg.N, r0, x0pp, delta, get_matrix(j, "q1", n), get_matrix(j, "q2", n));
  cfg.pot.quartic1 = get_optional_number(j, "quartic1").value_or(0.0);
  cfg.pot.quartic2 = get_optional_number(j, "quartic2").value_or(0.0);
  Vec g1 = get_vector(j, "linear1", n, false), g2 = get_vector(j, "linear2", n, false);
  if (!g1.empty()) cfg.pot.linear1 = Eigen::Map<Eigen::VectorXd>(g1.data(), n);
  if (!g2.empty()) cfg.pot.linear2 = Eigen::Map<Eigen::VectorXd>(g2.data(), n);
  cfg.L0 = get_optional_number(j, "L0");
  cfg.L1 = get_optional_number(j, "L1");
  if (cfg.L0 && !(*cfg.L0 > 0.0)) throw InputError("/L0", "L0 must be positive");
  if (cfg.L0 && cfg.L1 && !(*cfg.L1 > *cfg.L0)) throw InputError("/L1", "L1 must exceed L0");
  return cfg;
}

json record_json(const ConstantRecord& r) { return {{"value", r.value}, {"provenance", r.provenance}}; }

ReducedEnergyModel model_from(const RunConfig& cfg, const std::string& b4_mode, std::uint64_t seed) {
  SystemParams p(cfg.N, cfg.alpha);
  std::optional<ConstantRecord> b4;
  if (b4_mode == "fit") {
    B4Options opt;
    opt.mc.seed = seed;
    b4 = ConstantRecord{constant_B4(p, opt).value, "quadrature-fit"};
  }
  ReducedEnergyModel model = build_model(p, cfg.pot, b4);
  if (cfg.L0) model.L0 = *cfg.L0;
  if (cfg.L1) model.L1 = *cfg.L1;
  return model;
}

// ---- subcommands -------------------------------------------------------------------

int cmd_constants(const Globals& g, int N, double alpha, int kmax) {
  SystemParams p = make_params(N, alpha);
  const auto& c = p.constants();
  json j;
  j["N"] = N;
  j["alpha"] = alpha;
  j["two_star"] = p.two_star();
  j["mu"] = p.mu();
  j["C_N_alpha"] = c.C_N_alpha;
  j["I_kernel"] = c.I_kernel;
  j["A1"] = c.A1;
  j["A2"] = c.A2;
  j["mu0"] = mu0_closed_form(p);
  json lk = json::array(), lka = json::array();
  for (int k = 0; k <= kmax; ++k) {
    lk.push_back(funk_hecke_eigenvalue(N, N - 2.0, k));
    lka.push_back(funk_hecke_eigenvalue(N, p.mu(), k));
  }
  j["lambda_k"] = lk;
  j["lambda_k_N_minus_alpha"] = lka;
  emit(g, j);
  return kExitOk;
}

int cmd_spectrum(const Globals& g, int N, double alpha, int kmax) {
  SystemParams p = make_params(N, alpha);
  double tol = g.tol.value_or(1e-9);
  if (!(tol > 0.0)) throw InputError("/tol", "tolerance must be positive");
  SpectralReport rep = nondegeneracy_report(p, kmax, tol);
  bool below_floor = tol < kSpectrumTolFloor;
  if (want_csv(g, false)) {
    Csv csv({"k", "lambda_k_N_minus_2", "lambda_k_N_minus_alpha", "mu_k"});
    for (const auto& r : rep.rows) csv.row({double(r.k), r.lambda_k_N2, r.lambda_k_Nalpha, r.mu_k});
    emit(g, csv.str());
  } else {
    json j;
    j["N"] = N;
    j["alpha"] = alpha;
    j["tol"] = tol;
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"k", r.k},
                      {"lambda_k_N_minus_2", r.lambda_k_N2},
                      {"lambda_k_N_minus_alpha", r.lambda_k_Nalpha},
                      {"mu_k", r.mu_k},
                      {"crosses_one", r.crosses_one}});
    j["rows"] = rows;
    j["verdict"] = {{"nondegenerate", rep.verdict.nondegenerate && !below_floor},
                    {"anomaly_k", rep.verdict.anomaly_k}};
    if (below_floor) j["note"] = "tolerance below numeric floor";
    emit(g, j);
  }
  if (below_floor) {
    std::cerr << "tolerance below numeric floor (" << kSpectrumTolFloor << ")\n";
    return kExitTolerance;
  }
  return rep.verdict.nondegenerate ? kExitOk : kExitTolerance;
}

int cmd_oracle(const Globals& g, int N, std::optional<double> t_opt, int kmax, int nodes,
               const std::string& rule) {
  if (N < 2) throw InputError("/N", "N must be at least 2");
  double t = t_opt.value_or(N - 2.0);
  if (!(t > 0.0 && t < N)) throw InputError("/t", "t must lie in (0, N)");
  double threshold = g.tol.value_or(1e-8);
  QuadratureSpec spec = rule == "legendre" ? QuadratureSpec::legendre(nodes) : funk_hecke_spec(N, t, nodes);
  bool ok = true;
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= kmax; ++k) {
    double closed = funk_hecke_eigenvalue(N, t, k);
    double oracle = funk_hecke_oracle(N, t, k, spec);
    double rel = std::abs(oracle - closed) / std::abs(closed);
    if (!(rel <= threshold)) ok = false;
    rows.push_back({double(k), closed, oracle, rel});
  }
  if (want_csv(g, true)) {
    Csv csv({"k", "closed_form", "oracle", "rel_err"});
    for (const auto& r : rows) csv.row(r);
    emit(g, csv.str());
  } else {
    json j = {{"N", N}, {"t", t}, {"threshold", threshold}, {"pass", ok}};
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"k", int(r[0])}, {"closed_form", r[1]}, {"oracle", r[2]}, {"rel_err", r[3]}});
    j["rows"] = arr;
    emit(g, j);
  }
  return ok ? kExitOk : kExitTolerance;
}

std::vector<Vec> random_points(int N, int count, double radius, std::uint64_t seed) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    Vec x(N);
    rng.unit_vector(N, x.data());
    double r = radius * std::pow(rng.uniform(), 1.0 / N);
    for (auto& xi : x) xi *= r;
    pts.push_back(x);
  }
  return pts;
}

int cmd_bubble(const Globals& g, const std::string& action, int N, double alpha, double lambda,
               int points, double radius) {
  SystemParams p = make_params(N, alpha);
  if (!(lambda > 0.0)) throw InputError("/lambda", "lambda must be positive");
  Bubble b(p, Vec(N, 0.0), lambda);
  if (action == "eval") {
    std::vector<std::string> header;
    for (int i = 1; i <= N; ++i) header.push_back("x" + std::to_string(i));
    header.push_back("value");
    Csv csv(header);
    for (const auto& x : random_points(N, points, radius, g.seed)) {
      Vec row = x;
      row.push_back(b.value(x.data()));
      csv.row(row);
    }
    emit(g, csv.str());
    return kExitOk;
  }
  if (action == "residual") {
    double tol = g.tol.value_or(1e-9);
    ConstantPotential one(1.0);
    BubblePair pair(b);
    double worst = 0.0;
    for (const auto& x : random_points(N, points, radius, g.seed)) {
      PdeResidual r = pde_residual(pair, x, one, one);
      worst = std::max({worst, std::abs(r.res_u) / r.scale_u, std::abs(r.res_v) / r.scale_v});
    }
    bool ok = worst <= tol;
    emit(g, json{{"N", N}, {"alpha", alpha}, {"lambda", lambda}, {"points", points},
                 {"max_relative_residual", worst}, {"tol", tol}, {"pass", ok}});
    return ok ? kExitOk : kExitTolerance;
  }
  // conv-check: radial quadrature of |.|^(-mu) * U^2* against the closed form.
  double tol = g.tol.value_or(1e-6);
  double mu = p.mu(), ts = p.two_star();
  Bubble unit = Bubble::unit(p);
  auto profile = [&](double s) { return std::pow(unit.radial_value(s), ts); };
  double worst = 0.0;
  json rows = json::array();
  for (int i = 0; i < points; ++i) {
    double r = radius * i / std::max(points - 1, 1);
    double quad = radial_convolution(mu, profile, r, N);
    Vec x(N, 0.0);
    x[0] = r;
    double closed = riesz_convolution_bubble(mu, unit, x);
    double rel = std::abs(quad - closed) / std::abs(closed);
    worst = std::max(worst, rel);
    rows.push_back({{"r", r}, {"quadrature", quad}, {"closed_form", closed}, {"rel_err", rel}});
  }
  bool ok = worst <= tol;
  emit(g, json{{"N", N}, {"alpha", alpha}, {"constant", conv_constant(mu, p)}, {"rows", rows},
               {"max_rel_err", worst}, {"tol", tol}, {"pass", ok}});
  return ok ? kExitOk : kExitTolerance;
}

PolygonConfig polygon_from(const SystemParams& p, int m, double rbar, Vec xbar, double lambda) {
  if (xbar.empty()) xbar.assign(p.N() - 2, 0.0);
  if (static_cast<int>(xbar.size()) != p.N() - 2) throw InputError("/xbar", "xbar needs N - 2 entries");
  PolygonConfig cfg(p, m, rbar, xbar, lambda);
  cfg.validate();
  return cfg;
}

int cmd_ansatz(const Globals& g, int N, double alpha, int m, double rbar, const Vec& xbar,
               double lambda, double delta, int fill) {
  SystemParams p = make_params(N, alpha);
  PolygonConfig cfg = polygon_from(p, m, rbar, xbar, lambda);
  CutoffSpec cut{rbar, cfg.x_bar_pp, delta};
  auto pts = structured_sample_set(cfg, cut, fill, g.seed);
  std::vector<std::string> header;
  for (int i = 1; i <= N; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"xi", "Z_star", "Z"});
  Csv csv(header);
  for (const auto& x : pts) {
    Vec row = x;
    row.push_back(cutoff_eval(cut, x));
    row.push_back(ansatz_eval(cfg, cut, AnsatzField::Z_star, x));
    row.push_back(ansatz_eval(cfg, cut, AnsatzField::Z, x));
    csv.row(row);
  }
  emit(g, csv.str());
  return kExitOk;
}

json estimate_json(const EstimateResult& r) {
  json j = {{"max_ratio", r.max_ratio}, {"samples", r.samples.size()}};
  if (r.predicted_exponent != 0.0) {
    j["decay_exponent"] = r.decay_exponent;
    j["predicted_exponent"] = r.predicted_exponent;
  }
  return j;
}

int cmd_probe(const Globals& g, const std::string& which, const EstimateInputs& in, std::size_t samples,
              double alpha, int m, double lambda, double delta, int fill) {
  if (which == "lm") {
    SystemParams p = make_params(in.N, alpha);
    PolygonConfig cfg = polygon_from(p, m, 1.0, {}, lambda);
    CutoffSpec cut{1.0, cfg.x_bar_pp, delta};
    WeightedNormSpec ns;
    ns.sample_set = structured_sample_set(cfg, cut, fill, g.seed);
    ConstantPotential one(1.0);
    MonteCarloSpec mc{samples, g.seed, 0};
    LmProbeResult r = residual_lm_probe(cfg, cut, one, one, ns, mc);
    emit(g, json{{"N", in.N}, {"alpha", alpha}, {"m", m}, {"lambda", lambda}, {"delta", delta},
                 {"norm_estimate", r.norm_estimate}, {"std_error", r.std_error},
                 {"points", r.per_point.size()}, {"flagged", r.flagged}, {"note", r.note}});
    return r.flagged ? kExitTolerance : kExitOk;
  }
  EstimateKind kind = which == "b2" ? EstimateKind::B2 : which == "b3" ? EstimateKind::B3 : EstimateKind::B4;
  EstimateResult r = estimate_probe(kind, in, samples, g.seed);
  json j = estimate_json(r);
  j["probe"] = which;
  emit(g, j);
  return std::isfinite(r.max_ratio) ? kExitOk : kExitTolerance;
}

json solution_json(const BalanceSolution& s, const ReducedEnergyModel& model, int m) {
  json j;
  j["success"] = s.success;
  j["t_star"] = s.t_star;
  j["lambda_star"] = s.t_star * std::pow(double(m), lambda_window_exponent(model.params.N()));
  j["r_star"] = s.r_star;
  j["x_star_pp"] = vec_json(s.x_star_pp);
  j["residual_norm"] = s.residual_norm;
  j["iterations"] = s.iterations;
  j["used_bisection"] = s.used_bisection;
  j["diagnostic"] = s.diagnostic;
  j["constants"] = {{"B1", record_json(model.B1)}, {"B2", record_json(model.B2)},
                    {"B3", record_json(model.B3)}, {"B4", record_json(model.B4)},
                    {"B5", record_json(model.B5)}};
  j["B_dilation"] = model.B_dilation();
  j["B_interaction"] = model.B_interaction(m);
  j["L0"] = model.L0;
  j["L1"] = model.L1;
  return j;
}

int cmd_reduced_solve(const Globals& g, const std::string& config, int m, const std::string& b4) {
  if (m < 2) throw InputError("/m", "m must be at least 2");
  RunConfig cfg = load_config(config);
  PotentialReport rep = potential_checks(cfg.pot);
  ReducedEnergyModel model = model_from(cfg, b4, g.seed);
  SolverOptions opt;
  if (g.tol) opt.tol = *g.tol;
  BalanceSolution s = solve_reduced_system(model, m, opt);
  json j = solution_json(s, model, m);
  j["m"] = m;
  j["potential_diagnostics"] = rep.diagnostics;
  j["degree_proxy"] = rep.degree_proxy;
  emit(g, j);
  return s.success ? kExitOk : kExitTolerance;
}

int cmd_landscape(const Globals& g, const std::string& config, int m, const std::vector<double>& range,
                  int points) {
  if (m < 2) throw InputError("/m", "m must be at least 2");
  if (range.size() != 2 || !(range[0] > 0.0 && range[1] > range[0]))
    throw InputError("/t-range", "expected lo,hi with 0 < lo < hi");
  RunConfig cfg = load_config(config);
  ReducedEnergyModel model = model_from(cfg, "asymptotic", g.seed);
  Csv csv({"t", "balance"});
  for (const auto& r : landscape(model, m, range[0], range[1], points)) csv.row({r.t, r.balance});
  emit(g, csv.str());
  return kExitOk;
}

json pohozaev_json(const PohozaevResult& r) {
  return {{"value", r.value}, {"std_error", r.std_error}, {"samples", r.samples},
          {"abs_scale", r.abs_scale}, {"consistent_with_zero", consistent_with_zero(r)}};
}

int cmd_pohozaev(const Globals& g, const std::string& which, const std::string& config, int N, double alpha,
                 double lambda, int i, std::size_t samples, bool flat) {
  MonteCarloSpec mc{samples, g.seed, 0};
  if (which == "d12") {
    SystemParams p = make_params(N, alpha);
    Vec c(N, 0.0);
    c[0] = 1.0;
    RadialBump u{c, 1.0, 0.15}, v{c, 0.8, 0.12};
    PohozaevDomain dom{1.0, Vec(N - 2, 0.0), 0.35};
    D12Check chk = identity_check_d12(u, v, 1.0, 1.0, dom, p, g.tol.value_or(1e-10));
    double rel = std::abs(chk.lhs - chk.rhs) / std::max(std::abs(chk.lhs), 1e-300);
    bool ok = rel <= 1e-4;
    emit(g, json{{"lhs", chk.lhs}, {"rhs", chk.rhs}, {"rel_gap", rel},
                 {"blocks", {{"gradient", chk.blocks.gradient}, {"convolution", chk.blocks.convolution},
                             {"k_derivative", chk.blocks.k_derivative}}},
                 {"pass", ok}});
    return ok ? kExitOk : kExitTolerance;
  }
  std::optional<RunConfig> cfg;
  if (!config.empty()) {
    cfg = load_config(config);
    N = cfg->N;
    alpha = cfg->alpha;
  }
  SystemParams p = make_params(N, alpha);
  double r0 = cfg ? cfg->pot.r0 : 1.0;
  Vec x0pp = cfg ? cfg->pot.x0pp : Vec(N - 2, 0.0);
  double delta = cfg ? cfg->pot.delta : 0.1;
  Vec z(N, 0.0);
  z[0] = r0;
  for (int k = 2; k < N; ++k) z[k] = x0pp[k - 2];
  ConstantPotential one(1.0);
  std::optional<AxialPolynomialPotential> k1, k2;
  if (cfg && !flat) {
    k1.emplace(cfg->pot.K1());
    k2.emplace(cfg->pot.K2());
  }
  const Potential& K1 = k1 ? static_cast<const Potential&>(*k1) : one;
  const Potential& K2 = k2 ? static_cast<const Potential&>(*k2) : one;
  Bubble b(p, z, lambda);
  PohozaevField u = bubble_field(b, K2), v = bubble_field(b, K1);
  PohozaevDomain dom = PohozaevDomain::around(CutoffSpec{r0, x0pp, delta});
  PohozaevResult r;
  if (which == "d1") {
    r = pohozaev_dilation_residual(u, v, K1, K2, dom, mc);
  } else if (which == "d2") {
    if (i < 3 || i > N) throw InputError("/i", "coordinate index must lie in 3..N");
    r = pohozaev_translation_residual(u, v, K1, K2, dom, i, mc);
  } else {
    PolygonConfig pc(p, 1, r0, x0pp, lambda);
    PohozaevField zu = ansatz_field(pc, std::nullopt, K2), zv = ansatz_field(pc, std::nullopt, K1);
    r = pohozaev_scaling_residual(zu, zv, pc, std::nullopt, K1, K2, mc);
  }
  json j = pohozaev_json(r);
  j["which"] = which;
  j["rho"] = dom.rho;
  emit(g, j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for critical Hartree systems with bubble solutions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Monte Carlo seed");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", g.tol, "Tolerance for the command's pass/fail gate");

  int N = 5, kmax = 50, m = 16, points = 20, nodes = 64, fill = 64, idx = 3;
  double alpha = 1.0, lambda = 1.0, radius = 10.0, rbar = 1.0, delta = 0.1;
  std::size_t samples = 20000;
  std::optional<double> t_opt;
  std::string rule = "jacobi", config, b4_mode = "asymptotic", which = "d1";
  std::vector<double> xbar, t_range{0.25, 4.0};
  bool flat = false;
  EstimateInputs est;
  std::function<int()> action;

  auto add_params = [&](CLI::App* c) {
    c->add_option("--N", N, "Dimension");
    c->add_option("--alpha", alpha, "Riesz order alpha");
  };

  auto* constants = app.add_subcommand("constants", "Derived constants and Funk-Hecke eigenvalues");
  add_params(constants);
  int kconst = 10;
  constants->add_option("--kmax", kconst);
  constants->callback([&] { action = [&] { return cmd_constants(g, N, alpha, kconst); }; });

  auto* spectrum = app.add_subcommand("spectrum", "Nondegeneracy spectrum report");
  add_params(spectrum);
  spectrum->add_option("--kmax", kmax);
  spectrum->callback([&] { action = [&] { return cmd_spectrum(g, N, alpha, kmax); }; });

  auto* oracle = app.add_subcommand("oracle", "Funk-Hecke closed form against zonal quadrature");
  oracle->add_option("--N", N);
  oracle->add_option("--t", t_opt, "Kernel exponent, default N - 2");
  int kor = 10;
  oracle->add_option("--kmax", kor);
  oracle->add_option("--nodes", nodes);
  oracle->add_option("--rule", rule)->check(CLI::IsMember({"jacobi", "legendre"}));
  oracle->callback([&] {
    if (oracle->count("--N") == 0) N = 6;
    action = [&] { return cmd_oracle(g, N, t_opt, kor, nodes, rule); };
  });

  auto* bubble = app.add_subcommand("bubble", "Single bubble evaluation and certificates");
  bubble->require_subcommand(1);
  for (std::string name : {"eval", "residual", "conv-check"}) {
    auto* sc = bubble->add_subcommand(name);
    add_params(sc);
    sc->add_option("--lambda", lambda);
    sc->add_option("--points", points);
    sc->add_option("--radius", radius);
    sc->callback([&, name] { action = [&, name] { return cmd_bubble(g, name, N, alpha, lambda, points, radius); }; });
  }

  auto* ansatz = app.add_subcommand("ansatz", "Dump the polygon ansatz on the structured sample set (CSV)");
  add_params(ansatz);
  ansatz->add_option("--m", m);
  ansatz->add_option("--rbar", rbar);
  ansatz->add_option("--xbar", xbar)->delimiter(',');
  ansatz->add_option("--lambda", lambda);
  ansatz->add_option("--delta", delta);
  ansatz->add_option("--fill", fill);
  ansatz->callback([&] { action = [&] { return cmd_ansatz(g, N, alpha, m, rbar, xbar, lambda, delta, fill); }; });

  auto* probes = app.add_subcommand("probes", "Interaction estimates and the l_m residual probe");
  probes->require_subcommand(1);
  for (std::string name : {"b2", "b3", "b4", "lm"}) {
    auto* sc = probes->add_subcommand(name);
    sc->add_option("--samples", samples);
    if (name == "b2") {
      sc->add_option("--a", est.a);
      sc->add_option("--b", est.b);
      sc->add_option("--delta", est.delta);
      sc->add_option("--separation", est.separation);
    } else if (name == "b3") {
      sc->add_option("--N", est.N);
      sc->add_option("--delta", est.delta);
    } else if (name == "b4") {
      sc->add_option("--N", est.N);
      sc->add_option("--eta", est.eta);
      sc->add_option("--mu", est.mu);
      sc->add_option("--r-max", est.r_max);
    } else {
      sc->add_option("--N", est.N);
      sc->add_option("--alpha", alpha);
      sc->add_option("--m", m);
      sc->add_option("--lambda", lambda);
      sc->add_option("--delta", delta);
      sc->add_option("--fill", fill);
    }
    sc->callback([&, name, sc] {
      // b3 and b4 evaluate one quadrature per grid radius.
      if ((name == "b3" || name == "b4") && sc->count("--samples") == 0) samples = 128;
      if (name == "lm" && sc->count("--m") == 0) m = 4;
      if (name == "lm" && sc->count("--lambda") == 0) lambda = 64.0;
      if (name == "lm" && sc->count("--delta") == 0) delta = 0.2;
      action = [&, name] { return cmd_probe(g, name, est, samples, alpha, m, lambda, delta, fill); };
    });
  }

  auto* solve = app.add_subcommand("reduced-solve", "Solve the reduced balance system");
  solve->add_option("--m", m);
  solve->add_option("--config", config, "Potential config (JSON)")->required();
  solve->add_option("--b4", b4_mode)->check(CLI::IsMember({"asymptotic", "fit"}));
  solve->callback([&] { action = [&] { return cmd_reduced_solve(g, config, m, b4_mode); }; });

  auto* land = app.add_subcommand("landscape", "Balance function over t (CSV)");
  land->add_option("--m", m);
  land->add_option("--config", config)->required();
  land->add_option("--t-range", t_range)->delimiter(',')->expected(2);
  land->add_option("--points", points);
  land->callback([&] { action = [&] { return cmd_landscape(g, config, m, t_range, points); }; });

  auto* poh = app.add_subcommand("pohozaev", "Local Pohozaev residuals");
  poh->add_option("--which", which)->check(CLI::IsMember({"d1", "d2", "d3", "d12"}));
  poh->add_option("--config", config);
  add_params(poh);
  poh->add_option("--lambda", lambda);
  poh->add_option("--i", idx, "Coordinate index for d2, in 3..N");
  poh->add_option("--samples", samples);
  poh->add_flag("--flat", flat, "Use K = 1 even when a config is given");
  poh->callback([&] {
    if (poh->count("--lambda") == 0) lambda = 4.0;
    if (which == "d12" && poh->count("--N") == 0) N = 6;
    if (which == "d12" && poh->count("--alpha") == 0) alpha = 2.0;
    action = [&] { return cmd_pohozaev(g, which, config, N, alpha, lambda, idx, samples, flat); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    return action();
  } catch (const InputError& e) {
    json err = {{"error", e.what()}, {"pointer", e.pointer}};
    std::cerr << err.dump() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << json{{"error", e.what()}, {"pointer", ""}}.dump() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}, {"pointer", ""}}.dump() << "\n";
    return kExitInput;
  } catch (const AccuracyError& e) {
    std::cerr << json{{"error", e.what()}, {"partial", e.partial()}, {"error_estimate", e.error_estimate()}}.dump()
              << "\n";
    return kExitTolerance;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return kExitTolerance;
  }
}
