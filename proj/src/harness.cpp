#include "oplab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oplab/doi.hpp"
#include "oplab/funcalc.hpp"
#include "oplab/multiplier.hpp"
#include "oplab/parallel.hpp"
#include "oplab/semispectral.hpp"
#include "oplab/shift_trace.hpp"

namespace oplab {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string> kKnownSuites{"core",  "funcalc", "semispectral",
                                            "doi",   "shift",   "multiplier"};

}  // namespace

void SuiteConfig::validate() const {
  if (!(tol.quadrature > 0.0 && tol.residual > 0.0 && tol.fd_step > 0.0))
    throw ConfigError("all tolerances must be positive");
  if (dims.empty()) throw ConfigError("dims must be non-empty");
  for (int d : dims)
    if (d < 1) throw ConfigError("dims entries must be >= 1");
  if (n_instances < 1) throw ConfigError("n_instances must be >= 1");
  if (!(gap > 0.0)) throw ConfigError("gap must be positive");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  for (const std::string& s : suites)
    if (std::find(kKnownSuites.begin(), kKnownSuites.end(), s) ==
        kKnownSuites.end())
      throw ConfigError("unknown suite '" + s + "'");
  if (battery_kind != "default" && battery_kind != "resolvent_powers" &&
      battery_kind != "lower_poles" && battery_kind != "disk_polys" &&
      battery_kind != "mixed")
    throw ConfigError("unknown battery kind '" + battery_kind + "'");
}

SuiteConfig SuiteConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  SuiteConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(val);
    try {
      if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(val));
      else if (key == "dims") {
        cfg.dims.clear();
        for (const std::string& d : split_list(val))
          cfg.dims.push_back(std::stoi(d));
      } else if (key == "n_instances") cfg.n_instances = std::stoi(val);
      else if (key == "gap") cfg.gap = std::stod(val);
      else if (key == "battery_kind") cfg.battery_kind = val;
      else if (key == "battery_count") cfg.battery_count = std::stoi(val);
      else if (key == "tol_quad") cfg.tol.quadrature = std::stod(val);
      else if (key == "tol_res") cfg.tol.residual = std::stod(val);
      else if (key == "fd_step") cfg.tol.fd_step = std::stod(val);
      else if (key == "suites") cfg.suites = split_list(val);
      else if (key == "workers") cfg.workers = std::stoi(val);
      else if (key == "out") cfg.out_dir = val;
      else
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": cannot parse value for '" + key + "'");
    }
  }
  return cfg;
}

nlohmann::json SuiteConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["dims"] = dims;
  j["n_instances"] = n_instances;
  j["gap"] = gap;
  j["battery_kind"] = battery_kind;
  j["battery_count"] = battery_count;
  j["tol_quad"] = tol.quadrature;
  j["tol_res"] = tol.residual;
  j["fd_step"] = tol.fd_step;
  j["suites"] = suites;
  j["workers"] = workers;
  j["out"] = out_dir;
  return j;
}

void write_matrix_artifact(std::ostream& os, const std::string& label,
                           const CMat& m) {
  os << label << " " << m.rows() << " " << m.cols() << "\n";
  os << std::hexfloat;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      os << m(r, c).real() << " " << m(r, c).imag()
         << (c + 1 < m.cols() ? " " : "");
    os << "\n";
  }
  os << std::defaultfloat;
}

namespace {

std::vector<BatteryFn> config_battery(const SuiteConfig& cfg) {
  if (cfg.battery_kind == "default") return default_battery();
  BatteryKind kind = BatteryKind::mixed;
  if (cfg.battery_kind == "resolvent_powers")
    kind = BatteryKind::resolvent_powers;
  else if (cfg.battery_kind == "lower_poles")
    kind = BatteryKind::lower_poles;
  else if (cfg.battery_kind == "disk_polys")
    kind = BatteryKind::disk_polys;
  return battery(kind, cfg.battery_count > 0 ? cfg.battery_count : 8);
}

struct InstanceCtx {
  const SuiteConfig* cfg;
  std::string suite;
  unsigned seed;
  int dim;
  std::vector<CheckResult> results;

  std::string coord(const std::string& extra = "") const {
    std::string s = "seed=" + std::to_string(seed) +
                    " dim=" + std::to_string(dim);
    if (!extra.empty()) s += " " + extra;
    return s;
  }
  std::string repro() const {
    return "oplab verify --suite " + suite + " --seed " +
           std::to_string(seed) + " --dims " + std::to_string(dim) +
           " --n-instances 1";
  }
  void check(const std::string& name, double value, double tol,
             const std::string& extra = "") {
    results.push_back({suite + "/" + name, coord(extra), value, tol,
                       value <= tol, repro()});
  }
};

CVec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return v / v.norm();
}

void run_core(InstanceCtx& ctx) {
  const SuiteConfig& cfg = *ctx.cfg;
  const DissipativePair pair =
      gen_pair(ctx.seed, ctx.dim, cfg.gap, PairKind::generic);
  const DissipativePair again =
      gen_pair(ctx.seed, ctx.dim, cfg.gap, PairKind::generic);
  ctx.check("gen_pair_deterministic",
            (pair.L.mat() - again.L.mat()).norm() +
                (pair.K.mat() - again.K.mat()).norm(),
            0.0);

  const CMat t = cayley(pair.L.mat());
  ctx.check("cayley_contraction", operator_norm(t) - 1.0, 1e-12);
  ctx.check("cayley_roundtrip",
            (inverse_cayley(t) - pair.L.mat()).norm(),
            1e-9 * (1.0 + pair.L.mat().norm()));

  const int n = ctx.dim;
  const CMat id = CMat::Identity(n, n);
  std::mt19937_64 rng(ctx.seed ^ 0x9e3779b9u);
  double worst_lower = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CVec v = random_unit(rng, n);
    const double lhs = (pair.L.mat() * v + kI * v).squaredNorm();
    const double rhs = (pair.L.mat() * v).squaredNorm() + v.squaredNorm();
    worst_lower = std::max(worst_lower, rhs - lhs);
  }
  ctx.check("resolvent_lower_bound", worst_lower, 1e-9);

  double worst_res = 0.0;
  for (double kappa : {0.5, 1.0, 2.0}) {
    const CMat r = (pair.L.mat() + kI * kappa * id).partialPivLu().inverse();
    worst_res = std::max(worst_res, operator_norm(r) - 1.0 / kappa);
  }
  ctx.check("resolvent_kappa_bound", worst_res, 1e-12);

  ctx.check("domination_violation",
            domination_violation(pair.L.mat(), pair.K.mat(), pair.c, pair.d,
                                 ctx.seed, 2000, 8),
            1e-9);
  if (pair.c > 0.0 && pair.d < 0.5) {
    const double kappa = maximality_margin(pair.c, pair.d);
    const CMat kr =
        (pair.L.mat() + kI * kappa * id).partialPivLu().inverse();
    ctx.check("maximality_contraction",
              operator_norm(CMat(pair.K.mat() * kr)) - 1.0, -1e-12,
              "kappa=" + std::to_string(kappa));
  }

  const DissipativePair tc =
      gen_pair(ctx.seed, ctx.dim, cfg.gap, PairKind::trace_class_structured,
               1.0);
  ctx.check("trace_class_norm",
            std::abs(trace_norm(tc.C.mat()) - 1.0), 1e-10);

  const DissipativePair sa =
      gen_pair(ctx.seed, ctx.dim, cfg.gap, PairKind::selfadjoint_base);
  ctx.check("selfadjoint_base_dissipative",
            imaginary_part(sa.L.mat()).norm() +
                (is_dissipative(sa.L.mat(), 0.0) ? 0.0 : 1.0),
            0.0);
}

void run_funcalc(InstanceCtx& ctx) {
  const SuiteConfig& cfg = *ctx.cfg;
  const Operator l = random_dissipative(ctx.seed, ctx.dim, cfg.gap);
  const Operator t(cayley(l.mat()));
  for (const BatteryFn& bf : config_battery(cfg)) {
    const CMat fl = apply(bf.fn, l);
    const CMat phi = apply_disk(transplant_to_disk(bf.fn), t);
    ctx.check("calculus_consistency", (fl - phi).norm(),
              1e-9 * (1.0 + fl.norm()), "fn=" + bf.id);
    ctx.check("unbounded_form_agreement",
              (apply_unbounded_form(bf.fn, l) - fl).norm(),
              1e-9 * (1.0 + fl.norm()), "fn=" + bf.id);
    // divided difference against direct quotient at separated points
    const cplx z(0.7, 1.3), w(-1.1, 0.4);
    const cplx quotient = (bf.fn.eval(z) - bf.fn.eval(w)) / (z - w);
    ctx.check("divided_diff_quotient",
              std::abs(bf.fn.divided_diff(z, w) - quotient), 1e-10,
              "fn=" + bf.id);
  }
}

void run_semispectral(InstanceCtx& ctx) {
  const SuiteConfig& cfg = *ctx.cfg;
  const Operator l = random_dissipative(ctx.seed, ctx.dim,
                                        std::max(cfg.gap, 0.05));
  const GridSpec grid = density_grid_spec(l, cfg.tol.quadrature);
  SemiSpectralDensity ssd(l, grid);
  ctx.check("mass_identity",
            operator_norm(CMat(ssd.mass(Exec::Serial) -
                               CMat::Identity(ctx.dim, ctx.dim))),
            1e-7);

  const std::vector<BatteryFn> fns = config_battery(cfg);
  for (std::size_t i = 0; i < fns.size() && i < 2; ++i) {
    const CMat via_density =
        integrate_functional(fns[i].fn, l, grid, Exec::Serial);
    ctx.check("functional_vs_apply",
              (via_density - apply(fns[i].fn, l)).norm(), 1e-7,
              "fn=" + fns[i].id);
  }

  const CMat t = cayley(l.mat());
  for (int depth : {1, 4}) {
    const FiniteDilation fd = finite_dilation(t, depth);
    double worst = 0.0;
    CMat tn = CMat::Identity(ctx.dim, ctx.dim);
    for (int n = 0; n <= depth; ++n) {
      worst = std::max(worst, operator_norm(CMat(tn - fd.compress_power(n))));
      tn = t * tn;
    }
    ctx.check("dilation_exactness", worst, 1e-10,
              "depth=" + std::to_string(depth));
  }

  const ResolventCheck rc =
      resolvent_dilation_check(l, 48, cplx(0.3, -0.7));
  ctx.check("dilation_resolvent", rc.residual, rc.bound + 1e-12);

  const double mid = l.spectral().values(0).real();
  const CrossValidation cv = cross_validate(
      l, grid, 64, {{mid - 1.37, mid + 0.83}}, Exec::Serial);
  ctx.check("cross_validate", cv.deviation, cv.bound);
}

void run_doi(InstanceCtx& ctx) {
  const SuiteConfig& cfg = *ctx.cfg;
  const DissipativePair pair =
      gen_pair(ctx.seed, ctx.dim, cfg.gap, PairKind::generic);
  const std::vector<BatteryFn> fns = config_battery(cfg);
  for (const BatteryFn& bf : fns)
    ctx.check("difference_formula", difference_formula_residual(bf.fn, pair),
              cfg.tol.residual, "fn=" + bf.id);

  // derivative vs central difference at the configured step
  const AnalyticFn f0 = fns.front().fn;
  if (ctx.dim <= 6) {
    const CMat q = derivative_formula(pair, 0.5, f0).q_t;
    const CMat fd =
        derivative_central_difference(pair, 0.5, cfg.tol.fd_step, f0);
    ctx.check("derivative_vs_fd", (q - fd).norm() / std::max(1.0, q.norm()),
              1e-5, "fn=" + fns.front().id);
  }

  if (ctx.dim <= 3) {
    const Operator m = random_dissipative(ctx.seed + 17, ctx.dim,
                                          std::max(cfg.gap, 0.05));
    const Operator l = random_dissipative(ctx.seed + 23, ctx.dim,
                                          std::max(cfg.gap, 0.05));
    std::mt19937_64 rng(ctx.seed + 5);
    CMat q(ctx.dim, ctx.dim);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < ctx.dim; ++r)
      for (int c = 0; c < ctx.dim; ++c) q(r, c) = cplx(gauss(rng), gauss(rng));
    GridSpec grid = density_grid_spec(m, cfg.tol.quadrature);
    const GridSpec gl = density_grid_spec(l, cfg.tol.quadrature);
    grid.centers.insert(grid.centers.end(), gl.centers.begin(),
                        gl.centers.end());
    const Kernel ker = Kernel::dd_flat(AnalyticFn::pole(cplx(0.0, -2.0)));
    const CMat via_q = doi_quadrature(ker, m, q, l, grid, Exec::Serial);
    const CMat via_e = doi_eigen(ker, m, q, l);
    ctx.check("doi_evaluator_agreement", (via_q - via_e).norm(),
              10.0 * cfg.tol.quadrature + 1e-6);

    const TraceIdentity ti =
        doi_trace_identity(f0, m, q, grid, Exec::Serial);
    ctx.check("doi_trace_identity", std::abs(ti.lhs - ti.rhs),
              10.0 * cfg.tol.quadrature);
  }
}

void run_shift(InstanceCtx& ctx) {
  const SuiteConfig& cfg = *ctx.cfg;
  if (ctx.dim > 8) return;  // pipeline contract is stated for dims <= 8
  const DissipativePair pair =
      gen_pair(ctx.seed, ctx.dim, std::max(cfg.gap, 0.1), PairKind::generic);
  std::vector<double> s_grid;
  for (int i = 0; i <= 40; ++i) s_grid.push_back(-10.0 + 0.5 * i);
  const std::vector<BatteryFn> fns = config_battery(cfg);
  std::vector<BatteryFn> sample(fns.begin(),
                                fns.begin() + std::min<std::size_t>(3, fns.size()));
  const SpectralShiftResult ssr =
      xi_from_nu(pair, s_grid, 32, Exec::Serial, sample);
  for (const auto& [id, res] : ssr.residuals)
    ctx.check("trace_formula", res, 1e-6, "fn=" + id);
  ctx.check("weight_integral_finite",
            std::isfinite(ssr.weight_integral) ? 0.0 : 1.0, 0.0);

  const ResolventDifference rd = resolvent_difference_check(pair);
  ctx.check("resolvent_difference_bound", rd.norm - rd.bound, 1e-10);

  const cplx direct =
      (apply(sample.front().fn, pair.M) - apply(sample.front().fn, pair.L))
          .trace();
  const cplx route =
      derivative_trace_route(pair, sample.front().fn, 32, Exec::Serial);
  ctx.check("qt_trace_route", std::abs(direct - route), 1e-7,
            "fn=" + sample.front().id);
}

void run_multiplier(InstanceCtx& ctx) {
  const AnalyticFn res = AnalyticFn::pole(cplx(0.0, -1.0));  // (z+i)^{-1}
  const std::vector<MultiplierBracket> probe =
      rola_probe(res, {16, 32}, ctx.seed, Exec::Serial);
  for (const MultiplierBracket& br : probe) {
    ctx.check("bracket_order", br.lower - br.upper, 1e-9,
              "kernel=" + br.kernel_id);
    const CMat m = grid_kernel(Kernel::dd_flat(res), br.xs, br.ys);
    ctx.check("upper_witness_product", (br.witness_a * br.witness_b - m).norm(),
              1e-8, "kernel=" + br.kernel_id);
    double maxrow = 0.0, maxcol = 0.0;
    for (int r = 0; r < br.witness_a.rows(); ++r)
      maxrow = std::max(maxrow, br.witness_a.row(r).norm());
    for (int c = 0; c < br.witness_b.cols(); ++c)
      maxcol = std::max(maxcol, br.witness_b.col(c).norm());
    ctx.check("upper_witness_value", maxrow * maxcol - br.upper, 1e-9,
              "kernel=" + br.kernel_id);
    ctx.check("lower_witness_contraction",
              operator_norm(br.witness_x) - 1.0, 1e-9,
              "kernel=" + br.kernel_id);
    ctx.check("lower_witness_value",
              br.lower - operator_norm(m.cwiseProduct(br.witness_x)), 1e-9,
              "kernel=" + br.kernel_id);
    // rank-one closed form: the kernel is -(x+i)^{-1}, multiplier norm 1
    ctx.check("rank_one_window", std::abs(0.5 * (br.lower + br.upper) - 1.0),
              0.05 + 0.5 * (br.upper - br.lower), "kernel=" + br.kernel_id);
  }
  const ReslipProbe rp = reslip_probe(res, {16}, 5, ctx.seed, Exec::Serial);
  ctx.check("transplant_identity", rp.max_transplant_gap, 1e-9);
}

void run_instance(InstanceCtx& ctx) {
  if (ctx.suite == "core") run_core(ctx);
  else if (ctx.suite == "funcalc") run_funcalc(ctx);
  else if (ctx.suite == "semispectral") run_semispectral(ctx);
  else if (ctx.suite == "doi") run_doi(ctx);
  else if (ctx.suite == "shift") run_shift(ctx);
  else if (ctx.suite == "multiplier") run_multiplier(ctx);
}

}  // namespace

Report run_suite(const SuiteConfig& config) {
  config.validate();
  if (config.workers > 0) set_worker_count(config.workers);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<InstanceCtx> tasks;
  for (const std::string& suite : config.suites)
    for (int dim : config.dims)
      for (int inst = 0; inst < config.n_instances; ++inst)
        tasks.push_back(InstanceCtx{
            &config, suite,
            config.seed + 1000u * static_cast<unsigned>(inst), dim, {}});

  for_each_index(tasks.size(), Exec::Parallel, [&](std::size_t i) {
    try {
      run_instance(tasks[i]);
    } catch (const std::exception& e) {
      tasks[i].results.push_back({tasks[i].suite + "/exception",
                                  tasks[i].coord(), 1.0, 0.0, false,
                                  tasks[i].repro() + "  # " + e.what()});
    }
  });

  Report rep;
  rep.config_echo = config.to_json();
  rep.version = kArtifactVersion;
  namespace fs = std::filesystem;
  const fs::path fail_dir = fs::path(config.out_dir) / "failures";
  for (const InstanceCtx& ctx : tasks) {
    SuiteStats& st = rep.suites[ctx.suite];
    bool any_fail = false;
    for (const CheckResult& cr : ctx.results) {
      (cr.pass ? st.pass : st.fail) += 1;
      if (!cr.pass) {
        rep.failures.push_back(cr);
        any_fail = true;
      }
      if (cr.value > st.worst) {
        st.worst = cr.value;
        st.worst_coord = cr.name + " " + cr.coord;
      }
    }
    if (any_fail && (ctx.suite == "core" || ctx.suite == "doi" ||
                     ctx.suite == "shift" || ctx.suite == "funcalc")) {
      fs::create_directories(fail_dir);
      std::ofstream os(fail_dir / (ctx.suite + "_seed" +
                                   std::to_string(ctx.seed) + "_dim" +
                                   std::to_string(ctx.dim) + ".txt"));
      os << "# replay instance " << ctx.coord() << "\n";
      if (ctx.suite == "funcalc") {
        const Operator l = random_dissipative(ctx.seed, ctx.dim, config.gap);
        write_matrix_artifact(os, "L", l.mat());
      } else {
        const DissipativePair pair = gen_pair(
            ctx.seed, ctx.dim,
            ctx.suite == "shift" ? std::max(config.gap, 0.1) : config.gap,
            PairKind::generic);
        write_matrix_artifact(os, "L", pair.L.mat());
        write_matrix_artifact(os, "K", pair.K.mat());
      }
    }
  }
  rep.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["config"] = config_echo;
  nlohmann::json js;
  for (const auto& [name, st] : suites) {
    js[name] = {{"pass", st.pass},
                {"fail", st.fail},
                {"worst", st.worst},
                {"worst_coord", st.worst_coord}};
  }
  j["suites"] = js;
  nlohmann::json jf = nlohmann::json::array();
  for (const CheckResult& cr : failures)
    jf.push_back({{"name", cr.name},
                  {"coord", cr.coord},
                  {"value", cr.value},
                  {"tol", cr.tol},
                  {"repro", cr.repro}});
  j["failures"] = jf;
  j["timing"] = {{"total_seconds", total_seconds}};
  return j;
}

nlohmann::json xi_command(const SuiteConfig& config, int dim, PairKind kind,
                          int s_points, double s_span) {
  config.validate();
  if (s_points < 2) throw ConfigError("xi: need at least two s points");
  const DissipativePair pair =
      gen_pair(config.seed, dim, std::max(config.gap, 0.1), kind);
  std::vector<double> s_grid(s_points);
  for (int i = 0; i < s_points; ++i)
    s_grid[i] = -s_span + 2.0 * s_span * i / (s_points - 1);
  const SpectralShiftResult ssr =
      xi_from_nu(pair, s_grid, 32,
                 config.workers == 1 ? Exec::Serial : Exec::Parallel,
                 config_battery(config));

  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  {
    std::ofstream csv(fs::path(config.out_dir) / "xi.csv");
    csv.precision(17);
    csv << "s,re_xi,im_xi\n";
    for (std::size_t i = 0; i < s_grid.size(); ++i)
      csv << s_grid[i] << "," << ssr.xi[i].real() << "," << ssr.xi[i].imag()
          << "\n";
  }
  nlohmann::json summary;
  summary["seed"] = config.seed;
  summary["dim"] = dim;
  summary["weight_integral"] = ssr.weight_integral;
  summary["residuals"] = ssr.residuals;
  summary["grid_meta"] = {{"s_points", s_points},
                          {"s_span", s_span},
                          {"t_nodes", ssr.t_nodes}};
  std::ofstream js(fs::path(config.out_dir) / "xi_summary.json");
  js << summary.dump(2) << "\n";
  return summary;
}

}  // namespace oplab
