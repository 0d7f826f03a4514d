#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oplab/funcalc.hpp"
#include "oplab/harness.hpp"
#include "oplab/multiplier.hpp"
#include "oplab/semispectral.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
  std::string config_path;
  oplab::SuiteConfig cfg;
  // override tracking: CLI flags win over the config file
  bool has_seed = false, has_dims = false, has_suite = false,
       has_workers = false, has_out = false, has_tol_quad = false,
       has_tol_res = false, has_n_instances = false, has_gap = false;
  unsigned seed = 1;
  std::vector<int> dims;
  std::vector<std::string> suites;
  int workers = 0;
  std::string out_dir;
  double tol_quad = 0.0, tol_res = 0.0, gap = 0.0;
  int n_instances = 0;

  void resolve() {
    if (!config_path.empty())
      cfg = oplab::SuiteConfig::from_file(config_path);
    if (has_seed) cfg.seed = seed;
    if (has_dims) cfg.dims = dims;
    if (has_suite) cfg.suites = suites;
    if (has_workers) cfg.workers = workers;
    if (has_out) cfg.out_dir = out_dir;
    if (has_tol_quad) cfg.tol.quadrature = tol_quad;
    if (has_tol_res) cfg.tol.residual = tol_res;
    if (has_n_instances) cfg.n_instances = n_instances;
    if (has_gap) cfg.gap = gap;
    cfg.validate();
  }
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--config", o.config_path, "structured config file");
  app->add_option("--seed", o.seed)->each([&](const std::string&) { o.has_seed = true; });
  app->add_option("--dims", o.dims)->delimiter(',')->each([&](const std::string&) { o.has_dims = true; });
  app->add_option("--suite", o.suites)->delimiter(',')->each([&](const std::string&) { o.has_suite = true; });
  app->add_option("--workers", o.workers)->each([&](const std::string&) { o.has_workers = true; });
  app->add_option("--out", o.out_dir)->each([&](const std::string&) { o.has_out = true; });
  app->add_option("--tol-quad", o.tol_quad)->each([&](const std::string&) { o.has_tol_quad = true; });
  app->add_option("--tol-res", o.tol_res)->each([&](const std::string&) { o.has_tol_res = true; });
  app->add_option("--n-instances", o.n_instances)->each([&](const std::string&) { o.has_n_instances = true; });
  app->add_option("--gap", o.gap)->each([&](const std::string&) { o.has_gap = true; });
}

oplab::PairKind parse_kind(const std::string& s) {
  if (s == "generic") return oplab::PairKind::generic;
  if (s == "trace_class_structured")
    return oplab::PairKind::trace_class_structured;
  if (s == "selfadjoint_base") return oplab::PairKind::selfadjoint_base;
  throw oplab::ConfigError("unknown pair kind '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oplab: dissipative-operator trace-formula laboratory"};
  app.require_subcommand(1);

  CommonOpts vo, xo, mo, dl;

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, vo);

  CLI::App* xi = app.add_subcommand("xi", "compute the spectral shift samples");
  add_common(xi, xo);
  int xi_dim = 4;
  std::string xi_kind = "generic";
  int xi_points = 201;
  double xi_span = 50.0;
  xi->add_option("--dim", xi_dim);
  xi->add_option("--kind", xi_kind);
  xi->add_option("--points", xi_points);
  xi->add_option("--span", xi_span);

  CLI::App* probe =
      app.add_subcommand("probe-multiplier", "grid multiplier brackets");
  add_common(probe, mo);
  std::string probe_fn = "res_i";
  std::vector<int> probe_grids{16, 32, 64};
  std::string probe_mode = "rola";
  probe->add_option("--fn", probe_fn, "battery function id");
  probe->add_option("--grids", probe_grids)->delimiter(',');
  probe->add_option("--mode", probe_mode, "rola or reslip");

  CLI::App* dilate = app.add_subcommand("dilate", "finite dilation diagnostics");
  add_common(dilate, dl);
  int dil_dim = 4;
  int dil_depth = 16;
  dilate->add_option("--dim", dil_dim);
  dilate->add_option("--depth", dil_depth);

  CLI::App* merge = app.add_subcommand("report-merge", "merge report files");
  std::vector<std::string> merge_inputs;
  std::string merge_out = "report.json";
  merge->add_option("inputs", merge_inputs)->required();
  merge->add_option("--out-file", merge_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (verify->parsed()) {
      vo.resolve();
      const oplab::Report rep = oplab::run_suite(vo.cfg);
      std::filesystem::create_directories(vo.cfg.out_dir);
      std::ofstream os(std::filesystem::path(vo.cfg.out_dir) / "report.json");
      os << rep.to_json().dump(2) << "\n";
      for (const auto& [name, st] : rep.suites)
        std::cout << name << ": " << st.pass << " passed, " << st.fail
                  << " failed (worst " << st.worst << " at " << st.worst_coord
                  << ")\n";
      if (!rep.ok()) {
        std::cout << rep.failures.size() << " failing checks; see "
                  << vo.cfg.out_dir << "/report.json\n";
        return kExitFail;
      }
      return kExitPass;
    }

    if (xi->parsed()) {
      xo.resolve();
      const nlohmann::json summary =
          oplab::xi_command(xo.cfg, xi_dim, parse_kind(xi_kind), xi_points,
                            xi_span);
      double worst = 0.0;
      for (const auto& [k, v] : summary["residuals"].items())
        worst = std::max(worst, v.get<double>());
      std::cout << "weight_integral " << summary["weight_integral"]
                << "\nmax_trace_residual " << worst << "\n";
      return kExitPass;
    }

    if (probe->parsed()) {
      mo.resolve();
      const std::vector<oplab::BatteryFn> fns = oplab::default_battery();
      const oplab::BatteryFn* chosen = nullptr;
      for (const oplab::BatteryFn& bf : fns)
        if (bf.id == probe_fn) chosen = &bf;
      if (!chosen)
        throw oplab::ConfigError("unknown battery function id '" + probe_fn +
                                 "'; available ids are listed in the README");
      std::vector<oplab::MultiplierBracket> brackets;
      if (probe_mode == "rola") {
        brackets = oplab::rola_probe(chosen->fn, probe_grids, mo.cfg.seed);
      } else if (probe_mode == "reslip") {
        brackets = oplab::reslip_probe(chosen->fn, probe_grids, 10,
                                       mo.cfg.seed)
                       .brackets;
      } else {
        throw oplab::ConfigError("mode must be rola or reslip");
      }
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t i = 0; i < brackets.size(); ++i) {
        const auto& br = brackets[i];
        const std::string trend =
            i == 0 ? "first"
                   : (br.upper <= brackets[i - 1].upper * 1.02 ? "bounded"
                                                               : "growing");
        out.push_back({{"function_id", probe_fn},
                       {"grid_size", br.xs.size()},
                       {"lower", br.lower},
                       {"upper", br.upper},
                       {"trend", trend}});
      }
      std::cout << out.dump(2) << "\n";
      return kExitPass;
    }

    if (dilate->parsed()) {
      dl.resolve();
      const oplab::Operator l =
          oplab::random_dissipative(dl.cfg.seed, dil_dim, dl.cfg.gap);
      const oplab::CMat t = oplab::cayley(l.mat());
      const oplab::FiniteDilation fd = oplab::finite_dilation(t, dil_depth);
      double worst = 0.0;
      oplab::CMat tn = oplab::CMat::Identity(dil_dim, dil_dim);
      for (int n = 0; n <= dil_depth; ++n) {
        worst = std::max(
            worst, oplab::operator_norm(oplab::CMat(tn - fd.compress_power(n))));
        tn = t * tn;
      }
      const oplab::ResolventCheck rc =
          oplab::resolvent_dilation_check(l, dil_depth, oplab::cplx(0.0, -1.0));
      std::cout << "power_compression_worst " << worst << "\n"
                << "resolvent_residual " << rc.residual << "\n"
                << "resolvent_bound " << rc.bound << "\n";
      return worst <= 1e-10 && rc.residual <= rc.bound + 1e-12 ? kExitPass
                                                               : kExitFail;
    }

    if (merge->parsed()) {
      nlohmann::json merged;
      merged["version"] = oplab::kArtifactVersion;
      merged["reports"] = nlohmann::json::array();
      int fails = 0;
      for (const std::string& path : merge_inputs) {
        std::ifstream in(path);
        if (!in) throw oplab::ConfigError("cannot open report: " + path);
        nlohmann::json j;
        in >> j;
        fails += static_cast<int>(j["failures"].size());
        merged["reports"].push_back(j);
      }
      std::ofstream os(merge_out);
      os << merged.dump(2) << "\n";
      std::cout << "merged " << merge_inputs.size() << " reports, " << fails
                << " failures\n";
      return fails == 0 ? kExitPass : kExitFail;
    }
  } catch (const oplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfig;
}
