// maxlab: command-line front end for the maximal-operator laboratory.
//
// Exit status: 0 success, 1 a mathematical check failed or a weak-type bound
// was exceeded, 2 usage, validation or I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxlab/maxlab.hpp"

namespace {

using namespace maxlab;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string format;
  std::string output;
  std::uint64_t seed = 20240607;
  OptimizerSettings opt;
  bool full_grid = false;
  LevelSetSettings level_set;

  OptimizerSettings optimizer() const {
    auto o = opt;
    o.lower_edge_only = !full_grid;
    validate(o);
    return o;
  }

  Format output_format(Format fallback) const { return format.empty() ? fallback : parse_format(format); }
};

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--format", c.format, "Output format: csv or json");
  cmd->add_option("--output,-o", c.output, "Output path (default: stdout)");
  cmd->add_option("--seed", c.seed, "Seed for every random stream")->capture_default_str();
  cmd->add_option("--rel-tol", c.opt.rel_tol, "Optimizer relative convergence tolerance")->capture_default_str();
  cmd->add_option("--alpha-grid", c.opt.alpha_grid, "Alpha grid points (full-grid search)")->capture_default_str();
  cmd->add_option("--beta-grid", c.opt.beta_grid, "Coarse beta grid points")->capture_default_str();
  cmd->add_option("--refine-rounds", c.opt.refine_rounds, "Maximum refinement rounds")->capture_default_str();
  cmd->add_option("--beta-floor", c.opt.beta_floor, "Smallest searched radius ratio")->capture_default_str();
  cmd->add_flag("--full-grid", c.full_grid, "Search the whole (alpha, beta) grid instead of the lower alpha edge");
  cmd->add_option("--scan-points", c.level_set.scan_points, "Radial scan points for level sets")
      ->capture_default_str();
  cmd->add_option("--crossing-width", c.level_set.crossing_rel_width, "Relative bisection width for crossings")
      ->capture_default_str();
}

StepProfile load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("profile", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str());
}

std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> out;
  for (double x : parse_grid(spec, "d")) {
    if (x != static_cast<int>(x)) throw ValidationError("d", "dimensions must be integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

void emit_report(const CheckReport& rep, const CommonOptions& c) {
  if (c.output_format(Format::Json) == Format::Csv) {
    emit(rep.rows, Format::Csv, c.output, std::cout);
    return;
  }
  const std::string text = to_json(rep).dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file || !(file << text)) throw IoError("cannot write '" + c.output + "'");
}

int report_status(const CheckReport& rep) {
  std::cerr << rep.name << ": " << (rep.passed ? "PASS" : "FAIL") << " (worst violation "
            << format_number(rep.worst_violation) << ", tolerance " << format_number(rep.tolerance) << ")\n";
  for (const auto& note : rep.notes) std::cerr << "  " << note << "\n";
  return rep.passed ? kExitOk : kExitCheckFailed;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the almost-uncentered maximal operator on radial decreasing functions"};
  app.require_subcommand(1);

  CommonOptions common;
  OperatorConfig cfg{1, 0.0};
  std::string profile_path;
  std::string region_name = "full";

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate M g at one or more radii");
  std::string eval_radii;
  eval_cmd->add_option("--d", cfg.d, "Dimension")->required();
  eval_cmd->add_option("--lambda", cfg.lambda, "Shrink parameter in [0, 1]")->required();
  eval_cmd->add_option("--profile", profile_path, "Profile JSON file")->required();
  eval_cmd->add_option("--R", eval_radii, "Radius, list or grid")->required();
  eval_cmd->add_option("--region", region_name, "full|centered-band|outward-band|inward-band")->capture_default_str();
  add_common(eval_cmd, common);

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "Sample R -> M g(R) on a grid");
  std::string scan_grid;
  scan_cmd->add_option("--d", cfg.d, "Dimension")->required();
  scan_cmd->add_option("--lambda", cfg.lambda, "Shrink parameter in [0, 1]")->required();
  scan_cmd->add_option("--profile", profile_path, "Profile JSON file")->required();
  scan_cmd->add_option("--R-grid", scan_grid, "Radii: a:b:n, geom:a:b:n or list")->required();
  scan_cmd->add_option("--region", region_name, "Feasible region")->capture_default_str();
  add_common(scan_cmd, common);

  // constant
  auto* const_cmd = app.add_subcommand("constant", "Estimate sup_t t |{M g > t}| / ||g||_1");
  std::string t_grid;
  const_cmd->add_option("--d", cfg.d, "Dimension")->required();
  const_cmd->add_option("--lambda", cfg.lambda, "Shrink parameter in [0, 1]")->required();
  const_cmd->add_option("--profile", profile_path, "Profile JSON file")->required();
  const_cmd->add_option("--t-grid", t_grid, "Thresholds (default: 24 geometric points below the peak)");
  add_common(const_cmd, common);

  // sharpness
  auto* sharp_cmd = app.add_subcommand("sharpness", "Weak-type ratios of normalized ball indicators");
  std::string r_seq = "1";
  std::string t_seq = "1e-2,1e-3,1e-4";
  sharp_cmd->add_option("--d", cfg.d, "Dimension")->required();
  sharp_cmd->add_option("--lambda", cfg.lambda, "Shrink parameter in [0, 1]")->required();
  sharp_cmd->add_option("--r-seq", r_seq, "Indicator radii")->capture_default_str();
  sharp_cmd->add_option("--t-seq", t_seq, "Thresholds")->capture_default_str();
  add_common(sharp_cmd, common);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Weak-type ratios over dimensions, lambdas and profiles");
  std::string d_set = "1,2,3";
  std::string lambda_set = "0,0.25,0.5,0.75,1";
  std::vector<std::string> profile_files;
  int random_count = 0;
  int k_max = 6;
  bool summary = false;
  SweepSettings sweep_settings;
  sweep_cmd->add_option("--d-set", d_set, "Dimensions")->capture_default_str();
  sweep_cmd->add_option("--lambda-set", lambda_set, "Lambdas")->capture_default_str();
  sweep_cmd->add_option("--profiles", profile_files, "Profile JSON files");
  sweep_cmd->add_option("--random", random_count, "Number of seeded random profiles")->capture_default_str();
  sweep_cmd->add_option("--k-max", k_max, "Maximum levels per random profile")->capture_default_str();
  sweep_cmd->add_option("--t-points", sweep_settings.t_points, "Thresholds per cell")->capture_default_str();
  sweep_cmd->add_flag("--summary", summary, "Emit one row per cell instead of one per threshold");
  add_common(sweep_cmd, common);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Audit the geometric reductions");
  verify_cmd->require_subcommand(1);
  McConfig mc;
  mc.n_samples = 100000;
  std::string r_grid = "0.1:1.0:10";
  std::string tv_grid = "0.2:2.0:10";
  std::string asserted = "conservative";
  double r_single = 0.5;
  double t_single = 0.8;
  std::string radii_grid = "0.5,0.9,2,5";
  double R_single = 2.0;
  double c_dist = 1.0;
  double rho1 = 1.0;
  double rho2 = 1.0;

  auto* v_homothety = verify_cmd->add_subcommand("homothety", "Homothety identity of lens volumes");
  v_homothety->add_option("--d", cfg.d, "Dimension")->required();
  v_homothety->add_option("--r-grid", r_grid, "r values in (0, 1]")->capture_default_str();
  v_homothety->add_option("--t-grid", tv_grid, "t values")->capture_default_str();
  add_common(v_homothety, common);

  auto* v_inequality = verify_cmd->add_subcommand("inequality", "Lens scaling inequality");
  v_inequality->add_option("--d", cfg.d, "Dimension")->required();
  v_inequality->add_option("--r-grid", r_grid, "r values in (0, 1]")->capture_default_str();
  v_inequality->add_option("--t-grid", tv_grid, "t values")->capture_default_str();
  v_inequality->add_option("--region", asserted, "Asserted region: conservative (t <= 1) or stated (t + r > 1)")
      ->capture_default_str();
  add_common(v_inequality, common);

  auto* v_inclusion = verify_cmd->add_subcommand("inclusion", "Lens inclusion in shifted balls (Monte Carlo)");
  v_inclusion->add_option("--d", cfg.d, "Dimension")->required();
  v_inclusion->add_option("--r", r_single, "r in (0, 1]")->capture_default_str();
  v_inclusion->add_option("--t", t_single, "t with t + r > 1")->capture_default_str();
  v_inclusion->add_option("--samples", mc.n_samples, "Samples")->capture_default_str();
  add_common(v_inclusion, common);

  auto* v_centered = verify_cmd->add_subcommand("centered-band", "Centered radii in [R, 2R] vs full supremum");
  v_centered->add_option("--d", cfg.d, "Dimension")->required();
  v_centered->add_option("--profile", profile_path, "Profile JSON file")->required();
  v_centered->add_option("--R-grid", radii_grid, "Radii")->capture_default_str();
  add_common(v_centered, common);

  auto* v_bands = verify_cmd->add_subcommand("bands", "Outward and inward bands vs full supremum");
  v_bands->add_option("--d", cfg.d, "Dimension")->required();
  v_bands->add_option("--lambda", cfg.lambda, "Shrink parameter")->required();
  v_bands->add_option("--profile", profile_path, "Profile JSON file")->required();
  v_bands->add_option("--R-grid", radii_grid, "Radii")->capture_default_str();
  add_common(v_bands, common);

  auto* v_domination = verify_cmd->add_subcommand("domination", "Random admissible balls vs computed supremum");
  v_domination->add_option("--d", cfg.d, "Dimension")->required();
  v_domination->add_option("--lambda", cfg.lambda, "Shrink parameter")->required();
  v_domination->add_option("--profile", profile_path, "Profile JSON file")->required();
  v_domination->add_option("--R", R_single, "Radius")->capture_default_str();
  v_domination->add_option("--samples", mc.n_samples, "Samples")->capture_default_str();
  add_common(v_domination, common);

  auto* v_mc = verify_cmd->add_subcommand("mc-volume", "Exact lens volume vs Monte Carlo estimate");
  v_mc->add_option("--d", cfg.d, "Dimension")->required();
  v_mc->add_option("--c", c_dist, "Center distance")->capture_default_str();
  v_mc->add_option("--rho1", rho1, "First radius")->capture_default_str();
  v_mc->add_option("--rho2", rho2, "Second radius")->capture_default_str();
  v_mc->add_option("--samples", mc.n_samples, "Samples")->capture_default_str();
  add_common(v_mc, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    mc.seed = common.seed;
    const auto opt = common.optimizer();

    if (*eval_cmd || *scan_cmd) {
      validate(cfg);
      const auto g = load_profile(profile_path);
      const auto region = parse_region(region_name);
      const auto radii = parse_grid(*eval_cmd ? eval_radii : scan_grid, "R");
      const auto scan = radial_scan(g, cfg, radii, region, opt);
      const double norm = l1_norm(g, cfg.d);
      if (*eval_cmd && common.output.empty() && common.format.empty()) {
        for (const auto& e : scan.entries) {
          std::cout << "R = " << format_number(e.radius) << "  m = " << format_number(e.value)
                    << "  (lower bound; converged to rel_tol " << format_number(opt.rel_tol) << ")"
                    << (e.converged ? "" : " [not converged]") << "\n";
        }
        return kExitOk;
      }
      Table table{{"R", "m", "reference", "region", "converged"}, {}};
      for (const auto& e : scan.entries) {
        table.add_row({e.radius, e.value, pointwise_reference(cfg, e.radius, norm), std::string(to_string(region)),
                       e.converged});
      }
      emit(table, common.output_format(Format::Csv), common.output, std::cout);
      return kExitOk;
    }

    if (*const_cmd) {
      validate(cfg);
      const auto g = load_profile(profile_path);
      const auto ts = t_grid.empty() ? default_thresholds(g) : parse_grid(t_grid, "t_grid");
      const auto est = weak_constant_estimate(g, cfg, ts, opt, common.level_set);
      const double bound = weak_bound(cfg);
      Table table{{"d", "lambda", "profile_digest", "t", "mu", "ratio", "bound", "margin"}, {}};
      for (const auto& p : est.per_t) {
        table.add_row({std::int64_t{cfg.d}, cfg.lambda, est.profile_digest, p.t, p.mu, p.ratio, bound,
                       bound - p.ratio});
      }
      emit(table, common.output_format(Format::Csv), common.output, std::cout);
      print_warnings(est.warnings);
      const bool ok = est.ratio_sup <= bound + kBoundSlack;
      std::cerr << "ratio_sup = " << format_number(est.ratio_sup) << " at t = " << format_number(est.argmax_t)
                << ", bound (1+lambda)^d = " << format_number(bound) << (ok ? "" : "  VIOLATED") << "\n";
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*sharp_cmd) {
      validate(cfg);
      const auto rows =
          sharpness_experiment(cfg, parse_grid(r_seq, "r_seq"), parse_grid(t_seq, "t_seq"), opt, common.level_set);
      Table table{{"d", "lambda", "r", "t", "mu", "ratio", "bound", "margin"}, {}};
      bool ok = true;
      for (const auto& row : rows) {
        table.add_row({std::int64_t{cfg.d}, cfg.lambda, row.r, row.t, row.mu, row.ratio, row.bound,
                       row.bound - row.ratio});
        ok = ok && row.ratio <= row.bound + kBoundSlack;
      }
      emit(table, common.output_format(Format::Csv), common.output, std::cout);
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*sweep_cmd) {
      std::vector<StepProfile> files;
      for (const auto& path : profile_files) files.push_back(load_profile(path));
      const auto dims = parse_dims(d_set);
      const auto lambdas = parse_grid(lambda_set, "lambda_set");
      for (int d : dims) validate(OperatorConfig{d, 0.0});
      for (double l : lambdas) validate(OperatorConfig{1, l});
      ProfileSource source;
      if (random_count > 0) {
        const auto random = random_suite(common.seed, random_count, k_max);
        source = [files, random](int d) {
          auto out = files;
          for (auto& g : random(d)) out.push_back(std::move(g));
          return out;
        };
      } else {
        source = fixed_suite(files);
      }
      sweep_settings.level_set = common.level_set;
      const auto result = sweep(dims, lambdas, source, opt, sweep_settings);
      emit(summary ? result.cells : result.rows, common.output_format(Format::Csv), common.output, std::cout);
      print_warnings(result.warnings);
      std::cerr << result.cells.rows.size() << " cells, " << result.violations << " bound violations, "
                << result.errors << " errors\n";
      if (result.violations > 0) return kExitCheckFailed;
      return result.errors > 0 ? kExitUsage : kExitOk;
    }

    if (*verify_cmd) {
      CheckReport rep;
      if (*v_homothety) {
        rep = check_homothety_identity(cfg.d, parse_grid(r_grid, "r_grid"), parse_grid(tv_grid, "t_grid"));
      } else if (*v_inequality) {
        if (asserted != "conservative" && asserted != "stated") {
          throw ValidationError("region", "expected conservative or stated");
        }
        rep = check_lens_scaling_inequality(cfg.d, parse_grid(r_grid, "r_grid"), parse_grid(tv_grid, "t_grid"),
                                            asserted == "stated" ? AssertedRegion::Stated
                                                                 : AssertedRegion::Conservative);
      } else if (*v_inclusion) {
        rep = check_lens_inclusion(cfg.d, r_single, t_single, mc);
      } else if (*v_centered) {
        rep = check_centered_band(load_profile(profile_path), cfg.d, parse_grid(radii_grid, "R_grid"), opt);
      } else if (*v_bands) {
        validate(cfg);
        rep = check_band_regions(load_profile(profile_path), cfg, parse_grid(radii_grid, "R_grid"), opt);
      } else if (*v_domination) {
        validate(cfg);
        rep = check_random_ball_domination(load_profile(profile_path), cfg, R_single, mc, opt);
      } else if (*v_mc) {
        const double exact = intersection_volume(cfg.d, c_dist, rho1, rho2);
        const auto est = mc_intersection_volume(cfg.d, c_dist, rho1, rho2, mc);
        const double diff = std::fabs(est.estimate - exact);
        rep.name = "mc-volume";
        rep.tolerance = 4.0 * est.std_error + 1e-12 * exact;
        rep.worst_violation = diff;
        rep.passed = diff <= rep.tolerance;
        rep.samples_or_grid = std::to_string(mc.n_samples) + " samples";
        rep.config = {{"d", cfg.d}, {"c", c_dist}, {"rho1", rho1}, {"rho2", rho2}, {"seed", mc.seed}};
        rep.witness = {{"exact", exact}, {"estimate", est.estimate}, {"std_error", est.std_error}};
        rep.rows = Table{{"exact", "estimate", "std_error"}, {}};
        rep.rows.add_row({exact, est.estimate, est.std_error});
      }
      emit_report(rep, common);
      return report_status(rep);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
