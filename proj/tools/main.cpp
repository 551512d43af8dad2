#include "semihilb/semihilb.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

using semihilb::io::json;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> rank_rtol;
  std::optional<double> cmp_atol;
  std::optional<int> theta_samples;
  std::optional<int> parallelism;

  void apply(semihilb::ToleranceConfig& tol) const {
    if (rank_rtol) tol.rank_rtol = *rank_rtol;
    if (cmp_atol) tol.cmp_atol = *cmp_atol;
    if (theta_samples) tol.theta_samples = *theta_samples;
    tol.validate();
  }

  semihilb::ToleranceConfig tolerance() const {
    semihilb::ToleranceConfig tol;
    apply(tol);
    return tol;
  }
};

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int cmd_compute(const Overrides& ov, const std::string& a_path, const std::string& t_path) {
  using namespace semihilb;
  const ToleranceConfig tol = ov.tolerance();
  const ContextPtr ctx = io::context_from_json(io::read_json_file(a_path), tol);
  json tj = io::read_json_file(t_path);
  if (tj.is_object() && tj.contains("t")) tj = tj.at("t");
  const Operator t(io::matrix_from_json(tj), ctx);

  json out = json::object();
  const bool bounded = in_BA_half(t, tol);
  const bool has_sharp = in_BA(t, tol);
  out["a_bounded"] = bounded;
  out["in_BA"] = has_sharp;
  out["a_norm"] = nullable(a_op_norm(t, tol));
  out["omega_A"] = bounded ? json(a_numerical_radius(t, tol)) : json(nullptr);
  out["r_A"] = bounded ? json(a_spectral_radius(t, tol)) : json(nullptr);
  out["sharp"] = has_sharp ? io::to_json(a_adjoint(t, tol).matrix()) : json(nullptr);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const Overrides& ov, const std::string& config_path, const std::string& out_dir,
               const std::string& format) {
  using namespace semihilb;
  json cj = io::read_json_file(config_path);
  CampaignConfig cfg = campaign_from_json(cj);
  ov.apply(cfg.tol);
  if (ov.trials) cfg.trials = *ov.trials;
  if (ov.parallelism) cfg.parallelism = *ov.parallelism;
  if (ov.seed)
    for (auto& g : cfg.gens) g.seed = *ov.seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (!format.empty()) cfg.format = format == "csv" ? ReportFormat::csv : ReportFormat::json;

  const CampaignSummary s = run_campaign(cfg);
  json summary{{"instances", s.instances}, {"violations", s.violations}, {"strict_refinements", s.strict_refinements}};
  summary["failures_by_check"] = s.failures_by_check;
  json gaps = json::object();
  for (BoundId id : kAllBounds) gaps[bound_key(id)] = s.min_gap[static_cast<int>(id)];
  summary["min_gap"] = std::move(gaps);
  summary["wall_seconds"] = s.wall_seconds;
  std::cout << summary.dump(2) << "\n";
  return s.ok() ? 0 : 1;
}

int cmd_bounds(const Overrides& ov, const std::string& blocks_path) {
  using namespace semihilb;
  const ToleranceConfig tol = ov.tolerance();
  const BlockMatrix bm = io::block_matrix_from_json(io::read_json_file(blocks_path), tol);
  const BoundReport r = evaluate_all(bm, tol, blocks_path);
  std::cout << io::report_to_json(r).dump(2) << "\n";
  return r.all_hold() && r.refinement_ok ? 0 : 1;
}

int cmd_selftest(const Overrides& ov) {
  const auto cases = semihilb::run_selftest(ov.trials.value_or(50), ov.seed.value_or(0));
  int failed = 0;
  for (const auto& c : cases) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name;
    if (!c.ok) {
      ++failed;
      std::cout << "  " << c.detail;
    }
    std::cout << "\n";
  }
  std::cout << cases.size() - failed << "/" << cases.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_generate(const Overrides& ov, semihilb::GenSpec spec, const std::string& ensemble) {
  using namespace semihilb;
  spec.ensemble = parse_ensemble(ensemble);
  if (ov.seed) spec.seed = *ov.seed;
  if (spec.rank == 0) spec.rank = spec.n;
  const BlockMatrix bm = gen_block_matrix(spec, ov.tolerance());
  std::cout << io::block_matrix_to_json(bm).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Hilbertian operator quantities and block numerical radius bounds"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  app.add_option("--seed", ov.seed, "Seed (replaces the seeds in a campaign config)")->envname("SEMIHILB_SEED");
  app.add_option("--trials", ov.trials, "Trials per generator spec")->envname("SEMIHILB_TRIALS");
  app.add_option("--rank-rtol", ov.rank_rtol, "Relative eigenvalue cutoff for A")->envname("SEMIHILB_RANK_RTOL");
  app.add_option("--cmp-atol", ov.cmp_atol, "Comparison slack")->envname("SEMIHILB_CMP_ATOL");
  app.add_option("--theta-samples", ov.theta_samples, "Grid size of the theta search")
      ->envname("SEMIHILB_THETA_SAMPLES");
  app.add_option("--parallelism", ov.parallelism, "Worker threads for campaigns")->envname("SEMIHILB_PARALLELISM");

  std::string a_path, t_path;
  auto* compute = app.add_subcommand("compute", "A-norm, A-numerical radius, A-spectral radius and A-adjoint of T");
  compute->add_option("--a", a_path, "JSON file holding A")->required();
  compute->add_option("--t", t_path, "JSON file holding T")->required();

  std::string config_path, out_dir, format;
  auto* verify = app.add_subcommand("verify", "Run a verification campaign");
  verify->add_option("--config", config_path, "Campaign JSON")->required();
  verify->add_option("--out", out_dir, "Report directory");
  verify->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::string blocks_path;
  auto* bounds = app.add_subcommand("bounds", "Evaluate every bound on one block matrix");
  bounds->add_option("--blocks", blocks_path, "Block matrix JSON")->required();

  auto* selftest = app.add_subcommand("selftest", "Golden values and equality-case suites");

  semihilb::GenSpec spec;
  spec.rank = 0;
  std::string ensemble = "ginibre";
  auto* generate = app.add_subcommand("generate", "Print a random block matrix as JSON");
  generate->add_option("--n", spec.n, "Block size");
  generate->add_option("--d", spec.d, "Number of block rows");
  generate->add_option("--rank", spec.rank, "Rank of A (default n)");
  generate->add_option("--ensemble", ensemble, "ginibre, sparse, nilpotent-lift, a-selfadjoint or zero");
  generate->add_option("--scale", spec.scale, "Scale factor for the blocks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compute) return cmd_compute(ov, a_path, t_path);
    if (*verify) return cmd_verify(ov, config_path, out_dir, format);
    if (*bounds) return cmd_bounds(ov, blocks_path);
    if (*selftest) return cmd_selftest(ov);
    if (*generate) return cmd_generate(ov, spec, ensemble);
  } catch (const semihilb::Error& e) {
    std::cerr << "error: " << semihilb::errc_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
