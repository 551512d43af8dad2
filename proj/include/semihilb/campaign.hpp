#pragma once

#include "semihilb/bounds.hpp"
#include "semihilb/generators.hpp"
#include "semihilb/io.hpp"
#include "semihilb/radii.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace semihilb {

enum class ReportFormat { json, csv };

struct CampaignConfig {
  int trials = 1;
  std::vector<GenSpec> gens;
  ToleranceConfig tol;
  std::string output_dir;  // empty: keep results in memory only
  ReportFormat format = ReportFormat::json;
  int parallelism = 1;
  BoundHook bound_hook;  // test-only corruption hook

  void validate() const {
    if (trials < 1) throw Error(Errc::invalid_config, "trials must be >= 1");
    if (gens.empty()) throw Error(Errc::invalid_config, "campaign needs at least one generator spec");
    if (parallelism < 1) throw Error(Errc::invalid_config, "parallelism must be >= 1");
    tol.validate();
    for (const auto& g : gens) g.validate();
  }
};

struct InstanceOutcome {
  BoundReport report;
  std::vector<std::string> failed_checks;
};

struct CampaignSummary {
  std::size_t instances = 0;
  std::size_t violations = 0;  // instances with at least one failed check
  std::map<std::string, std::size_t> failures_by_check;
  std::array<double, 7> min_gap{};
  std::size_t strict_refinements = 0;  // instances with B3 < B7 - 1e-3
  double wall_seconds = 0.0;
  std::vector<InstanceOutcome> outcomes;

  bool ok() const { return violations == 0; }
};

inline std::string instance_id(const GenSpec& g, int trial) {
  return "d" + std::to_string(g.d) + "-n" + std::to_string(g.n) + "-r" + std::to_string(g.rank) + "-" +
         ensemble_name(g.ensemble) + "-s" + std::to_string(g.seed + static_cast<std::uint64_t>(trial));
}

/// Bounds plus the per-instance operator invariants on the assembled matrix.
inline InstanceOutcome check_instance(const BlockMatrix& bm, const ToleranceConfig& tol, const std::string& id,
                                      const BoundHook& hook = {}) {
  InstanceOutcome out;
  try {
    out.report = evaluate_all(bm, tol, id, hook);
  } catch (const Error& e) {
    out.report.instance_id = id;
    out.failed_checks.push_back(std::string("error:") + errc_name(e.code()));
    return out;
  }
  const BoundReport& r = out.report;
  for (BoundId b : kAllBounds)
    if (!r.held(b)) out.failed_checks.push_back(bound_key(b));
  if (!r.refinement_ok) out.failed_checks.push_back("refinement");

  try {
    auto fail_unless = [&](bool ok, const char* name) {
      if (!ok) out.failed_checks.push_back(name);
    };
    const Operator t = flatten(bm);
    const double omega = r.omega;
    const double norm = a_op_norm(t, tol);
    const double slack = tol.cmp_atol * (1.0 + norm);
    fail_unless(0.5 * norm <= omega + slack && omega <= norm + slack, "norm_equivalence");
    fail_unless(omega <= 0.5 * (norm + std::sqrt(a_op_norm(t * t, tol))) + slack, "square_refinement");
    const double spec = a_spectral_radius(t, tol);
    fail_unless(spec <= omega + slack, "spectral_domination");

    const RealMatrix hat = hat_matrix(bm, tol);
    fail_unless(spec <= classical_spectral_radius(hat.cast<Complex>()) + slack, "spectral_hat");
    fail_unless(norm <= linalg::spectral_norm(hat.cast<Complex>()) + slack, "norm_hat");

    const Operator sharp = a_adjoint(t, tol);
    const PsdContext& c = t.context();
    const double scale = 1.0 + c.norm() * linalg::spectral_norm(t.matrix());
    fail_unless(linalg::spectral_norm(c.a() * sharp.matrix() - t.matrix().adjoint() * c.a()) <= 1e-9 * scale,
                "douglas");
    fail_unless(linalg::max_abs(flatten(block_sharp(bm, tol)).matrix() - sharp.matrix()) <=
                    1e-10 * (1.0 + linalg::max_abs(sharp.matrix())),
                "block_sharp_route");
    const double re = a_op_norm(re_A(t, tol), tol);
    const double im = a_op_norm(im_A(t, tol), tol);
    fail_unless(omega <= std::sqrt(re * re + im * im) + slack, "cartesian");
  } catch (const Error& e) {
    out.failed_checks.push_back(std::string("error:") + errc_name(e.code()));
  }
  return out;
}

namespace detail {

inline void write_campaign_files(const CampaignConfig& cfg, const CampaignSummary& s) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + cfg.output_dir + ": " + ec.message());
  const fs::path dir(cfg.output_dir);

  std::string body;
  if (cfg.format == ReportFormat::json) {
    for (const auto& o : s.outcomes) {
      auto j = io::report_to_json(o.report);
      j["failed_checks"] = o.failed_checks;
      body += j.dump() + "\n";
    }
    io::write_text_file((dir / "reports.jsonl").string(), body);
  } else {
    body = io::report_csv_header() + ",failed_checks\n";
    for (const auto& o : s.outcomes) {
      std::string checks;
      for (const auto& c : o.failed_checks) checks += (checks.empty() ? "" : ";") + c;
      body += io::report_csv_row(o.report) + "," + checks + "\n";
    }
    io::write_text_file((dir / "reports.csv").string(), body);
  }

  io::json summary{{"instances", s.instances}, {"violations", s.violations}};
  summary["failures_by_check"] = s.failures_by_check;
  io::json gaps = io::json::object();
  for (BoundId id : kAllBounds) gaps[bound_key(id)] = s.min_gap[static_cast<int>(id)];
  summary["min_gap"] = std::move(gaps);
  summary["strict_refinements"] = s.strict_refinements;
  summary["wall_seconds"] = s.wall_seconds;
  io::write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
}

}  // namespace detail

/// Runs trials x gens instances. Trial t of a spec uses seed spec.seed + t.
/// Instances are distributed over `parallelism` threads; results are stored
/// by instance index so output order never depends on scheduling.
inline CampaignSummary run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  struct Job {
    GenSpec spec;
    int trial;
  };
  std::vector<Job> jobs;
  for (const auto& g : cfg.gens)
    for (int t = 0; t < cfg.trials; ++t) jobs.push_back({g, t});

  CampaignSummary s;
  s.outcomes.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      GenSpec spec = jobs[k].spec;
      spec.seed += static_cast<std::uint64_t>(jobs[k].trial);
      const std::string id = instance_id(jobs[k].spec, jobs[k].trial);
      try {
        const BlockMatrix bm = gen_block_matrix(spec, cfg.tol);
        s.outcomes[k] = check_instance(bm, cfg.tol, id, cfg.bound_hook);
      } catch (const Error& e) {
        s.outcomes[k].report.instance_id = id;
        s.outcomes[k].failed_checks = {std::string("error:") + errc_name(e.code())};
      }
    }
  };
  const int threads = std::min<int>(cfg.parallelism, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  s.instances = jobs.size();
  s.min_gap.fill(std::numeric_limits<double>::infinity());
  for (const auto& o : s.outcomes) {
    if (!o.failed_checks.empty()) ++s.violations;
    for (const auto& c : o.failed_checks) ++s.failures_by_check[c];
    for (int k = 0; k < 7; ++k) s.min_gap[k] = std::min(s.min_gap[k], o.report.gaps[k]);
    if (o.report.bound(BoundId::th2) < o.report.bound(BoundId::prior) - 1e-3) ++s.strict_refinements;
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!cfg.output_dir.empty()) detail::write_campaign_files(cfg, s);
  return s;
}

inline CampaignConfig campaign_from_json(const io::json& j) {
  CampaignConfig cfg;
  cfg.trials = j.value("trials", 1);
  if (!j.contains("gens") || !j.at("gens").is_array())
    throw Error(Errc::invalid_config, "campaign config needs a 'gens' array");
  for (const auto& g : j.at("gens")) cfg.gens.push_back(io::gen_spec_from_json(g));
  if (j.contains("tol")) cfg.tol = io::tolerance_from_json(j.at("tol"));
  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.output_dir = o.value("path", std::string{});
    const std::string fmt = o.value("format", std::string("json"));
    if (fmt == "json") cfg.format = ReportFormat::json;
    else if (fmt == "csv") cfg.format = ReportFormat::csv;
    else throw Error(Errc::invalid_config, "format must be json or csv");
  }
  cfg.parallelism = j.value("parallelism", 1);
  cfg.validate();
  return cfg;
}

}  // namespace semihilb
