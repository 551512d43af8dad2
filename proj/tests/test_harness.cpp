#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + SEMIHILB_CLI + std::string(" ") + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semihilb_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CampaignConfig small_campaign() {
  CampaignConfig cfg;
  cfg.trials = 3;
  for (int d : {2, 3})
    for (Index n : {2, 3}) {
      GenSpec g;
      g.d = d;
      g.n = n;
      g.rank = n - 1;
      g.seed = 40;
      cfg.gens.push_back(g);
    }
  return cfg;
}

}  // namespace

TEST(Generators, PsdIsDeterministic) {
  auto a = gen_psd(4, 2, 123);
  auto b = gen_psd(4, 2, 123);
  EXPECT_EQ(max_abs(a->a() - b->a()), 0.0);
  EXPECT_GT(max_abs(a->a() - gen_psd(4, 2, 124)->a()), 0.0);
}

TEST(Generators, PsdRankAndSpectrum) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto c = gen_psd(2, 1, k);
    EXPECT_EQ(c->rank(), 1);
    EXPECT_NEAR(c->proj_range().trace().real(), 1.0, 1e-10);
    auto f = gen_psd(3, 3, k);
    EXPECT_EQ(f->rank(), 3);
    EXPECT_GE(f->eigvals().minCoeff(), 0.1 - 1e-12);
    EXPECT_LE(f->eigvals().maxCoeff(), 2.0 + 1e-12);
  }
  EXPECT_THROW(gen_psd(2, 3, 0), Error);
  EXPECT_THROW(gen_psd(2, 0, 0), Error);
}

TEST(Generators, CompatibleDrawsAreInBA) {
  for (Ensemble e : {Ensemble::ginibre, Ensemble::sparse, Ensemble::nilpotent_lift, Ensemble::a_selfadjoint,
                     Ensemble::zero})
    for (std::uint64_t k = 0; k < 100; ++k) EXPECT_TRUE(in_BA(draw(k, 6, e).t)) << ensemble_name(e);
}

TEST(Generators, NilpotentLiftSquaresToNull) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Draw d = draw(k, 6, Ensemble::nilpotent_lift);
    const Matrix& t = d.t.matrix();
    const double scale = 1.0 + d.ctx->norm() * linalg::spectral_norm(t) * linalg::spectral_norm(t);
    EXPECT_LE(linalg::spectral_norm(d.ctx->a() * t * t), 1e-10 * scale);
  }
}

TEST(Generators, SelfadjointEnsemble) {
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_TRUE(is_a_selfadjoint(draw(k, 6, Ensemble::a_selfadjoint).t));
}

TEST(Generators, RankOneStructure) {
  auto c = make_context(d2(1, 0));
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Matrix t = gen_compatible(c, k, Ensemble::ginibre).matrix();
    EXPECT_LT(std::abs(t(0, 1)), 1e-14);
    EXPECT_GT(std::abs(t(1, 0)), 0.0);
  }
}

TEST(Generators, FullRankIsUnconstrained) {
  auto c = gen_psd(3, 3, 1);
  const Matrix t = gen_compatible(c, 2, Ensemble::ginibre).matrix();
  EXPECT_GT(t.cwiseAbs().minCoeff(), 0.0);
}

TEST(Generators, AUnitary) {
  auto id = make_context(linalg::identity(3));
  const Matrix u = gen_a_unitary(id, 4).matrix();
  EXPECT_LT(max_abs(u.adjoint() * u - linalg::identity(3)), 1e-12);
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto c = draw(k, 5).ctx;
    const Operator w = gen_a_unitary(c, k);
    EXPECT_TRUE(is_a_unitary_on_samples(w, k + 1000));
    EXPECT_LT(max_abs(a_adjoint(w).matrix() * w.matrix() - c->proj_range()), 1e-10);
  }
}

TEST(Generators, EnsembleNames) {
  for (Ensemble e : {Ensemble::ginibre, Ensemble::sparse, Ensemble::nilpotent_lift, Ensemble::a_selfadjoint,
                     Ensemble::zero})
    EXPECT_EQ(parse_ensemble(ensemble_name(e)), e);
  EXPECT_THROW(parse_ensemble("gaussian"), Error);
}

TEST(Campaign, ZeroSpecShowsFloor) {
  CampaignConfig cfg;
  GenSpec g;
  g.ensemble = Ensemble::zero;
  g.d = 3;
  cfg.gens = {g};
  const CampaignSummary s = run_campaign(cfg);
  ASSERT_EQ(s.instances, 1u);
  EXPECT_TRUE(s.ok());
  EXPECT_NEAR(s.outcomes[0].report.bound(BoundId::r2), 0.75, 1e-12);
}

TEST(Campaign, RandomSpecsHaveNoViolations) {
  const CampaignSummary s = run_campaign(small_campaign());
  EXPECT_EQ(s.instances, 12u);
  EXPECT_EQ(s.violations, 0u);
  for (const auto& o : s.outcomes) EXPECT_TRUE(o.failed_checks.empty()) << o.report.instance_id;
}

TEST(Campaign, ParallelRunMatchesSerial) {
  CampaignConfig a = small_campaign();
  CampaignConfig b = small_campaign();
  b.parallelism = 3;
  const CampaignSummary sa = run_campaign(a);
  const CampaignSummary sb = run_campaign(b);
  ASSERT_EQ(sa.outcomes.size(), sb.outcomes.size());
  for (std::size_t k = 0; k < sa.outcomes.size(); ++k)
    EXPECT_EQ(io::report_to_json(sa.outcomes[k].report).dump(), io::report_to_json(sb.outcomes[k].report).dump());
}

TEST(Campaign, CorruptedBoundIsNamed) {
  CampaignConfig cfg = small_campaign();
  cfg.bound_hook = [](std::array<double, 7>& b) { b[static_cast<int>(BoundId::re_im)] = -1.0; };
  const CampaignSummary s = run_campaign(cfg);
  EXPECT_FALSE(s.ok());
  EXPECT_EQ(s.violations, s.instances);
  EXPECT_EQ(s.failures_by_check.at("B5_re_im"), s.instances);
  EXPECT_EQ(s.failures_by_check.size(), 1u);
}

TEST(Campaign, WritesReports) {
  const fs::path dir = scratch("reports");
  CampaignConfig cfg = small_campaign();
  cfg.output_dir = dir.string();
  run_campaign(cfg);
  EXPECT_TRUE(fs::exists(dir / "reports.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  cfg.format = ReportFormat::csv;
  run_campaign(cfg);
  const std::string csv = slurp(dir / "reports.csv");
  EXPECT_EQ(csv.rfind("instance_id,omega,B1_thf1", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(Campaign, ConfigValidation) {
  EXPECT_THROW(campaign_from_json(io::json::parse(R"({"trials": 1})")), Error);
  EXPECT_THROW(campaign_from_json(io::json::parse(R"({"trials": 0, "gens": [{"n": 2}]})")), Error);
  EXPECT_THROW(campaign_from_json(io::json::parse(R"({"gens": [{"n": 2, "rank": 3}]})")), Error);
  EXPECT_THROW(campaign_from_json(io::json::parse(R"({"gens": [{"n": 2}], "tol": {"theta_samples": 4}})")), Error);
  const CampaignConfig cfg = campaign_from_json(io::json::parse(
      R"({"trials": 2, "gens": [{"n": 3, "d": 2, "rank": 2, "ensemble": "sparse", "seed": 9}],
          "output": {"path": "x", "format": "csv"}, "parallelism": 2})"));
  EXPECT_EQ(cfg.trials, 2);
  EXPECT_EQ(cfg.gens[0].ensemble, Ensemble::sparse);
  EXPECT_EQ(cfg.format, ReportFormat::csv);
  EXPECT_EQ(cfg.parallelism, 2);
}

TEST(Io, BlockMatrixRoundTrip) {
  GenSpec g;
  g.n = 3;
  g.rank = 2;
  g.seed = 5;
  const BlockMatrix bm = gen_block_matrix(g);
  const BlockMatrix back = io::block_matrix_from_json(io::json::parse(io::block_matrix_to_json(bm).dump()));
  for (std::size_t k = 0; k < bm.blocks().size(); ++k) EXPECT_EQ(max_abs(back.blocks()[k] - bm.blocks()[k]), 0.0);
  EXPECT_THROW(io::block_matrix_from_json(io::json::parse(R"({"d": 1, "n": 2})")), Error);
}

TEST(Selftest, AllCasesPass) {
  for (const auto& c : run_selftest(20)) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
}

TEST(Cli, Compute) {
  const fs::path dir = scratch("compute");
  write(dir / "a.json", R"({"a": [[1, 0], [0, 0]]})");
  write(dir / "t.json", R"([[[1,0],[0,0]],[[3,0],[4,0]]])");
  const RunResult r = run("compute --a " + (dir / "a.json").string() + " --t " + (dir / "t.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = io::json::parse(r.out);
  EXPECT_NEAR(j["a_norm"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["omega_A"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(j["r_A"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(j["sharp"].size(), 2u);

  write(dir / "u.json", "[[0, 1], [0, 0]]");
  const RunResult bad = run("compute --a " + (dir / "a.json").string() + " --t " + (dir / "u.json").string());
  ASSERT_EQ(bad.status, 0) << bad.out;
  const auto jb = io::json::parse(bad.out);
  EXPECT_TRUE(jb["a_norm"].is_null());
  EXPECT_FALSE(jb["a_bounded"].get<bool>());
}

TEST(Cli, BoundsOnWitness) {
  const fs::path dir = scratch("bounds");
  write(dir / "tt.json", R"({"d": 2, "n": 2, "a": [[1,0],[0,1]],
    "blocks": [[[0,0],[0,0]], [[1,0],[0,1]], [[0,0],[0,0]], [[0,0],[0,0]]]})");
  const RunResult r = run("bounds --blocks " + (dir / "tt.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = io::json::parse(r.out);
  EXPECT_NEAR(j["omega"].get<double>(), 0.5, 1e-9);
  EXPECT_NEAR(j["bounds"]["B2_r2"].get<double>(), 0.75, 1e-9);
  EXPECT_TRUE(j["all_hold"].get<bool>());
}

TEST(Cli, VerifyIsDeterministicAndHonoursOverrides) {
  const fs::path dir = scratch("verify");
  write(dir / "c.json", R"({"trials": 2, "gens": [{"n": 2, "d": 2, "rank": 1, "seed": 3}]})");
  const std::string cfg = (dir / "c.json").string();
  const RunResult a = run("verify --config " + cfg + " --out " + (dir / "a").string());
  const RunResult b = run("verify --config " + cfg + " --out " + (dir / "b").string() + " --parallelism 2");
  ASSERT_EQ(a.status, 0) << a.out;
  ASSERT_EQ(b.status, 0) << b.out;
  EXPECT_EQ(slurp(dir / "a" / "reports.jsonl"), slurp(dir / "b" / "reports.jsonl"));

  const RunResult c = run("verify --config " + cfg + " --out " + (dir / "c").string() + " --format csv --trials 3");
  ASSERT_EQ(c.status, 0) << c.out;
  const std::string csv = slurp(dir / "c" / "reports.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  const RunResult s = run("verify --config " + cfg + " --out " + (dir / "s").string() + " --seed 77");
  ASSERT_EQ(s.status, 0) << s.out;
  EXPECT_NE(slurp(dir / "s" / "reports.jsonl").find("-s77"), std::string::npos);
}

TEST(Cli, EnvironmentOverrides) {
  const fs::path dir = scratch("env");
  write(dir / "c.json", R"({"trials": 1, "gens": [{"n": 2, "d": 2, "rank": 2}]})");
  const std::string args = "verify --config " + (dir / "c.json").string();
  EXPECT_EQ(run(args, "SEMIHILB_THETA_SAMPLES=4").status, 2);
  EXPECT_EQ(run(args, "SEMIHILB_TRIALS=2").status, 0);
  const RunResult r = run(args + " --out " + (dir / "o").string(), "SEMIHILB_TRIALS=2");
  const std::string body = slurp(dir / "o" / "reports.jsonl");
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 2);
}

TEST(Cli, SelftestAndErrors) {
  const RunResult r = run("selftest --trials 10");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(run("compute --a /nonexistent.json --t /nonexistent.json").status, 0);
  EXPECT_NE(run("").status, 0);
}
