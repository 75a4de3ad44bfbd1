#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "mubcv/mubcv.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  mubcv_string_free(s);
  return out;
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / ("mubcv_capi_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

mubcv_run_config* small_config() {
  mubcv_run_config* c = nullptr;
  EXPECT_EQ(mubcv_run_config_parse(R"({"scan": {"n_bins_per_axis": 40, "roi_m": 0.0032}})", &c), MUBCV_OK)
      << mubcv_last_error();
  return c;
}

}  // namespace

TEST(CApi, StatusStringsAndVersion) {
  EXPECT_STREQ(mubcv_status_string(MUBCV_OK), "ok");
  EXPECT_STREQ(mubcv_status_string(MUBCV_ERR_FIT_FAILURE), "fit failure");
  EXPECT_STREQ(mubcv_status_string(static_cast<mubcv_status>(99)), "unknown status");
  EXPECT_STREQ(mubcv_version(), "1.0.0");
  mubcv_string_free(nullptr);
}

TEST(CApi, NullArguments) {
  EXPECT_EQ(mubcv_state_vacuum(1, nullptr), MUBCV_ERR_NULL_ARGUMENT);
  EXPECT_NE(std::string(mubcv_last_error()).find("out"), std::string::npos);
  double d = 0;
  EXPECT_EQ(mubcv_triple_product(nullptr, 0, &d), MUBCV_ERR_NULL_ARGUMENT);
  mubcv_state* st = nullptr;
  EXPECT_EQ(mubcv_state_from_json(nullptr, &st), MUBCV_ERR_NULL_ARGUMENT);
  EXPECT_EQ(st, nullptr);
  mubcv_criterion crit;
  const double v[3] = {1, 1, 1};
  EXPECT_EQ(mubcv_evaluate_criterion(nullptr, v, MUBCV_SIGN_MINUS, &crit), MUBCV_ERR_NULL_ARGUMENT);
  EXPECT_EQ(mubcv_evaluate_criterion(v, v, MUBCV_SIGN_MINUS, nullptr), MUBCV_ERR_NULL_ARGUMENT);
  EXPECT_EQ(mubcv_grid_save(nullptr, "x.csv"), MUBCV_ERR_NULL_ARGUMENT);
  mubcv_state_free(nullptr);
  mubcv_grid_free(nullptr);
  mubcv_wavefunction_free(nullptr);
  mubcv_run_config_free(nullptr);
}

TEST(CApi, LastErrorIsClearedOnSuccess) {
  mubcv_state* st = nullptr;
  EXPECT_EQ(mubcv_state_spdc(-1, 1, &st), MUBCV_ERR_INVALID_INPUT);
  EXPECT_STRNE(mubcv_last_error(), "");
  EXPECT_EQ(mubcv_state_vacuum(2, &st), MUBCV_OK);
  EXPECT_STREQ(mubcv_last_error(), "");
  mubcv_state_free(st);
}

TEST(CApi, StateRoundTrip) {
  mubcv_state* st = nullptr;
  ASSERT_EQ(mubcv_state_from_json(R"({"cov": [[2, 0], [0, 0.125]]})", &st), MUBCV_OK);
  size_t n = 0;
  ASSERT_EQ(mubcv_state_n_modes(st, &n), MUBCV_OK);
  EXPECT_EQ(n, 1u);
  int phys = 0;
  ASSERT_EQ(mubcv_state_is_physical(st, &phys), MUBCV_OK);
  EXPECT_EQ(phys, 1);
  double t = 0;
  ASSERT_EQ(mubcv_triple_product(st, 0, &t), MUBCV_OK);
  EXPECT_NEAR(t, 0.705078125, 1e-15);
  char* text = nullptr;
  ASSERT_EQ(mubcv_state_to_json(st, &text), MUBCV_OK);
  const auto doc = json::parse(take(text));
  EXPECT_EQ(doc.at("cov")[0][0], 2.0);
  mubcv_state_free(st);

  EXPECT_EQ(mubcv_state_from_json("{not json", &st), MUBCV_ERR_PARSE);
  EXPECT_EQ(mubcv_state_from_json(R"({"cov": [[1]]})", &st), MUBCV_ERR_INVALID_INPUT);
  EXPECT_EQ(mubcv_state_load("/nonexistent/state.json", &st), MUBCV_ERR_IO);
}

TEST(CApi, UncertaintyReport) {
  mubcv_state* st = nullptr;
  ASSERT_EQ(mubcv_state_spdc(2, 0.5, &st), MUBCV_OK);
  char* text = nullptr;
  int ok = -1;
  ASSERT_EQ(mubcv_check_ur(st, &text, &ok), MUBCV_OK);
  EXPECT_EQ(ok, 1);
  const auto doc = json::parse(take(text));
  EXPECT_EQ(doc.at("n_modes"), 2);
  EXPECT_NEAR(doc.at("criterion").at("minus").at("product").get<double>(), 0.015625, 1e-12);
  EXPECT_TRUE(doc.at("criterion").at("minus").at("entangled").get<bool>());
  bool saw_global = false;
  for (const auto& r : doc.at("reports")) saw_global |= r.at("name") == "global_xrs_minus";
  EXPECT_TRUE(saw_global);
  mubcv_state_free(st);

  ASSERT_EQ(mubcv_state_from_json(R"({"cov": [[0.1, 0], [0, 0.1]]})", &st), MUBCV_OK);
  ASSERT_EQ(mubcv_check_ur(st, &text, &ok), MUBCV_OK);
  EXPECT_EQ(ok, 0);
  EXPECT_FALSE(json::parse(take(text)).at("physical").get<bool>());
  mubcv_state_free(st);
}

TEST(CApi, Optimizer) {
  mubcv_optimizer_result r;
  ASSERT_EQ(mubcv_minimize_g(3.0, &r), MUBCV_OK);
  EXPECT_EQ(r.converged, 1);
  EXPECT_NEAR(r.eta, 0.5, 1e-6);
  EXPECT_NEAR(r.g_min, 0.125, 1e-10);
  EXPECT_EQ(mubcv_minimize_g(-1, &r), MUBCV_ERR_INVALID_INPUT);
  char* text = nullptr;
  ASSERT_EQ(mubcv_g_sat_scan(0.1, 2.0, 39, &text), MUBCV_OK);
  const auto rows = json::parse(take(text));
  ASSERT_EQ(rows.size(), 39u);
  for (const auto& row : rows) EXPECT_GE(row.at("margin").get<double>(), -1e-15);
  EXPECT_EQ(mubcv_g_sat_scan(2.0, 1.0, 10, &text), MUBCV_ERR_INVALID_INPUT);
}

TEST(CApi, Criterion) {
  const double v[3] = {0.74, 0.2455, 0.225};
  const double u[3] = {0.02, 0.0006, 0.001};
  mubcv_criterion c;
  ASSERT_EQ(mubcv_evaluate_criterion(v, u, MUBCV_SIGN_MINUS, &c), MUBCV_OK);
  EXPECT_NEAR(c.product, 0.74 * 0.2455 * 0.225, 1e-15);
  EXPECT_EQ(c.entangled, 1);
  EXPECT_EQ(c.bound, 1.0);
  EXPECT_EQ(mubcv_evaluate_criterion(v, u, static_cast<mubcv_sign>(5), &c), MUBCV_ERR_INVALID_INPUT);
}

TEST(CApi, Wavefunction) {
  const size_t n = 128;
  const double dq = std::sqrt(2 * M_PI / n);
  std::vector<double> re(n), im(n, 0.0);
  double norm = 0;
  for (size_t k = 0; k < n; ++k) {
    const double q = (double(k) - double(n / 2)) * dq;
    re[k] = std::exp(-q * q / 2);
    norm += re[k] * re[k] * dq;
  }
  for (auto& x : re) x /= std::sqrt(norm);
  mubcv_wavefunction* psi = nullptr;
  ASSERT_EQ(mubcv_wavefunction_create(n, dq, re.data(), im.data(), &psi), MUBCV_OK);
  double var = 0;
  ASSERT_EQ(mubcv_rotated_variance(psi, 2 * M_PI / 3, &var), MUBCV_OK);
  EXPECT_NEAR(var, 0.5, 1e-10);
  mubcv_wavefunction* out = nullptr;
  ASSERT_EQ(mubcv_frft(psi, M_PI / 2, &out), MUBCV_OK);
  std::vector<double> ore(n), oim(n);
  ASSERT_EQ(mubcv_wavefunction_amplitudes(out, ore.data(), oim.data(), n), MUBCV_OK);
  for (size_t k = 0; k < n; ++k) EXPECT_NEAR(ore[k], re[k], 1e-10);
  EXPECT_EQ(mubcv_wavefunction_amplitudes(out, ore.data(), oim.data(), n - 1), MUBCV_ERR_INVALID_INPUT);

  const auto dir = temp_dir();
  const auto path = (dir / "psi.csv").string();
  ASSERT_EQ(mubcv_wavefunction_write_csv(out, path.c_str()), MUBCV_OK);
  mubcv_wavefunction* back = nullptr;
  ASSERT_EQ(mubcv_wavefunction_read_csv(path.c_str(), &back), MUBCV_OK);
  size_t bn = 0;
  double bdq = 0;
  ASSERT_EQ(mubcv_wavefunction_size(back, &bn, &bdq), MUBCV_OK);
  EXPECT_EQ(bn, n);
  EXPECT_NEAR(bdq, dq, 1e-14);
  mubcv_wavefunction_free(back);
  mubcv_wavefunction_free(out);
  mubcv_wavefunction_free(psi);
  fs::remove_all(dir);

  re[0] = 10;
  EXPECT_EQ(mubcv_wavefunction_create(n, dq, re.data(), im.data(), &psi), MUBCV_ERR_INVALID_INPUT);
}

TEST(CApi, RunConfig) {
  mubcv_run_config* c = nullptr;
  ASSERT_EQ(mubcv_run_config_default(&c), MUBCV_OK);
  double sp = 0, sm = 0;
  ASSERT_EQ(mubcv_run_config_spdc(c, &sp, &sm), MUBCV_OK);
  EXPECT_EQ(sp, 35.0);
  EXPECT_EQ(sm, 0.7);
  ASSERT_EQ(mubcv_run_config_set_planes(c, "v,x"), MUBCV_OK);
  char* text = nullptr;
  ASSERT_EQ(mubcv_run_config_planes(c, &text), MUBCV_OK);
  EXPECT_EQ(take(text), "v,x");
  EXPECT_EQ(mubcv_run_config_set_planes(c, "x,x"), MUBCV_ERR_INVALID_INPUT);
  EXPECT_EQ(mubcv_run_config_set_planes(c, "x,q"), MUBCV_ERR_INVALID_INPUT);
  ASSERT_EQ(mubcv_run_config_set_seed(c, 77), MUBCV_OK);
  ASSERT_EQ(mubcv_run_config_to_json(c, &text), MUBCV_OK);
  EXPECT_EQ(json::parse(take(text)).at("seed"), 77);
  mubcv_run_config_free(c);
  EXPECT_EQ(mubcv_run_config_parse(R"({"bogus": 1})", &c), MUBCV_ERR_PARSE);
  EXPECT_NE(std::string(mubcv_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(mubcv_run_config_load("/nonexistent/cfg.json", &c), MUBCV_ERR_IO);
}

TEST(CApi, SimulateSaveLoadAnalyze) {
  mubcv_run_config* c = small_config();
  mubcv_grid* g = nullptr;
  ASSERT_EQ(mubcv_simulate_plane(c, "x", &g), MUBCV_OK);
  size_t n = 0;
  ASSERT_EQ(mubcv_grid_size(g, &n), MUBCV_OK);
  EXPECT_EQ(n, 40u);
  uint64_t total = 0;
  ASSERT_EQ(mubcv_grid_total(g, &total), MUBCV_OK);
  std::vector<uint64_t> counts(n * n);
  ASSERT_EQ(mubcv_grid_counts(g, counts.data(), counts.size()), MUBCV_OK);
  uint64_t sum = 0;
  for (auto k : counts) sum += k;
  EXPECT_EQ(sum, total);
  EXPECT_GT(total, 0u);

  ASSERT_EQ(mubcv_run_config_set_threads(c, 4), MUBCV_OK);
  mubcv_grid* g4 = nullptr;
  ASSERT_EQ(mubcv_simulate_plane(c, "x", &g4), MUBCV_OK);
  std::vector<uint64_t> counts4(n * n);
  ASSERT_EQ(mubcv_grid_counts(g4, counts4.data(), counts4.size()), MUBCV_OK);
  EXPECT_EQ(counts, counts4);
  mubcv_grid_free(g4);

  const auto dir = temp_dir();
  for (const char* name : {"g.csv", "g.json"}) {
    const auto path = (dir / name).string();
    ASSERT_EQ(mubcv_grid_save(g, path.c_str()), MUBCV_OK);
    mubcv_grid* back = nullptr;
    ASSERT_EQ(mubcv_grid_load(path.c_str(), &back), MUBCV_OK);
    std::vector<uint64_t> bc(n * n);
    ASSERT_EQ(mubcv_grid_counts(back, bc.data(), bc.size()), MUBCV_OK);
    EXPECT_EQ(bc, counts);
    mubcv_grid_free(back);
  }
  fs::remove_all(dir);

  char* text = nullptr;
  ASSERT_EQ(mubcv_analyze(g, MUBCV_SIGN_MINUS, &text), MUBCV_OK);
  const auto doc = json::parse(take(text));
  EXPECT_EQ(doc.at("plane"), "x");
  EXPECT_NEAR(doc.at("variance").at("value").get<double>(), 0.49, 0.1);
  EXPECT_EQ(mubcv_simulate_plane(c, "w", &g4), MUBCV_ERR_INVALID_INPUT);
  mubcv_grid_free(g);
  mubcv_run_config_free(c);
}

TEST(CApi, CertifyAndZeroSignal) {
  mubcv_run_config* c = nullptr;
  mubcv_grid* gx = nullptr;
  mubcv_grid* gu = nullptr;
  mubcv_grid* gv = nullptr;
  ASSERT_EQ(mubcv_run_config_default(&c), MUBCV_OK);
  ASSERT_EQ(mubcv_simulate_plane(c, "x", &gx), MUBCV_OK);
  ASSERT_EQ(mubcv_simulate_plane(c, "u", &gu), MUBCV_OK);
  ASSERT_EQ(mubcv_simulate_plane(c, "v", &gv), MUBCV_OK);
  char* text = nullptr;
  int em = -1, ep = -1;
  ASSERT_EQ(mubcv_certify(gx, gu, gv, &text, &em, &ep), MUBCV_OK) << mubcv_last_error();
  const auto doc = json::parse(take(text));
  EXPECT_EQ(em, 1);
  EXPECT_EQ(ep, 0);
  EXPECT_EQ(doc.at("rows").size(), 3u);
  EXPECT_TRUE(doc.at("minus").at("entangled").get<bool>());
  mubcv_grid_free(gx);
  mubcv_grid_free(gu);
  mubcv_grid_free(gv);
  mubcv_run_config_free(c);


  ASSERT_EQ(mubcv_run_config_parse(R"({"scan": {"n_bins_per_axis": 40, "pair_rate": 0}})", &c),
            MUBCV_OK);
  ASSERT_EQ(mubcv_simulate_plane(c, "x", &gx), MUBCV_OK);
  EXPECT_EQ(mubcv_analyze(gx, MUBCV_SIGN_MINUS, &text), MUBCV_ERR_INVALID_INPUT);
  EXPECT_EQ(text, nullptr);
  mubcv_grid_free(gx);
  mubcv_run_config_free(c);
}
