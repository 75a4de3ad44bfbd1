#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mubcv/mubcv.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct Failure {
  std::string message;
};

void check(mubcv_status status, const std::string& context) {
  if (status != MUBCV_OK) {
    throw Failure{context + ": " + mubcv_last_error()};
  }
}

struct StringDeleter {
  void operator()(char* s) const { mubcv_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct StateDeleter {
  void operator()(mubcv_state* s) const { mubcv_state_free(s); }
};
struct WaveDeleter {
  void operator()(mubcv_wavefunction* w) const { mubcv_wavefunction_free(w); }
};
struct ConfigDeleter {
  void operator()(mubcv_run_config* c) const { mubcv_run_config_free(c); }
};
struct GridDeleter {
  void operator()(mubcv_grid* g) const { mubcv_grid_free(g); }
};
using State = std::unique_ptr<mubcv_state, StateDeleter>;
using Wave = std::unique_ptr<mubcv_wavefunction, WaveDeleter>;
using Config = std::unique_ptr<mubcv_run_config, ConfigDeleter>;
using Grid = std::unique_ptr<mubcv_grid, GridDeleter>;

std::string take(char* raw) {
  CString s(raw);
  return s ? std::string(s.get()) : std::string();
}

// Accepts plain numbers and multiples of pi such as "pi/2", "2pi/3", "-pi".
double parse_angle(const std::string& text) {
  const auto pos = text.find("pi");
  try {
    if (pos == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    std::string coef = text.substr(0, pos);
    double factor = 1.0;
    if (coef == "-") {
      factor = -1.0;
    } else if (!coef.empty() && coef != "+") {
      if (coef.back() == '*') coef.pop_back();
      std::size_t used = 0;
      factor = std::stod(coef, &used);
      if (used != coef.size()) throw std::invalid_argument(text);
    }
    double divisor = 1.0;
    const std::string rest = text.substr(pos + 2);
    if (!rest.empty()) {
      if (rest[0] != '/') throw std::invalid_argument(text);
      std::size_t used = 0;
      divisor = std::stod(rest.substr(1), &used);
      if (used != rest.size() - 1 || divisor == 0.0) throw std::invalid_argument(text);
    }
    return factor * M_PI / divisor;
  } catch (const std::logic_error&) {
    throw Failure{"cannot parse angle '" + text + "'"};
  }
}

std::vector<mubcv_sign> parse_signs(const std::string& text) {
  if (text == "minus") return {MUBCV_SIGN_MINUS};
  if (text == "plus") return {MUBCV_SIGN_PLUS};
  if (text == "both") return {MUBCV_SIGN_MINUS, MUBCV_SIGN_PLUS};
  throw Failure{"--sign must be plus, minus or both"};
}

const char* sign_name(mubcv_sign s) { return s == MUBCV_SIGN_PLUS ? "plus" : "minus"; }

// ---------------------------------------------------------------- ur

struct UrOptions {
  std::string state_path;
  std::string config_path;
  std::optional<double> sigma_plus, sigma_minus;
};

int run_ur(const UrOptions& o) {
  mubcv_state* raw = nullptr;
  const int sources = (!o.state_path.empty()) + (!o.config_path.empty()) +
                      (o.sigma_plus.has_value() || o.sigma_minus.has_value());
  if (sources != 1) {
    throw Failure{"give exactly one of --state, --config or --sigma-plus/--sigma-minus"};
  }
  if (!o.state_path.empty()) {
    check(mubcv_state_load(o.state_path.c_str(), &raw), "reading state");
  } else if (!o.config_path.empty()) {
    mubcv_run_config* cfg_raw = nullptr;
    check(mubcv_run_config_load(o.config_path.c_str(), &cfg_raw), "reading config");
    Config cfg(cfg_raw);
    double sp = 0.0, sm = 0.0;
    check(mubcv_run_config_spdc(cfg.get(), &sp, &sm), "reading config");
    check(mubcv_state_spdc(sp, sm, &raw), "building state");
  } else {
    if (!o.sigma_plus || !o.sigma_minus) throw Failure{"both --sigma-plus and --sigma-minus are needed"};
    check(mubcv_state_spdc(*o.sigma_plus, *o.sigma_minus, &raw), "building state");
  }
  State state(raw);
  char* report = nullptr;
  int ok = 0;
  check(mubcv_check_ur(state.get(), &report, &ok), "checking relations");
  std::cout << take(report) << '\n';
  if (!ok) {
    std::cerr << "uncertainty relation violated: the state is not physical\n";
    return kExitViolation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeOptions {
  double initial_eta = 1.0;
  bool grid_scan = false;
  double scan_min = 0.1;
  double scan_max = 2.0;
  std::size_t scan_points = 39;
};

int run_optimize(const OptimizeOptions& o) {
  mubcv_optimizer_result r{};
  check(mubcv_minimize_g(o.initial_eta, &r), "minimizing");
  json doc{{"eta", r.eta},
           {"xi", r.xi},
           {"g_min", r.g_min},
           {"iterations", r.iterations},
           {"converged", r.converged != 0}};
  if (o.grid_scan) {
    char* table = nullptr;
    check(mubcv_g_sat_scan(o.scan_min, o.scan_max, o.scan_points, &table), "scanning");
    doc["grid_scan"] = json::parse(take(table));
  }
  std::cout << doc.dump(2) << '\n';
  return r.converged ? kExitOk : kExitError;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string planes;
  std::optional<unsigned> threads;
  std::string format = "csv";
};

int run_simulate(const SimulateOptions& o) {
  mubcv_run_config* raw = nullptr;
  if (o.config_path.empty()) {
    check(mubcv_run_config_default(&raw), "default config");
  } else {
    check(mubcv_run_config_load(o.config_path.c_str(), &raw), "reading config");
  }
  Config cfg(raw);
  if (o.seed) check(mubcv_run_config_set_seed(cfg.get(), *o.seed), "--seed");
  if (o.threads) check(mubcv_run_config_set_threads(cfg.get(), *o.threads), "--threads");
  if (!o.planes.empty()) check(mubcv_run_config_set_planes(cfg.get(), o.planes.c_str()), "--planes");
  if (o.format != "csv" && o.format != "json") throw Failure{"--format must be csv or json"};

  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Failure{"cannot create output directory '" + o.out_dir + "': " + ec.message()};

  char* plane_list = nullptr;
  check(mubcv_run_config_planes(cfg.get(), &plane_list), "planes");
  const std::string planes = take(plane_list);

  json written = json::array();
  std::size_t start = 0;
  while (start <= planes.size()) {
    const auto comma = planes.find(',', start);
    const std::string plane = planes.substr(start, comma - start);
    start = comma == std::string::npos ? planes.size() + 1 : comma + 1;
    mubcv_grid* graw = nullptr;
    check(mubcv_simulate_plane(cfg.get(), plane.c_str(), &graw), "simulating plane " + plane);
    Grid grid(graw);
    const fs::path path = fs::path(o.out_dir) / ("plane_" + plane + "." + o.format);
    check(mubcv_grid_save(grid.get(), path.string().c_str()), "writing " + path.string());
    std::uint64_t total = 0;
    check(mubcv_grid_total(grid.get(), &total), "grid total");
    written.push_back({{"plane", plane}, {"path", path.string()}, {"total_counts", total}});
    std::cerr << "wrote " << path.string() << " (" << total << " counts)\n";
  }
  std::cout << json{{"grids", written}}.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
  std::vector<std::string> grids;
  std::string sign = "both";
};

Grid load_grid(const std::string& path) {
  mubcv_grid* raw = nullptr;
  check(mubcv_grid_load(path.c_str(), &raw), "reading grid");
  return Grid(raw);
}

std::string pm(const json& m, int precision = 4) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.*g +/- %.2g", precision, m.at("value").get<double>(),
                m.at("uncertainty").get<double>());
  return buf;
}

int run_certify(const CertifyOptions& o) {
  if (o.grids.size() != 3) throw Failure{"certify needs three grid files: x, u and v planes"};
  const auto signs = parse_signs(o.sign);
  Grid gx = load_grid(o.grids[0]);
  Grid gu = load_grid(o.grids[1]);
  Grid gv = load_grid(o.grids[2]);
  char* raw = nullptr;
  int ent_minus = 0, ent_plus = 0;
  check(mubcv_certify(gx.get(), gu.get(), gv.get(), &raw, &ent_minus, &ent_plus), "certify");
  json doc = json::parse(take(raw));
  bool entangled = false;
  json used = json::array();
  for (auto s : signs) {
    used.push_back(sign_name(s));
    entangled = entangled || (s == MUBCV_SIGN_MINUS ? ent_minus : ent_plus);
  }
  doc["signs"] = used;
  doc["verdict"] = entangled ? "entangled" : "not detected";
  std::cout << doc.dump(2) << '\n';

  std::cerr << "plane  var(-)                 var(+)                 C_W\n";
  for (const auto& row : doc.at("rows")) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-6s %-22s %-22s %s\n",
                  row.at("plane").get<std::string>().c_str(), pm(row.at("var_minus")).c_str(),
                  pm(row.at("var_plus")).c_str(), pm(row.at("correlation"), 3).c_str());
    std::cerr << line;
  }
  for (auto s : signs) {
    const json& c = doc.at(sign_name(s));
    std::cerr << "product (" << sign_name(s) << "): "
              << pm({{"value", c.at("product")}, {"uncertainty", c.at("product_uncertainty")}}, 3)
              << (c.at("entangled").get<bool>() ? "  < 1 at 3 sigma" : "  not below 1 at 3 sigma")
              << '\n';
  }
  std::cerr << "verdict: " << doc.at("verdict").get<std::string>() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- frft

struct FrftOptions {
  std::string input;
  std::string theta;
  std::string output;
  bool report_variance = false;
};

int run_frft(const FrftOptions& o) {
  if (o.output.empty() && !o.report_variance) {
    throw Failure{"nothing to do: give --output and/or --report-variance"};
  }
  const double theta = parse_angle(o.theta);
  mubcv_wavefunction* raw = nullptr;
  check(mubcv_wavefunction_read_csv(o.input.c_str(), &raw), "reading wavefunction");
  Wave psi(raw);
  mubcv_wavefunction* out_raw = nullptr;
  check(mubcv_frft(psi.get(), theta, &out_raw), "transforming");
  Wave out(out_raw);
  if (!o.output.empty()) {
    check(mubcv_wavefunction_write_csv(out.get(), o.output.c_str()), "writing " + o.output);
  }
  if (o.report_variance) {
    double var = 0.0;
    check(mubcv_rotated_variance(psi.get(), theta, &var), "rotated variance");
    std::cout << json{{"theta", theta}, {"rotated_variance", var}}.dump(2) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string grid;
  std::string sign = "both";
};

int run_analyze(const AnalyzeOptions& o) {
  const auto signs = parse_signs(o.sign);
  Grid grid = load_grid(o.grid);
  json doc;
  for (auto s : signs) {
    char* raw = nullptr;
    check(mubcv_analyze(grid.get(), s, &raw), std::string("analyzing (") + sign_name(s) + ")");
    json part = json::parse(take(raw));
    doc["plane"] = part.at("plane");
    part.erase("plane");
    part.erase("sign");
    doc[sign_name(s)] = part;
  }
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutually unbiased quadrature uncertainty relations and entanglement certification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mubcv_version()));

  UrOptions ur;
  auto* ur_cmd = app.add_subcommand("ur", "Check single-mode and global uncertainty relations");
  ur_cmd->add_option("--state", ur.state_path, "Gaussian state JSON file");
  ur_cmd->add_option("--config", ur.config_path, "Run config whose spdc block defines the state");
  ur_cmd->add_option("--sigma-plus", ur.sigma_plus, "SPDC sum width (dimensionless)");
  ur_cmd->add_option("--sigma-minus", ur.sigma_minus, "SPDC difference width (dimensionless)");

  OptimizeOptions opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Minimize g(eta, xi) under the uncertainty constraint");
  opt_cmd->add_option("--initial-eta", opt.initial_eta, "Starting point for the Newton search");
  opt_cmd->add_flag("--grid-scan", opt.grid_scan, "Also print g on the saturation curve");
  opt_cmd->add_option("--scan-min", opt.scan_min, "Smallest eta of the scan");
  opt_cmd->add_option("--scan-max", opt.scan_max, "Largest eta of the scan");
  opt_cmd->add_option("--scan-points", opt.scan_points, "Number of scan points");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate coincidence scans for the three planes");
  sim_cmd->add_option("--config", sim.config_path, "Run config JSON (defaults when omitted)");
  sim_cmd->add_option("--seed", sim.seed, "Override the config seed");
  sim_cmd->add_option("--out", sim.out_dir, "Output directory");
  sim_cmd->add_option("--planes", sim.planes, "Comma-separated subset of x,u,v");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--format", sim.format, "csv or json");

  CertifyOptions cert;
  auto* cert_cmd = app.add_subcommand("certify", "Fit the three planes and apply the criterion");
  cert_cmd->add_option("grids", cert.grids, "Grid files for the x, u and v planes")->expected(3)->required();
  cert_cmd->add_option("--sign", cert.sign, "plus, minus or both");

  FrftOptions fr;
  auto* frft_cmd = app.add_subcommand("frft", "Fractional Fourier transform of a sampled wavefunction");
  frft_cmd->add_option("--input", fr.input, "Wavefunction CSV (q,re,im)")->required();
  frft_cmd->add_option("--theta", fr.theta, "Rotation angle (radians, or e.g. pi/2)")->required();
  frft_cmd->add_option("--output", fr.output, "Output CSV");
  frft_cmd->add_flag("--report-variance", fr.report_variance, "Print the rotated quadrature variance");

  AnalyzeOptions an;
  auto* an_cmd = app.add_subcommand("analyze", "Fit the marginal of one grid");
  an_cmd->add_option("grid", an.grid, "Grid file")->required();
  an_cmd->add_option("--sign", an.sign, "plus, minus or both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (ur_cmd->parsed()) return run_ur(ur);
    if (opt_cmd->parsed()) return run_optimize(opt);
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (cert_cmd->parsed()) return run_certify(cert);
    if (frft_cmd->parsed()) return run_frft(fr);
    if (an_cmd->parsed()) return run_analyze(an);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
