#include "mubcv/mubcv.h"

#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "mubcv/analysis.hpp"
#include "mubcv/entangle.hpp"
#include "mubcv/error.hpp"
#include "mubcv/frft.hpp"
#include "mubcv/gaussian.hpp"
#include "mubcv/io.hpp"
#include "mubcv/json_io.hpp"
#include "mubcv/run_config.hpp"
#include "mubcv/spdc.hpp"
#include "mubcv/uncertainty.hpp"

struct mubcv_state {
  mubcv::GaussianState value;
};

struct mubcv_wavefunction {
  mubcv::SampledWavefunction value;
};

struct mubcv_run_config {
  mubcv::RunConfig value;
};

struct mubcv_grid {
  mubcv::CoincidenceGrid value;
};

namespace {

thread_local std::string g_last_error;

class NullArgument : public std::exception {
 public:
  explicit NullArgument(const char* name) : msg_(std::string("null argument: ") + name) {}
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  std::string msg_;
};

template <typename Fn>
mubcv_status guard(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return MUBCV_OK;
  } catch (const NullArgument& e) {
    g_last_error = e.what();
    return MUBCV_ERR_NULL_ARGUMENT;
  } catch (const mubcv::InvalidInput& e) {
    g_last_error = e.what();
    return MUBCV_ERR_INVALID_INPUT;
  } catch (const mubcv::DegenerateAxes& e) {
    g_last_error = e.what();
    return MUBCV_ERR_DEGENERATE_AXES;
  } catch (const mubcv::FitFailure& e) {
    g_last_error = e.what();
    return MUBCV_ERR_FIT_FAILURE;
  } catch (const mubcv::ParseError& e) {
    g_last_error = e.what();
    return MUBCV_ERR_PARSE;
  } catch (const mubcv::IoError& e) {
    g_last_error = e.what();
    return MUBCV_ERR_IO;
  } catch (const mubcv::json::exception& e) {
    g_last_error = e.what();
    return MUBCV_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MUBCV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MUBCV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MUBCV_ERR_INTERNAL;
  }
}

template <typename T>
T& deref(T* p, const char* name) {
  if (p == nullptr) throw NullArgument(name);
  return *p;
}

template <typename T>
const T& deref(const T* p, const char* name) {
  if (p == nullptr) throw NullArgument(name);
  return *p;
}

const char* need_str(const char* s, const char* name) {
  if (s == nullptr) throw NullArgument(name);
  return s;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mubcv::Sign to_sign(mubcv_sign sign) {
  if (sign == MUBCV_SIGN_MINUS) return mubcv::Sign::Minus;
  if (sign == MUBCV_SIGN_PLUS) return mubcv::Sign::Plus;
  throw mubcv::InvalidInput("unknown sign value");
}

std::vector<mubcv::Plane> parse_plane_list(const std::string& text) {
  std::vector<mubcv::Plane> planes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto p = mubcv::parse_plane(item);
    for (auto q : planes) {
      if (q == p) throw mubcv::InvalidInput("plane '" + item + "' listed twice");
    }
    planes.push_back(p);
  }
  if (planes.empty()) throw mubcv::InvalidInput("empty plane list");
  return planes;
}

mubcv::json ur_report(const mubcv::GaussianState& state, bool& all_ok) {
  using namespace mubcv;
  json doc;
  json reports = json::array();
  all_ok = true;
  auto add = [&](const UrReport& r, const std::string& prefix) {
    json j = to_json(r);
    j["name"] = prefix + r.name;
    reports.push_back(j);
    all_ok = all_ok && r.satisfied;
  };
  doc["n_modes"] = state.n_modes();
  doc["physical"] = state.is_physical();
  if (state.n_modes() == 1) {
    for (const auto& r : check_single_mode(state)) add(r, "");
    doc["triple_product"] = triple_product(state);
  } else {
    for (std::size_t m = 0; m < state.n_modes(); ++m) {
      for (const auto& r : check_single_mode(state.mode(m))) add(r, "mode" + std::to_string(m + 1) + ".");
    }
  }
  if (state.n_modes() == 2) {
    add(check_global_ur(state, Sign::Minus), "");
    add(check_global_ur(state, Sign::Plus), "");
    doc["criterion"] = {{"minus", to_json(evaluate_criterion_from_state(state, Sign::Minus))},
                        {"plus", to_json(evaluate_criterion_from_state(state, Sign::Plus))}};
  }
  doc["reports"] = reports;
  doc["all_satisfied"] = all_ok;
  return doc;
}

}  // namespace

extern "C" {

const char* mubcv_last_error(void) { return g_last_error.c_str(); }

const char* mubcv_status_string(mubcv_status status) {
  switch (status) {
    case MUBCV_OK: return "ok";
    case MUBCV_ERR_INVALID_INPUT: return "invalid input";
    case MUBCV_ERR_DEGENERATE_AXES: return "degenerate axes";
    case MUBCV_ERR_FIT_FAILURE: return "fit failure";
    case MUBCV_ERR_PARSE: return "parse error";
    case MUBCV_ERR_IO: return "i/o error";
    case MUBCV_ERR_NULL_ARGUMENT: return "null argument";
    case MUBCV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mubcv_version(void) { return "1.0.0"; }

void mubcv_string_free(char* str) { delete[] str; }

mubcv_status mubcv_state_from_json(const char* json_text, mubcv_state** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    const auto doc = mubcv::json::parse(need_str(json_text, "json_text"));
    o = new mubcv_state{mubcv::state_from_json(doc)};
  });
}

mubcv_status mubcv_state_load(const char* path, mubcv_state** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    const std::string text = mubcv::read_text_file(need_str(path, "path"));
    mubcv::json doc;
    try {
      doc = mubcv::json::parse(text);
    } catch (const mubcv::json::parse_error& e) {
      throw mubcv::ParseError(std::string(path) + ": " + e.what());
    }
    o = new mubcv_state{mubcv::state_from_json(doc)};
  });
}

mubcv_status mubcv_state_vacuum(size_t n_modes, mubcv_state** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    if (n_modes == 0) throw mubcv::InvalidInput("n_modes must be positive");
    o = new mubcv_state{mubcv::GaussianState::vacuum(n_modes)};
  });
}

mubcv_status mubcv_state_spdc(double sigma_plus, double sigma_minus, mubcv_state** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = new mubcv_state{mubcv::spdc_state({sigma_plus, sigma_minus})};
  });
}

mubcv_status mubcv_state_n_modes(const mubcv_state* state, size_t* out) {
  return guard([&] { deref(out, "out") = deref(state, "state").value.n_modes(); });
}

mubcv_status mubcv_state_is_physical(const mubcv_state* state, int* out) {
  return guard([&] { deref(out, "out") = deref(state, "state").value.is_physical() ? 1 : 0; });
}

mubcv_status mubcv_state_to_json(const mubcv_state* state, char** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = dup_string(mubcv::to_json(deref(state, "state").value).dump());
  });
}

void mubcv_state_free(mubcv_state* state) { delete state; }

mubcv_status mubcv_triple_product(const mubcv_state* state, double offset, double* out) {
  return guard([&] {
    deref(out, "out") = mubcv::triple_product(deref(state, "state").value, mubcv::MubTriple(offset));
  });
}

mubcv_status mubcv_check_ur(const mubcv_state* state, char** report_json, int* all_satisfied) {
  return guard([&] {
    auto& o = deref(report_json, "report_json");
    o = nullptr;
    bool ok = false;
    const auto doc = ur_report(deref(state, "state").value, ok);
    if (all_satisfied != nullptr) *all_satisfied = ok ? 1 : 0;
    o = dup_string(doc.dump(2));
  });
}

mubcv_status mubcv_minimize_g(double initial_eta, mubcv_optimizer_result* out) {
  return guard([&] {
    auto& o = deref(out, "out");
    const auto r = mubcv::minimize_g(initial_eta);
    o = {r.eta, r.xi, r.g_min, r.iterations, r.converged ? 1 : 0};
  });
}

mubcv_status mubcv_g_sat_scan(double lo, double hi, size_t n, char** out_json) {
  return guard([&] {
    auto& o = deref(out_json, "out_json");
    o = nullptr;
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
      throw mubcv::InvalidInput("scan needs 0 < lo < hi and at least 2 points");
    }
    mubcv::json rows = mubcv::json::array();
    for (size_t k = 0; k < n; ++k) {
      const double eta = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
      const double gs = mubcv::g_sat(eta);
      rows.push_back({{"eta", eta}, {"xi", 0.25 / eta}, {"g_sat", gs}, {"margin", gs - 0.125}});
    }
    o = dup_string(rows.dump(2));
  });
}

mubcv_status mubcv_evaluate_criterion(const double values[3], const double uncertainties[3],
                                      mubcv_sign sign, mubcv_criterion* out) {
  return guard([&] {
    auto& o = deref(out, "out");
    const double* v = values;
    const double* u = uncertainties;
    if (v == nullptr) throw NullArgument("values");
    if (u == nullptr) throw NullArgument("uncertainties");
    const auto r = mubcv::evaluate_criterion({v[0], u[0]}, {v[1], u[1]}, {v[2], u[2]}, to_sign(sign));
    o = {r.product, r.product_uncertainty, r.bound, r.entangled ? 1 : 0};
  });
}

mubcv_status mubcv_wavefunction_create(size_t n, double dq, const double* re, const double* im,
                                       mubcv_wavefunction** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    if (re == nullptr) throw NullArgument("re");
    if (im == nullptr) throw NullArgument("im");
    std::vector<std::complex<double>> amps(n);
    for (size_t k = 0; k < n; ++k) amps[k] = {re[k], im[k]};
    o = new mubcv_wavefunction{mubcv::SampledWavefunction(dq, std::move(amps))};
  });
}

mubcv_status mubcv_wavefunction_read_csv(const char* path, mubcv_wavefunction** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    std::istringstream in(mubcv::read_text_file(need_str(path, "path")));
    try {
      o = new mubcv_wavefunction{mubcv::read_wavefunction_csv(in)};
    } catch (const mubcv::ParseError& e) {
      throw mubcv::ParseError(std::string(path) + ": " + e.what());
    }
  });
}

mubcv_status mubcv_wavefunction_write_csv(const mubcv_wavefunction* psi, const char* path) {
  return guard([&] {
    std::ostringstream out;
    mubcv::write_wavefunction_csv(deref(psi, "psi").value, out);
    mubcv::write_file_atomic(need_str(path, "path"), out.str());
  });
}

mubcv_status mubcv_wavefunction_size(const mubcv_wavefunction* psi, size_t* n, double* dq) {
  return guard([&] {
    const auto& w = deref(psi, "psi").value;
    if (n != nullptr) *n = w.size();
    if (dq != nullptr) *dq = w.dq();
  });
}

mubcv_status mubcv_wavefunction_amplitudes(const mubcv_wavefunction* psi, double* re, double* im,
                                           size_t len) {
  return guard([&] {
    const auto& w = deref(psi, "psi").value;
    if (re == nullptr) throw NullArgument("re");
    if (im == nullptr) throw NullArgument("im");
    if (len < w.size()) throw mubcv::InvalidInput("buffer shorter than the wavefunction");
    for (size_t k = 0; k < w.size(); ++k) {
      re[k] = w.amplitudes()[k].real();
      im[k] = w.amplitudes()[k].imag();
    }
  });
}

mubcv_status mubcv_frft(const mubcv_wavefunction* psi, double theta, mubcv_wavefunction** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = new mubcv_wavefunction{mubcv::frft(deref(psi, "psi").value, theta)};
  });
}

mubcv_status mubcv_rotated_variance(const mubcv_wavefunction* psi, double theta, double* out) {
  return guard([&] { deref(out, "out") = mubcv::rotated_variance(deref(psi, "psi").value, theta); });
}

void mubcv_wavefunction_free(mubcv_wavefunction* psi) { delete psi; }

mubcv_status mubcv_run_config_default(mubcv_run_config** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = new mubcv_run_config{mubcv::RunConfig{}};
  });
}

mubcv_status mubcv_run_config_parse(const char* json_text, mubcv_run_config** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = new mubcv_run_config{mubcv::parse_run_config(need_str(json_text, "json_text"))};
  });
}

mubcv_status mubcv_run_config_load(const char* path, mubcv_run_config** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    const std::string text = mubcv::read_text_file(need_str(path, "path"));
    try {
      o = new mubcv_run_config{mubcv::parse_run_config(text)};
    } catch (const mubcv::ParseError& e) {
      throw mubcv::ParseError(std::string(path) + ": " + e.what());
    } catch (const mubcv::InvalidInput& e) {
      throw mubcv::InvalidInput(std::string(path) + ": " + e.what());
    }
  });
}

mubcv_status mubcv_run_config_set_seed(mubcv_run_config* config, uint64_t seed) {
  return guard([&] { deref(config, "config").value.seed = seed; });
}

mubcv_status mubcv_run_config_set_threads(mubcv_run_config* config, unsigned threads) {
  return guard([&] { deref(config, "config").value.threads = threads; });
}

mubcv_status mubcv_run_config_set_planes(mubcv_run_config* config, const char* planes) {
  return guard([&] {
    auto& c = deref(config, "config");
    c.value.planes = parse_plane_list(need_str(planes, "planes"));
  });
}

mubcv_status mubcv_run_config_planes(const mubcv_run_config* config, char** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    std::string list;
    for (auto p : deref(config, "config").value.planes) {
      if (!list.empty()) list += ',';
      list += mubcv::to_string(p);
    }
    o = dup_string(list);
  });
}

mubcv_status mubcv_run_config_spdc(const mubcv_run_config* config, double* sigma_plus,
                                   double* sigma_minus) {
  return guard([&] {
    const auto& c = deref(config, "config").value;
    if (sigma_plus != nullptr) *sigma_plus = c.spdc.sigma_plus;
    if (sigma_minus != nullptr) *sigma_minus = c.spdc.sigma_minus;
  });
}

mubcv_status mubcv_run_config_to_json(const mubcv_run_config* config, char** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = dup_string(mubcv::dump_run_config(deref(config, "config").value));
  });
}

void mubcv_run_config_free(mubcv_run_config* config) { delete config; }

mubcv_status mubcv_simulate_plane(const mubcv_run_config* config, const char* plane,
                                  mubcv_grid** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    const auto p = mubcv::parse_plane(need_str(plane, "plane"));
    o = new mubcv_grid{mubcv::run_plane(deref(config, "config").value, p)};
  });
}

mubcv_status mubcv_grid_load(const char* path, mubcv_grid** out) {
  return guard([&] {
    auto& o = deref(out, "out");
    o = nullptr;
    o = new mubcv_grid{mubcv::load_grid(need_str(path, "path"))};
  });
}

mubcv_status mubcv_grid_save(const mubcv_grid* grid, const char* path) {
  return guard([&] { mubcv::save_grid(deref(grid, "grid").value, need_str(path, "path")); });
}

mubcv_status mubcv_grid_size(const mubcv_grid* grid, size_t* n) {
  return guard([&] { deref(n, "n") = deref(grid, "grid").value.n; });
}

mubcv_status mubcv_grid_total(const mubcv_grid* grid, uint64_t* out) {
  return guard([&] { deref(out, "out") = deref(grid, "grid").value.total(); });
}

mubcv_status mubcv_grid_counts(const mubcv_grid* grid, uint64_t* counts, size_t len) {
  return guard([&] {
    const auto& g = deref(grid, "grid").value;
    if (counts == nullptr) throw NullArgument("counts");
    if (len < g.counts.size()) throw mubcv::InvalidInput("buffer shorter than n * n");
    std::copy(g.counts.begin(), g.counts.end(), counts);
  });
}

void mubcv_grid_free(mubcv_grid* grid) { delete grid; }

mubcv_status mubcv_analyze(const mubcv_grid* grid, mubcv_sign sign, char** out_json) {
  return guard([&] {
    auto& o = deref(out_json, "out_json");
    o = nullptr;
    const auto& g = deref(grid, "grid").value;
    const auto s = to_sign(sign);
    const auto a = mubcv::analyze_plane(g, s);
    mubcv::json doc{{"plane", g.plane},
                    {"sign", std::string(mubcv::to_string(s))},
                    {"variance", mubcv::to_json(a.variance)},
                    {"fit", mubcv::to_json(a.fit)}};
    o = dup_string(doc.dump(2));
  });
}

mubcv_status mubcv_certify(const mubcv_grid* grid_x, const mubcv_grid* grid_u,
                           const mubcv_grid* grid_v, char** out_json, int* entangled_minus,
                           int* entangled_plus) {
  return guard([&] {
    auto& o = deref(out_json, "out_json");
    o = nullptr;
    const auto report = mubcv::certify(deref(grid_x, "grid_x").value, deref(grid_u, "grid_u").value,
                                       deref(grid_v, "grid_v").value);
    if (entangled_minus != nullptr) *entangled_minus = report.minus.entangled ? 1 : 0;
    if (entangled_plus != nullptr) *entangled_plus = report.plus.entangled ? 1 : 0;
    o = dup_string(mubcv::to_json(report).dump(2));
  });
}

}  // extern "C"
