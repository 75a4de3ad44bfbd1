#include "mubcv/json_io.hpp"

#include <cmath>

#include "mubcv/error.hpp"

namespace mubcv {

namespace {

template <typename T>
T get_field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const json& doc, const char* key, T& target) {
  if (doc.contains(key)) target = get_field<T>(doc, key);
}

json measurement_pair(const Measurement& m) { return to_json(m); }

}  // namespace

json to_json(const GaussianState& state) {
  json doc;
  doc["n_modes"] = state.n_modes();
  doc["mean"] = std::vector<double>(state.mean().data(), state.mean().data() + state.mean().size());
  json rows = json::array();
  for (Eigen::Index i = 0; i < state.cov().rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(state.cov().cols()));
    for (Eigen::Index j = 0; j < state.cov().cols(); ++j) row[static_cast<std::size_t>(j)] = state.cov()(i, j);
    rows.push_back(row);
  }
  doc["cov"] = rows;
  return doc;
}

GaussianState state_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("state must be a JSON object");
  for (const auto& item : doc.items()) {
    if (item.key() != "n_modes" && item.key() != "mean" && item.key() != "cov") {
      throw ParseError("unknown state field '" + item.key() + "'");
    }
  }
  const auto cov_rows = get_field<std::vector<std::vector<double>>>(doc, "cov");
  const std::size_t dim = cov_rows.size();
  if (dim == 0 || dim % 2 != 0) throw InvalidInput("cov must be a non-empty 2n x 2n matrix");
  if (doc.contains("n_modes") && get_field<std::size_t>(doc, "n_modes") * 2 != dim) {
    throw InvalidInput("n_modes does not match the covariance size");
  }
  Eigen::MatrixXd cov(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (cov_rows[i].size() != dim) throw InvalidInput("cov must be square");
    for (std::size_t j = 0; j < dim; ++j) cov(i, j) = cov_rows[i][j];
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  if (doc.contains("mean")) {
    const auto m = get_field<std::vector<double>>(doc, "mean");
    if (m.size() != dim) throw InvalidInput("mean length does not match cov");
    for (std::size_t i = 0; i < dim; ++i) mean[i] = m[i];
  }
  return GaussianState(std::move(mean), std::move(cov));
}

json to_json(const UrReport& report) {
  return {{"name", report.name},
          {"lhs", report.lhs},
          {"bound", report.bound},
          {"satisfied", report.satisfied},
          {"margin", report.margin}};
}

json to_json(const OptimizerResult& result) {
  return {{"eta", result.eta},
          {"xi", result.xi},
          {"g_min", result.g_min},
          {"iterations", result.iterations},
          {"converged", result.converged}};
}

json to_json(const Measurement& m) { return {{"value", m.value}, {"uncertainty", m.uncertainty}}; }

json to_json(const CriterionReport& report) {
  json doc{{"sign", std::string(to_string(report.sign))},
           {"var_x", measurement_pair(report.var_x)},
           {"var_u", measurement_pair(report.var_u)},
           {"var_v", measurement_pair(report.var_v)},
           {"product", report.product},
           {"product_uncertainty", report.product_uncertainty},
           {"bound", report.bound},
           {"entangled", report.entangled}};
  doc["sigma_level"] = report.sigma_level ? json(*report.sigma_level) : json(nullptr);
  return doc;
}

json to_json(const SpdcParams& params) {
  return {{"sigma_plus", params.sigma_plus}, {"sigma_minus", params.sigma_minus}};
}

json to_json(const GaussianFitResult& fit) {
  return {{"amplitude", fit.amplitude},
          {"amplitude_error", fit.amplitude_error},
          {"mean", fit.mean},
          {"mean_error", fit.mean_error},
          {"sigma", fit.sigma},
          {"sigma_error", fit.sigma_error},
          {"background", fit.background},
          {"background_error", fit.background_error},
          {"variance", fit.variance()},
          {"variance_error", fit.variance_error()},
          {"chi2", fit.chi2},
          {"dof", fit.dof},
          {"iterations", fit.iterations},
          {"converged", fit.converged}};
}

json to_json(const CertifyReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"plane", std::string(to_string(row.name))},
                    {"var_minus", to_json(row.var_minus)},
                    {"var_plus", to_json(row.var_plus)},
                    {"correlation", to_json(row.correlation)}});
  }
  return {{"d_m", report.d_m},
          {"rows", rows},
          {"minus", to_json(report.minus)},
          {"plus", to_json(report.plus)}};
}

json to_json(const ScanConfig& config) {
  return {{"n_bins_per_axis", config.n_bins_per_axis},
          {"roi_m", config.roi_m},
          {"slit_width_m", config.slit_width_m},
          {"dwell_time_s", config.dwell_time_s},
          {"pair_rate", config.pair_rate},
          {"background_rate", config.background_rate},
          {"theta1", config.theta1},
          {"theta2", config.theta2},
          {"seed", config.seed},
          {"optics",
           {{"focal_length_m", config.scaling.focal_length_m},
            {"wavelength_m", config.scaling.wavelength_m},
            {"rotation_angle", config.scaling.rotation_angle}}}};
}

ScanConfig scan_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  ScanConfig c;
  read_optional(doc, "n_bins_per_axis", c.n_bins_per_axis);
  read_optional(doc, "roi_m", c.roi_m);
  read_optional(doc, "slit_width_m", c.slit_width_m);
  read_optional(doc, "dwell_time_s", c.dwell_time_s);
  read_optional(doc, "pair_rate", c.pair_rate);
  read_optional(doc, "background_rate", c.background_rate);
  read_optional(doc, "theta1", c.theta1);
  read_optional(doc, "theta2", c.theta2);
  read_optional(doc, "seed", c.seed);
  if (doc.contains("optics")) {
    const json& o = doc.at("optics");
    read_optional(o, "focal_length_m", c.scaling.focal_length_m);
    read_optional(o, "wavelength_m", c.scaling.wavelength_m);
    read_optional(o, "rotation_angle", c.scaling.rotation_angle);
  }
  return c;
}

json to_json(const CoincidenceGrid& grid) {
  json counts = json::array();
  for (std::size_t i = 0; i < grid.n; ++i) {
    counts.push_back(std::vector<std::uint64_t>(grid.counts.begin() + static_cast<std::ptrdiff_t>(i * grid.n),
                                                grid.counts.begin() + static_cast<std::ptrdiff_t>((i + 1) * grid.n)));
  }
  json doc{{"format", "mubcv-grid"},
           {"plane", grid.plane},
           {"n", grid.n},
           {"d_m", grid.d_m},
           {"axis1_m", grid.axis1_m},
           {"axis2_m", grid.axis2_m},
           {"config", to_json(grid.config)},
           {"fluorescence_rate", grid.fluorescence_rate},
           {"fluorescence_width", grid.fluorescence_width},
           {"counts", counts}};
  doc["source"] = grid.source ? to_json(*grid.source) : json(nullptr);
  return doc;
}

CoincidenceGrid grid_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("grid must be a JSON object");
  if (doc.contains("format") && doc.at("format") != "mubcv-grid") {
    throw ParseError("unsupported grid format");
  }
  CoincidenceGrid grid;
  grid.plane = doc.contains("plane") ? get_field<std::string>(doc, "plane") : std::string("custom");
  grid.n = get_field<std::size_t>(doc, "n");
  grid.d_m = get_field<double>(doc, "d_m");
  grid.axis1_m = get_field<std::vector<double>>(doc, "axis1_m");
  grid.axis2_m = get_field<std::vector<double>>(doc, "axis2_m");
  if (doc.contains("config")) grid.config = scan_config_from_json(doc.at("config"));
  read_optional(doc, "fluorescence_rate", grid.fluorescence_rate);
  read_optional(doc, "fluorescence_width", grid.fluorescence_width);
  if (doc.contains("source") && !doc.at("source").is_null()) {
    SpdcParams p;
    p.sigma_plus = get_field<double>(doc.at("source"), "sigma_plus");
    p.sigma_minus = get_field<double>(doc.at("source"), "sigma_minus");
    grid.source = p;
  }
  const auto rows = get_field<std::vector<std::vector<std::uint64_t>>>(doc, "counts");
  if (rows.size() != grid.n) throw InvalidInput("counts must have n rows");
  grid.counts.reserve(grid.n * grid.n);
  for (const auto& row : rows) {
    if (row.size() != grid.n) throw InvalidInput("counts rows must have n entries");
    grid.counts.insert(grid.counts.end(), row.begin(), row.end());
  }
  grid.validate();
  return grid;
}

}  // namespace mubcv
