#pragma once

#include <json.hpp>

#include "mubcv/analysis.hpp"
#include "mubcv/entangle.hpp"
#include "mubcv/expsim.hpp"
#include "mubcv/gaussian.hpp"
#include "mubcv/spdc.hpp"
#include "mubcv/uncertainty.hpp"

namespace mubcv {

using json = nlohmann::json;

// {"n_modes": n, "mean": [...], "cov": [[...], ...]}
json to_json(const GaussianState& state);
GaussianState state_from_json(const json& doc);

json to_json(const UrReport& report);
json to_json(const OptimizerResult& result);
json to_json(const Measurement& m);
json to_json(const CriterionReport& report);
json to_json(const SpdcParams& params);
json to_json(const GaussianFitResult& fit);
json to_json(const CertifyReport& report);

// Acquisition settings without the thread count, which never affects output:
// {"n_bins_per_axis", "roi_m", "slit_width_m", "dwell_time_s", "pair_rate",
//  "background_rate", "theta1", "theta2", "seed",
//  "optics": {"focal_length_m", "wavelength_m", "rotation_angle"}}
json to_json(const ScanConfig& config);
ScanConfig scan_config_from_json(const json& doc);

json to_json(const CoincidenceGrid& grid);
CoincidenceGrid grid_from_json(const json& doc);

}  // namespace mubcv
