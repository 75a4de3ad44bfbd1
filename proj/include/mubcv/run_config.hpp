#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mubcv/expsim.hpp"
#include "mubcv/spdc.hpp"

namespace mubcv {

inline constexpr int kRunConfigSchemaVersion = 1;

struct FluorescenceConfig {
  double rate = 0.0;            // counts per second per bin (mean over the grid)
  double profile_width = 10.0;  // dimensionless envelope width
  std::vector<Plane> planes{Plane::X};
};

// Parameters for a reproducible simulate run. The JSON form is
//   {"schema_version": 1,
//    "seed": 42,
//    "threads": 1,
//    "spdc": {"sigma_plus": 35, "sigma_minus": 0.7},
//    "optics": {"focal_length_m": 0.4, "wavelength_m": 6.5e-7, "rotation_angle": 1.047},
//    "scan": {"n_bins_per_axis": 150, "roi_m": 0.012, "slit_width_m": 8e-5,
//             "dwell_time_s": 3, "pair_rate": 7e4, "background_rate": 0},
//    "fluorescence": {"rate": 0, "profile_width": 10, "planes": ["x"]},
//    "planes": ["x", "u", "v"]}
// Every block and key is optional; unknown keys are rejected.
struct RunConfig {
  int schema_version = kRunConfigSchemaVersion;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SpdcParams spdc{35.0, 0.7};
  ScanConfig scan;
  FluorescenceConfig fluorescence;
  std::vector<Plane> planes{Plane::X, Plane::U, Plane::V};

  void validate() const;
  // ScanConfig with seed, threads and optics applied.
  ScanConfig scan_config() const;
};

RunConfig parse_run_config(const std::string& json_text);
std::string dump_run_config(const RunConfig& config);

// Simulated grid for one plane, fluorescence included when configured.
CoincidenceGrid run_plane(const RunConfig& config, Plane plane);

}  // namespace mubcv
