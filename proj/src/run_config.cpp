#include "mubcv/run_config.hpp"

#include <algorithm>
#include <initializer_list>

#include "mubcv/error.hpp"
#include "mubcv/json_io.hpp"
#include "mubcv/random.hpp"

namespace mubcv {

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* k) { return item.key() == k; });
    if (!ok) throw ParseError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("wrong type for '" + std::string(key) + "' in " + where);
  }
}

std::vector<Plane> read_planes(const json& value, const std::string& where) {
  if (!value.is_array()) throw ParseError(where + " must be an array of plane names");
  std::vector<Plane> planes;
  for (const auto& v : value) {
    if (!v.is_string()) throw ParseError(where + " entries must be strings");
    const Plane p = parse_plane(v.get<std::string>());
    if (std::find(planes.begin(), planes.end(), p) != planes.end()) {
      throw InvalidInput("plane '" + v.get<std::string>() + "' listed twice in " + where);
    }
    planes.push_back(p);
  }
  return planes;
}

json planes_json(const std::vector<Plane>& planes) {
  json arr = json::array();
  for (Plane p : planes) arr.push_back(to_string(p));
  return arr;
}

}  // namespace

void RunConfig::validate() const {
  if (schema_version != kRunConfigSchemaVersion) {
    throw InvalidInput("unsupported schema_version " + std::to_string(schema_version));
  }
  spdc.validate();
  scan_config().validate();
  if (!std::isfinite(fluorescence.rate) || fluorescence.rate < 0.0) {
    throw InvalidInput("fluorescence rate must be finite and non-negative");
  }
  if (!(fluorescence.profile_width > 0.0) || !std::isfinite(fluorescence.profile_width)) {
    throw InvalidInput("fluorescence profile_width must be positive");
  }
  if (planes.empty()) throw InvalidInput("at least one plane is required");
}

ScanConfig RunConfig::scan_config() const {
  ScanConfig c = scan;
  c.seed = seed;
  c.threads = threads;
  return c;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "config",
                 {"schema_version", "seed", "threads", "spdc", "optics", "scan", "fluorescence",
                  "planes"});
  RunConfig c;
  read(doc, "schema_version", c.schema_version, "config");
  if (c.schema_version != kRunConfigSchemaVersion) {
    throw ParseError("unsupported schema_version " + std::to_string(c.schema_version));
  }
  read(doc, "seed", c.seed, "config");
  read(doc, "threads", c.threads, "config");
  if (doc.contains("spdc")) {
    const json& s = doc.at("spdc");
    reject_unknown(s, "spdc", {"sigma_plus", "sigma_minus"});
    read(s, "sigma_plus", c.spdc.sigma_plus, "spdc");
    read(s, "sigma_minus", c.spdc.sigma_minus, "spdc");
  }
  if (doc.contains("optics")) {
    const json& o = doc.at("optics");
    reject_unknown(o, "optics", {"focal_length_m", "wavelength_m", "rotation_angle"});
    read(o, "focal_length_m", c.scan.scaling.focal_length_m, "optics");
    read(o, "wavelength_m", c.scan.scaling.wavelength_m, "optics");
    read(o, "rotation_angle", c.scan.scaling.rotation_angle, "optics");
  }
  if (doc.contains("scan")) {
    const json& s = doc.at("scan");
    reject_unknown(s, "scan",
                   {"n_bins_per_axis", "roi_m", "slit_width_m", "dwell_time_s", "pair_rate",
                    "background_rate"});
    read(s, "n_bins_per_axis", c.scan.n_bins_per_axis, "scan");
    read(s, "roi_m", c.scan.roi_m, "scan");
    read(s, "slit_width_m", c.scan.slit_width_m, "scan");
    read(s, "dwell_time_s", c.scan.dwell_time_s, "scan");
    read(s, "pair_rate", c.scan.pair_rate, "scan");
    read(s, "background_rate", c.scan.background_rate, "scan");
  }
  if (doc.contains("fluorescence")) {
    const json& f = doc.at("fluorescence");
    reject_unknown(f, "fluorescence", {"rate", "profile_width", "planes"});
    read(f, "rate", c.fluorescence.rate, "fluorescence");
    read(f, "profile_width", c.fluorescence.profile_width, "fluorescence");
    if (f.contains("planes")) c.fluorescence.planes = read_planes(f.at("planes"), "fluorescence.planes");
  }
  if (doc.contains("planes")) c.planes = read_planes(doc.at("planes"), "planes");
  c.validate();
  return c;
}

std::string dump_run_config(const RunConfig& c) {
  json doc{{"schema_version", c.schema_version},
           {"seed", c.seed},
           {"threads", c.threads},
           {"spdc", to_json(c.spdc)},
           {"optics",
            {{"focal_length_m", c.scan.scaling.focal_length_m},
             {"wavelength_m", c.scan.scaling.wavelength_m},
             {"rotation_angle", c.scan.scaling.rotation_angle}}},
           {"scan",
            {{"n_bins_per_axis", c.scan.n_bins_per_axis},
             {"roi_m", c.scan.roi_m},
             {"slit_width_m", c.scan.slit_width_m},
             {"dwell_time_s", c.scan.dwell_time_s},
             {"pair_rate", c.scan.pair_rate},
             {"background_rate", c.scan.background_rate}}},
           {"fluorescence",
            {{"rate", c.fluorescence.rate},
             {"profile_width", c.fluorescence.profile_width},
             {"planes", planes_json(c.fluorescence.planes)}}},
           {"planes", planes_json(c.planes)}};
  return doc.dump(2);
}

CoincidenceGrid run_plane(const RunConfig& config, Plane plane) {
  config.validate();
  CoincidenceGrid grid = simulate_plane(config.spdc, config.scan_config(), plane);
  const auto& fp = config.fluorescence.planes;
  if (config.fluorescence.rate > 0.0 && std::find(fp.begin(), fp.end(), plane) != fp.end()) {
    // Stream 16 + plane keeps the noise independent of every signal stream.
    const std::uint64_t seed = substream_seed(config.seed, 16 + static_cast<std::uint64_t>(plane));
    grid = add_fluorescence_background(grid, config.fluorescence.profile_width,
                                       config.fluorescence.rate, seed);
  }
  return grid;
}

}  // namespace mubcv
