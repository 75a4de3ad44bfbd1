#include "mubcv/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "mubcv/error.hpp"
#include "mubcv/json_io.hpp"

namespace fs = std::filesystem;

namespace mubcv {

namespace {

constexpr const char* kGridHeader = "w1_index,w2_index,position1_m,position2_m,counts";
constexpr const char* kWavefunctionHeader = "q,re,im";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string at_line(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

double parse_double(const std::string& text, std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(v)) {
    throw ParseError(at_line(line, std::string("invalid ") + what + " '" + text + "'"));
  }
  return v;
}

std::uint64_t parse_uint(const std::string& text, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ParseError(at_line(line, std::string("invalid ") + what + " '" + text + "'"));
  }
  return v;
}

bool has_json_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".json";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("could not format number");
  return std::string(buf, ptr);
}

void write_grid_csv(const CoincidenceGrid& grid, std::ostream& out) {
  grid.validate();
  const ScanConfig& c = grid.config;
  auto meta = [&out](const char* key, const std::string& value) {
    out << "# " << key << " = " << value << '\n';
  };
  meta("format", "mubcv-grid-csv");
  meta("plane", grid.plane);
  meta("n", std::to_string(grid.n));
  meta("d_m", format_double(grid.d_m));
  meta("roi_m", format_double(c.roi_m));
  meta("slit_width_m", format_double(c.slit_width_m));
  meta("dwell_time_s", format_double(c.dwell_time_s));
  meta("pair_rate", format_double(c.pair_rate));
  meta("background_rate", format_double(c.background_rate));
  meta("theta1", format_double(c.theta1));
  meta("theta2", format_double(c.theta2));
  meta("focal_length_m", format_double(c.scaling.focal_length_m));
  meta("wavelength_m", format_double(c.scaling.wavelength_m));
  meta("rotation_angle", format_double(c.scaling.rotation_angle));
  meta("seed", std::to_string(c.seed));
  if (grid.source) {
    meta("sigma_plus", format_double(grid.source->sigma_plus));
    meta("sigma_minus", format_double(grid.source->sigma_minus));
  }
  meta("fluorescence_rate", format_double(grid.fluorescence_rate));
  meta("fluorescence_width", format_double(grid.fluorescence_width));
  out << kGridHeader << '\n';
  for (std::size_t i = 0; i < grid.n; ++i) {
    const std::string p1 = format_double(grid.axis1_m[i]);
    for (std::size_t j = 0; j < grid.n; ++j) {
      out << i << ',' << j << ',' << p1 << ',' << format_double(grid.axis2_m[j]) << ','
          << grid.counts[i * grid.n + j] << '\n';
    }
  }
}

CoincidenceGrid read_grid_csv(std::istream& in) {
  std::map<std::string, std::pair<std::string, std::size_t>> meta;
  struct Row {
    std::uint64_t i, j;
    double p1, p2;
    std::uint64_t count;
    std::size_t line;
  };
  std::vector<Row> rows;
  bool header_seen = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw ParseError(at_line(line_no, "metadata after the column header"));
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      meta[trim(std::string_view(line).substr(1, eq - 1))] = {trim(std::string_view(line).substr(eq + 1)),
                                                               line_no};
      continue;
    }
    if (!header_seen) {
      if (line != kGridHeader) {
        throw ParseError(at_line(line_no, std::string("expected header '") + kGridHeader + "'"));
      }
      header_seen = true;
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 5) {
      throw ParseError(at_line(line_no, "expected 5 fields, found " + std::to_string(f.size())));
    }
    rows.push_back({parse_uint(f[0], line_no, "w1_index"), parse_uint(f[1], line_no, "w2_index"),
                    parse_double(f[2], line_no, "position1_m"),
                    parse_double(f[3], line_no, "position2_m"),
                    parse_uint(f[4], line_no, "counts"), line_no});
  }
  if (!header_seen) throw ParseError("grid file has no column header");

  auto number = [&meta](const char* key, double& target) {
    const auto it = meta.find(key);
    if (it != meta.end()) target = parse_double(it->second.first, it->second.second, key);
  };
  CoincidenceGrid grid;
  const auto d_it = meta.find("d_m");
  if (d_it == meta.end()) throw ParseError("grid metadata lacks 'd_m'");
  grid.d_m = parse_double(d_it->second.first, d_it->second.second, "d_m");
  grid.plane = meta.count("plane") ? meta["plane"].first : std::string("custom");
  if (meta.count("n")) {
    grid.n = parse_uint(meta["n"].first, meta["n"].second, "n");
  } else {
    grid.n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows.size()))));
  }
  if (grid.n < 2 || rows.size() != grid.n * grid.n) {
    throw ParseError("expected " + std::to_string(grid.n * grid.n) + " data rows, found " +
                     std::to_string(rows.size()));
  }
  ScanConfig& c = grid.config;
  c.n_bins_per_axis = grid.n;
  number("roi_m", c.roi_m);
  number("slit_width_m", c.slit_width_m);
  number("dwell_time_s", c.dwell_time_s);
  number("pair_rate", c.pair_rate);
  number("background_rate", c.background_rate);
  number("theta1", c.theta1);
  number("theta2", c.theta2);
  number("focal_length_m", c.scaling.focal_length_m);
  number("wavelength_m", c.scaling.wavelength_m);
  number("rotation_angle", c.scaling.rotation_angle);
  number("fluorescence_rate", grid.fluorescence_rate);
  number("fluorescence_width", grid.fluorescence_width);
  if (meta.count("seed")) c.seed = parse_uint(meta["seed"].first, meta["seed"].second, "seed");
  if (meta.count("sigma_plus") && meta.count("sigma_minus")) {
    SpdcParams p;
    number("sigma_plus", p.sigma_plus);
    number("sigma_minus", p.sigma_minus);
    grid.source = p;
  }

  const std::size_t n = grid.n;
  grid.axis1_m.assign(n, std::nan(""));
  grid.axis2_m.assign(n, std::nan(""));
  grid.counts.assign(n * n, 0);
  std::vector<bool> seen(n * n, false);
  for (const Row& r : rows) {
    if (r.i >= n || r.j >= n) throw ParseError(at_line(r.line, "index out of range"));
    const std::size_t k = r.i * n + r.j;
    if (seen[k]) throw ParseError(at_line(r.line, "duplicate scan point"));
    seen[k] = true;
    for (auto [axis, idx, pos] : {std::tuple{&grid.axis1_m, r.i, r.p1}, std::tuple{&grid.axis2_m, r.j, r.p2}}) {
      double& slot = (*axis)[idx];
      if (std::isnan(slot)) {
        slot = pos;
      } else if (std::abs(slot - pos) > 1e-12 * std::max(1.0, std::abs(pos)) && slot != pos) {
        throw ParseError(at_line(r.line, "position disagrees with earlier rows for the same index"));
      }
    }
    grid.counts[k] = r.count;
  }
  try {
    grid.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid grid: ") + e.what());
  }
  return grid;
}

void save_grid(const CoincidenceGrid& grid, const fs::path& path) {
  std::ostringstream out;
  if (has_json_extension(path)) {
    out << to_json(grid).dump(1) << '\n';
  } else {
    write_grid_csv(grid, out);
  }
  write_file_atomic(path, out.str());
}

CoincidenceGrid load_grid(const fs::path& path) {
  const std::string text = read_text_file(path);
  if (has_json_extension(path)) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    return grid_from_json(doc);
  }
  std::istringstream in(text);
  try {
    return read_grid_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_wavefunction_csv(const SampledWavefunction& psi, std::ostream& out) {
  out << kWavefunctionHeader << '\n';
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const auto a = psi.amplitudes()[k];
    out << format_double(psi.q(k)) << ',' << format_double(a.real()) << ','
        << format_double(a.imag()) << '\n';
  }
}

SampledWavefunction read_wavefunction_csv(std::istream& in) {
  std::vector<double> q;
  std::vector<std::complex<double>> amps;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kWavefunctionHeader) {
        throw ParseError(at_line(line_no, std::string("expected header '") + kWavefunctionHeader + "'"));
      }
      header_seen = true;
      continue;
    }
    const auto f = split_commas(line);
    if (f.size() != 3) {
      throw ParseError(at_line(line_no, "expected 3 fields, found " + std::to_string(f.size())));
    }
    q.push_back(parse_double(f[0], line_no, "q"));
    amps.emplace_back(parse_double(f[1], line_no, "re"), parse_double(f[2], line_no, "im"));
  }
  if (!header_seen) throw ParseError("wavefunction file has no column header");
  const std::size_t n = q.size();
  if (n < 2) throw InvalidInput("wavefunction needs at least 2 samples");
  const double dq = q[1] - q[0];
  if (!(dq > 0.0)) throw InvalidInput("q must be strictly increasing");
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = SampledWavefunction::grid_point(n, dq, k);
    if (std::abs(q[k] - expected) > 1e-9 * dq * static_cast<double>(n)) {
      throw InvalidInput("q column is not the centered grid (k - n/2) dq at row " +
                         std::to_string(k + 1));
    }
  }
  return SampledWavefunction(dq, std::move(amps));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignore;
      fs::remove(tmp, ignore);
      throw IoError("error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

}  // namespace mubcv
