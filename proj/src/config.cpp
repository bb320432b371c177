#include "mimosim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mimosim/errors.hpp"
#include "mimosim/framing.hpp"

namespace mimosim {

namespace {

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys{
      "seed", "N_t", "N_r", "constellation", "M_constellation",
      "codeword_size", "crc_length", "crc_generator", "n_pilot", "pilot_mode",
      "noise_power", "f_c", "distance", "path_loss_exponent", "bandwidth",
      "N0", "G_override", "detector", "estimator", "equalizer",
      "n_transmissions", "payload_path", "output", "threads",
      "dnn_depth", "dnn_width", "dnn_learning_rate", "dnn_batch_size",
      "dnn_epochs", "dnn_validation_fraction", "dnn_patience",
      "dnn_training_symbols", "dnn_label_source", "dnn_feature_mode"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InvalidParameter(std::string(key) + ": not a number '" + v + "'");
  }
  return out;
}

long long parse_integer(std::string_view key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InvalidParameter(std::string(key) + ": not an integer '" + v + "'");
  }
  return out;
}

int parse_int(std::string_view key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw InvalidParameter(std::string(key) + ": out of range '" + v + "'");
  }
  return static_cast<int>(x);
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

} // namespace

DetectorKind parse_detector(std::string_view name) {
  if (name == "ml") return DetectorKind::ML;
  if (name == "kmeans") return DetectorKind::KMeans;
  if (name == "dnn") return DetectorKind::DNN;
  throw InvalidParameter("detector: unknown '" + std::string(name) +
                         "' (expected ml, kmeans or dnn)");
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "ls") return EstimatorKind::LS;
  if (name == "lmmse") return EstimatorKind::LMMSE;
  if (name == "perfect") return EstimatorKind::Perfect;
  throw InvalidParameter("estimator: unknown '" + std::string(name) +
                         "' (expected ls, lmmse or perfect)");
}

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::ML: return "ml";
    case DetectorKind::KMeans: return "kmeans";
    case DetectorKind::DNN: return "dnn";
  }
  return "?";
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::LS: return "ls";
    case EstimatorKind::LMMSE: return "lmmse";
    case EstimatorKind::Perfect: return "perfect";
  }
  return "?";
}

void SimConfig::validate() const {
  if (n_t < 1) throw InvalidParameter("N_t: must be >= 1");
  if (n_r < 1) throw InvalidParameter("N_r: must be >= 1");
  if (n_r < n_t) {
    throw InvalidParameter("N_r: must be >= N_t (" + std::to_string(n_t) +
                           ") for linear equalization");
  }
  if (!is_power_of_two(m)) {
    throw InvalidParameter("M_constellation: " + std::to_string(m) +
                           " rejected, Must be a power of two");
  }
  (void)build_constellation(scheme, m);
  if (codeword_size < 1) throw InvalidParameter("codeword_size: must be >= 1");
  if (crc_length < 1) throw InvalidParameter("crc_length: must be >= 1");
  if (!crc_generator.empty()) {
    const CrcSpec spec(crc_generator);
    if (spec.length() != crc_length) {
      throw InvalidParameter("crc_generator: degree " + std::to_string(spec.length()) +
                             " does not match crc_length " + std::to_string(crc_length));
    }
  } else {
    (void)CrcSpec::default_for_length(crc_length);
  }
  if (n_pilot < n_t) {
    throw InvalidParameter("n_pilot: " + std::to_string(n_pilot) +
                           " is shorter than N_t = " + std::to_string(n_t));
  }
  if (noise_powers.empty()) throw InvalidParameter("noise_power: list is empty");
  for (double s : noise_powers) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidParameter("noise_power: every entry must be positive and finite");
    }
  }
  if (gain_override) {
    if (!(*gain_override > 0.0)) throw InvalidParameter("G_override: must be positive");
  } else {
    (void)large_scale_gain(geometry);
  }
  if (!(geometry.bandwidth_hz > 0.0)) throw InvalidParameter("bandwidth: must be positive");
  if (geometry.noise_density_w_per_hz < 0.0) throw InvalidParameter("N0: must be >= 0");
  if (detectors.empty()) throw InvalidParameter("detector: list is empty");
  if (n_transmissions < 1) throw InvalidParameter("n_transmissions: must be >= 1");
  if (threads < 0) throw InvalidParameter("threads: must be >= 0");
  if (dnn.feature_mode == FeatureMode::Raw && n_t != 1) {
    throw InvalidParameter("dnn_feature_mode: raw features require N_t = 1");
  }
  if (dnn.training_symbols < 2) throw InvalidParameter("dnn_training_symbols: must be >= 2");
  NetworkSpec{dnn.depth, dnn.width, 2, m, 0}.validate();
  dnn.hyper.validate();
}

double SimConfig::gain() const {
  return gain_override ? *gain_override : large_scale_gain(geometry);
}

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter("config line " + std::to_string(lineno) +
                             ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!known_keys().contains(key)) {
      throw InvalidParameter("config line " + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
    }
    if (map.contains(key)) {
      throw InvalidParameter("config line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'");
    }
    map.emplace(std::move(key), std::move(value));
  }
  return map;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

SimConfig config_from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    if (!known_keys().contains(key)) {
      throw InvalidParameter("unknown key '" + key + "'");
    }
  }
  SimConfig c;
  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  if (auto v = get("seed")) {
    const long long s = parse_integer("seed", *v);
    if (s < 0) throw InvalidParameter("seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("N_t")) c.n_t = parse_int("N_t", *v);
  if (auto v = get("N_r")) c.n_r = parse_int("N_r", *v);
  if (auto v = get("constellation")) c.scheme = parse_scheme(*v);
  if (auto v = get("M_constellation")) c.m = parse_int("M_constellation", *v);
  if (auto v = get("codeword_size")) {
    const long long n = parse_integer("codeword_size", *v);
    if (n < 1) throw InvalidParameter("codeword_size: must be >= 1");
    c.codeword_size = static_cast<std::size_t>(n);
  }
  if (auto v = get("crc_length")) c.crc_length = parse_int("crc_length", *v);
  if (auto v = get("crc_generator")) c.crc_generator = *v;
  if (auto v = get("n_pilot")) c.n_pilot = parse_int("n_pilot", *v);
  if (auto v = get("pilot_mode")) c.pilot_mode = parse_pilot_mode(*v);
  if (auto v = get("f_c")) c.geometry.carrier_hz = parse_double("f_c", *v);
  if (auto v = get("distance")) c.geometry.distance_m = parse_double("distance", *v);
  if (auto v = get("path_loss_exponent")) {
    c.geometry.path_loss_exponent = parse_double("path_loss_exponent", *v);
  }
  if (auto v = get("bandwidth")) c.geometry.bandwidth_hz = parse_double("bandwidth", *v);
  if (auto v = get("N0")) c.geometry.noise_density_w_per_hz = parse_double("N0", *v);
  if (auto v = get("G_override")) {
    if (*v == "none") {
      c.gain_override.reset();
    } else {
      c.gain_override = parse_double("G_override", *v);
    }
  }
  if (auto v = get("noise_power")) {
    c.noise_powers.clear();
    for (const auto& item : split_list(*v)) {
      c.noise_powers.push_back(parse_double("noise_power", item));
    }
  } else if (get("N0")) {
    // Noise given only as a density: a single point at N0 * B.
    c.noise_powers = {c.geometry.noise_power()};
  }
  std::sort(c.noise_powers.begin(), c.noise_powers.end());
  if (auto v = get("detector")) {
    c.detectors.clear();
    for (const auto& item : split_list(*v)) {
      const DetectorKind d = parse_detector(item);
      if (std::find(c.detectors.begin(), c.detectors.end(), d) != c.detectors.end()) {
        throw InvalidParameter("detector: '" + item + "' listed twice");
      }
      c.detectors.push_back(d);
    }
  }
  if (auto v = get("estimator")) c.estimator = parse_estimator(*v);
  if (auto v = get("equalizer")) c.equalizer = parse_equalizer(*v);
  if (auto v = get("n_transmissions")) c.n_transmissions = parse_int("n_transmissions", *v);
  if (auto v = get("payload_path")) c.payload_path = *v;
  if (auto v = get("output")) c.output = *v;
  if (auto v = get("threads")) c.threads = parse_int("threads", *v);
  if (auto v = get("dnn_depth")) c.dnn.depth = parse_int("dnn_depth", *v);
  if (auto v = get("dnn_width")) c.dnn.width = parse_int("dnn_width", *v);
  if (auto v = get("dnn_learning_rate")) {
    c.dnn.hyper.learning_rate = parse_double("dnn_learning_rate", *v);
  }
  if (auto v = get("dnn_batch_size")) c.dnn.hyper.batch_size = parse_int("dnn_batch_size", *v);
  if (auto v = get("dnn_epochs")) c.dnn.hyper.epochs = parse_int("dnn_epochs", *v);
  if (auto v = get("dnn_validation_fraction")) {
    c.dnn.hyper.validation_fraction = parse_double("dnn_validation_fraction", *v);
  }
  if (auto v = get("dnn_patience")) c.dnn.hyper.patience = parse_int("dnn_patience", *v);
  if (auto v = get("dnn_training_symbols")) {
    c.dnn.training_symbols = parse_int("dnn_training_symbols", *v);
  }
  if (auto v = get("dnn_label_source")) {
    if (*v == "truth") {
      c.dnn.label_source = LabelSource::GroundTruth;
    } else if (*v == "ml") {
      c.dnn.label_source = LabelSource::MlDetected;
    } else {
      throw InvalidParameter("dnn_label_source: expected truth or ml, got '" + *v + "'");
    }
  }
  if (auto v = get("dnn_feature_mode")) {
    if (*v == "equalized") {
      c.dnn.feature_mode = FeatureMode::Equalized;
    } else if (*v == "raw") {
      c.dnn.feature_mode = FeatureMode::Raw;
    } else {
      throw InvalidParameter("dnn_feature_mode: expected equalized or raw, got '" + *v + "'");
    }
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::optional<std::filesystem::path>& path,
                      const ConfigMap& overrides) {
  ConfigMap map = path ? read_config_file(*path) : ConfigMap{};
  for (const auto& [key, value] : overrides) map[key] = value;
  return config_from_map(map);
}

} // namespace mimosim
