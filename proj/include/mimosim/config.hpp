#ifndef MIMOSIM_CONFIG_HPP
#define MIMOSIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/channel_estimation.hpp"
#include "mimosim/constellation.hpp"
#include "mimosim/neural_detector.hpp"
#include "mimosim/receiver.hpp"

namespace mimosim {

enum class DetectorKind { ML, KMeans, DNN };
enum class EstimatorKind { LS, LMMSE, Perfect };
enum class LabelSource { GroundTruth, MlDetected };
enum class FeatureMode { Equalized, Raw };

DetectorKind parse_detector(std::string_view name);
EstimatorKind parse_estimator(std::string_view name);
std::string_view to_string(DetectorKind kind);
std::string_view to_string(EstimatorKind kind);

struct DnnSettings {
  int depth = 2;
  int width = 32;
  Hyperparameters hyper;
  int training_symbols = 10000;
  LabelSource label_source = LabelSource::GroundTruth;
  FeatureMode feature_mode = FeatureMode::Equalized;
};

struct SimConfig {
  std::uint64_t seed = 7;
  int n_t = 16;
  int n_r = 16;
  Scheme scheme = Scheme::QAM;
  int m = 64;
  std::size_t codeword_size = 16;
  int crc_length = 2;
  std::string crc_generator; // empty: default generator for crc_length
  int n_pilot = 20;
  PilotMode pilot_mode = PilotMode::UnitaryRandom;
  std::vector<double> noise_powers{1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2};
  LinkGeometry geometry;
  std::optional<double> gain_override = 1.0; // nullopt: path-loss model
  std::vector<DetectorKind> detectors{DetectorKind::ML};
  EstimatorKind estimator = EstimatorKind::LS;
  EqualizerKind equalizer = EqualizerKind::ZF;
  int n_transmissions = 1000;
  std::filesystem::path payload_path; // empty: random payload per block
  std::filesystem::path output = "output.csv";
  int threads = 0;                    // 0: OpenMP default
  DnnSettings dnn;

  /// Throws InvalidParameter naming the first offending parameter.
  void validate() const;

  /// Large-scale gain G in effect for this configuration.
  double gain() const;
};

/// Raw key/value pairs. Keys are the SimConfig parameter names listed in
/// the README; values are strings, lists are comma separated.
using ConfigMap = std::map<std::string, std::string, std::less<>>;

/// Parses "key = value" lines; '#' starts a comment. Throws
/// InvalidParameter on malformed lines, duplicate or unknown keys.
ConfigMap parse_config_text(std::string_view text);
ConfigMap read_config_file(const std::filesystem::path& path);

/// Builds and validates a configuration. Keys absent from the map keep
/// their defaults. Noise powers are sorted ascending.
SimConfig config_from_map(const ConfigMap& map);

/// File values overridden by `overrides` (CLI flags).
SimConfig load_config(const std::optional<std::filesystem::path>& path,
                      const ConfigMap& overrides = {});

} // namespace mimosim

#endif // MIMOSIM_CONFIG_HPP
