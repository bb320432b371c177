#ifndef MIMOSIM_SIMULATION_HPP
#define MIMOSIM_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimosim/config.hpp"
#include "mimosim/constellation.hpp"
#include "mimosim/framing.hpp"
#include "mimosim/neural_detector.hpp"
#include "mimosim/random.hpp"

namespace mimosim {

/// Everything that happened to one transport block on the air, up to and
/// including equalization. Detection is applied separately so the same
/// transmission can feed several detectors.
struct BlockTransmission {
  TransportBlock block;
  BitVector tx_bits;
  IndexVector tx_indices; // symbol j rides stream j % N_t in use j / N_t
  CMatrix h;
  CMatrix h_hat;
  CMatrix y;              // N_r x uses, received data
  CMatrix s_hat;          // N_t x uses, equalized, in constellation units
  bool equalization_failed = false;
};

struct TrialOutcome {
  bool crc_ok = false;
  bool payload_error = false; // any payload bit wrong, CRC aside
  bool equalization_failed = false;
  double channel_mse = 0.0;
  std::size_t symbol_errors = 0;
  std::size_t symbols = 0;
  std::size_t bit_errors = 0;
  std::size_t bits = 0;
};

/// One line of output.csv.
struct SweepRecord {
  double noise_power = 0.0;
  double snr_tx_db = 0.0;
  double ebn0_tx_db = 0.0;
  double channel_mse = 0.0;
  double bler = 0.0;
  double ser = 0.0;
  double ber = 0.0;
  double classification_error = 0.0;
  std::string detector;
  std::string estimator;
  std::uint64_t seed = 0;
};

/// Key reserved for the DNN training substream of a noise point.
inline constexpr std::uint64_t kTrainingStreamKey = 0xD4E7'0000'0000'0001ULL;
inline constexpr std::uint64_t kNetworkSeedKey = 0xD4E7'0000'0000'0002ULL;

class Simulator {
public:
  explicit Simulator(SimConfig config);

  const SimConfig& config() const noexcept { return config_; }
  const ConstellationTable& table() const noexcept { return table_; }
  const CrcSpec& crc() const noexcept { return crc_; }
  double gain() const noexcept { return gain_; }

  /// Substream of trial `trial_index` at noise point `noise_index`.
  RandomStream trial_stream(std::size_t noise_index, std::size_t trial_index) const;

  /// Payload for a trial: the next file block, or fresh random bits.
  BitVector trial_payload(std::size_t trial_index, RandomStream& rng) const;

  /// Runs the transmit chain for one block. Draw order on `rng`: H, data
  /// noise, pilot matrix, pilot noise, so the estimator choice does not
  /// perturb the data noise.
  BlockTransmission transmit_block(BitVector payload, double sigma2,
                                   RandomStream& rng) const;

  /// Detected indices for a transmission, in symbol order.
  IndexVector detect(const BlockTransmission& tx, DetectorKind detector,
                     const Network* network) const;

  /// Features for the neural detector, one row per symbol.
  RMatrix dnn_features(const BlockTransmission& tx) const;

  /// Full pipeline for one trial. Equalization failure counts the block as
  /// failed and every symbol as wrong.
  TrialOutcome run_trial(std::size_t noise_index, std::size_t trial_index,
                         DetectorKind detector,
                         const Network* network = nullptr) const;

  /// Training data for the neural detector at one noise point, drawn from
  /// a substream disjoint from every trial stream.
  TrainingSet training_set(std::size_t noise_index) const;

  /// Trains the neural detector for a noise point; nullopt on divergence.
  std::optional<Network> train_detector(std::size_t noise_index) const;

  /// Records ordered by noise power, then by the configured detector order.
  /// threads = 0 uses the OpenMP default; 1 runs the serial path.
  std::vector<SweepRecord> run_sweep(int threads) const;
  std::vector<SweepRecord> run_sweep() const { return run_sweep(config_.threads); }

  /// Single-threaded reference sweep.
  std::vector<SweepRecord> run_sweep_serial() const { return run_sweep(1); }

private:
  std::vector<TrialOutcome> run_point(std::size_t noise_index, DetectorKind detector,
                                      const Network* network, int threads) const;
  SweepRecord aggregate(std::size_t noise_index, DetectorKind detector,
                        const std::vector<TrialOutcome>& outcomes) const;

  SimConfig config_;
  ConstellationTable table_;
  CrcSpec crc_;
  double gain_;
  std::vector<BitVector> payload_blocks_; // from payload_path, if any
};

inline std::vector<SweepRecord> run_sweep(const SimConfig& config) {
  return Simulator(config).run_sweep();
}

} // namespace mimosim

#endif // MIMOSIM_SIMULATION_HPP
