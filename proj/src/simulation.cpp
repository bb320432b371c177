#include "mimosim/simulation.hpp"

#include <cmath>
#include <iostream>

#include <omp.h>

#include "mimosim/channel.hpp"
#include "mimosim/channel_estimation.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/metrics.hpp"
#include "mimosim/receiver.hpp"

namespace mimosim {

namespace {

CrcSpec make_crc(const SimConfig& c) {
  return c.crc_generator.empty() ? CrcSpec::default_for_length(c.crc_length)
                                 : CrcSpec(c.crc_generator);
}

} // namespace

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)),
      table_(build_constellation(config_.scheme, config_.m)),
      crc_(make_crc(config_)),
      gain_(0.0) {
  config_.validate();
  gain_ = config_.gain();
  if (!config_.payload_path.empty()) {
    const BitVector bits = load_payload_bits(config_.payload_path);
    for (std::size_t start = 0; start < bits.size(); start += config_.codeword_size) {
      BitVector chunk(config_.codeword_size, 0);
      const std::size_t n = std::min(config_.codeword_size, bits.size() - start);
      std::copy_n(bits.begin() + static_cast<std::ptrdiff_t>(start), n, chunk.begin());
      payload_blocks_.push_back(std::move(chunk));
    }
    if (payload_blocks_.empty()) {
      throw InvalidParameter("payload_path: '" + config_.payload_path.string() +
                             "' is empty");
    }
  }
}

RandomStream Simulator::trial_stream(std::size_t noise_index,
                                     std::size_t trial_index) const {
  return RandomStream::derive(config_.seed, {noise_index, trial_index});
}

BitVector Simulator::trial_payload(std::size_t trial_index, RandomStream& rng) const {
  if (!payload_blocks_.empty()) {
    return payload_blocks_[trial_index % payload_blocks_.size()];
  }
  BitVector bits(config_.codeword_size);
  for (std::size_t i = 0; i < bits.size(); i += 64) {
    std::uint64_t word = rng.bits();
    for (std::size_t b = i; b < std::min(bits.size(), i + 64); ++b) {
      bits[b] = static_cast<std::uint8_t>(word & 1u);
      word >>= 1;
    }
  }
  return bits;
}

BlockTransmission Simulator::transmit_block(BitVector payload, double sigma2,
                                            RandomStream& rng) const {
  const int n_t = config_.n_t;
  const int n_r = config_.n_r;
  const int k = table_.bits_per_symbol();

  BlockTransmission tx;
  tx.block = make_transport_block(payload, crc_, k, n_t);
  tx.tx_bits = tx.block.bits();
  tx.tx_indices = map_bits_to_symbols(tx.tx_bits, table_);

  const auto uses = static_cast<Eigen::Index>(tx.tx_indices.size()) / n_t;
  const double tx_scale = 1.0 / std::sqrt(static_cast<double>(n_t));
  CMatrix x(n_t, uses);
  for (Eigen::Index u = 0; u < uses; ++u) {
    for (int s = 0; s < n_t; ++s) {
      x(s, u) = tx_scale * table_.point(tx.tx_indices[static_cast<std::size_t>(u * n_t + s)]);
    }
  }

  const ChannelRealization channel{sample_channel(n_r, n_t, rng), gain_, sigma2};
  tx.h = channel.h;
  tx.y = apply_channel(channel, x, rng);

  const CMatrix x_p = build_pilot_matrix(n_t, config_.n_pilot, rng, config_.pilot_mode);
  const CMatrix y_p = transmit_pilots(channel, x_p, rng);
  switch (config_.estimator) {
    case EstimatorKind::LS: tx.h_hat = estimate_ls(y_p, x_p, gain_); break;
    case EstimatorKind::LMMSE: tx.h_hat = estimate_lmmse(y_p, x_p, gain_, sigma2); break;
    case EstimatorKind::Perfect: tx.h_hat = tx.h; break;
  }

  try {
    const CMatrix w = config_.equalizer == EqualizerKind::ZF
                          ? zf_equalizer(tx.h_hat, gain_)
                          : lmmse_equalizer(tx.h_hat, gain_, sigma2);
    // Undo the 1/sqrt(N_t) transmit scaling so detectors see table units.
    tx.s_hat = (w * tx.y) / tx_scale;
    if (!tx.s_hat.allFinite()) tx.equalization_failed = true;
  } catch (const SingularMatrix&) {
    tx.equalization_failed = true;
  }
  return tx;
}

RMatrix Simulator::dnn_features(const BlockTransmission& tx) const {
  if (config_.dnn.feature_mode == FeatureMode::Raw) {
    // N_t = 1: one row [Re y, Im y] per channel use.
    RMatrix f(tx.y.cols(), 2 * tx.y.rows());
    for (Eigen::Index u = 0; u < tx.y.cols(); ++u) {
      for (Eigen::Index r = 0; r < tx.y.rows(); ++r) {
        f(u, r) = tx.y(r, u).real();
        f(u, tx.y.rows() + r) = tx.y(r, u).imag();
      }
    }
    return f;
  }
  const auto n = tx.s_hat.size();
  RMatrix f(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    f(j, 0) = tx.s_hat.reshaped()(j).real();
    f(j, 1) = tx.s_hat.reshaped()(j).imag();
  }
  return f;
}

IndexVector Simulator::detect(const BlockTransmission& tx, DetectorKind detector,
                              const Network* network) const {
  const std::span<const Complex> symbols(tx.s_hat.data(),
                                         static_cast<std::size_t>(tx.s_hat.size()));
  switch (detector) {
    case DetectorKind::ML:
      return detect_ml(symbols, table_).indices;
    case DetectorKind::KMeans: {
      const auto points = to_iq_points(symbols);
      return detect_kmeans(points, table_).indices;
    }
    case DetectorKind::DNN:
      if (network == nullptr) throw InvalidParameter("detector: dnn requires a trained network");
      return predict(*network, dnn_features(tx));
  }
  return {};
}

TrialOutcome Simulator::run_trial(std::size_t noise_index, std::size_t trial_index,
                                  DetectorKind detector, const Network* network) const {
  const double sigma2 = config_.noise_powers.at(noise_index);
  RandomStream rng = trial_stream(noise_index, trial_index);
  BitVector payload = trial_payload(trial_index, rng);
  const BlockTransmission tx = transmit_block(payload, sigma2, rng);

  TrialOutcome out;
  out.symbols = tx.tx_indices.size();
  out.bits = tx.tx_bits.size();
  out.channel_mse = estimation_mse(error_vector(tx.h, tx.h_hat), config_.n_r, config_.n_t);
  if (tx.equalization_failed || (detector == DetectorKind::DNN && network == nullptr)) {
    out.equalization_failed = tx.equalization_failed;
    out.symbol_errors = out.symbols;
    out.bit_errors = out.bits;
    out.payload_error = true;
    out.crc_ok = false;
    return out;
  }

  const IndexVector detected = detect(tx, detector, network);
  const BitVector rx_bits = symbols_to_bits(detected, table_);
  for (std::size_t j = 0; j < detected.size(); ++j) {
    out.symbol_errors += detected[j] != tx.tx_indices[j];
  }
  for (std::size_t b = 0; b < rx_bits.size(); ++b) {
    out.bit_errors += rx_bits[b] != tx.tx_bits[b];
  }
  const ExtractedBlock rx = extract_and_check(rx_bits, config_.codeword_size, crc_,
                                              table_.bits_per_symbol(), config_.n_t);
  out.crc_ok = rx.crc_ok;
  out.payload_error = rx.payload_bits != payload;
  return out;
}

TrainingSet Simulator::training_set(std::size_t noise_index) const {
  const double sigma2 = config_.noise_powers.at(noise_index);
  RandomStream rng = RandomStream::derive(config_.seed, {noise_index, kTrainingStreamKey});
  const auto target = static_cast<Eigen::Index>(config_.dnn.training_symbols);
  const Eigen::Index width =
      config_.dnn.feature_mode == FeatureMode::Raw ? 2 * config_.n_r : 2;

  TrainingSet set;
  set.features.resize(target, width);
  set.labels.reserve(static_cast<std::size_t>(target));
  Eigen::Index filled = 0;
  for (std::size_t block = 0; filled < target; ++block) {
    const BlockTransmission tx = transmit_block(trial_payload(block, rng), sigma2, rng);
    if (tx.equalization_failed) continue;
    const RMatrix f = dnn_features(tx);
    const IndexVector labels = config_.dnn.label_source == LabelSource::GroundTruth
                                   ? tx.tx_indices
                                   : detect(tx, DetectorKind::ML, nullptr);
    const Eigen::Index take = std::min(f.rows(), target - filled);
    set.features.middleRows(filled, take) = f.topRows(take);
    set.labels.insert(set.labels.end(), labels.begin(), labels.begin() + take);
    filled += take;
  }
  return set;
}

std::optional<Network> Simulator::train_detector(std::size_t noise_index) const {
  NetworkSpec spec;
  spec.depth = config_.dnn.depth;
  spec.width = config_.dnn.width;
  spec.input_dim = config_.dnn.feature_mode == FeatureMode::Raw ? 2 * config_.n_r : 2;
  spec.output_dim = table_.size();
  spec.seed = RandomStream::derive(config_.seed, {noise_index, kNetworkSeedKey}).bits();
  Network net(spec);
  try {
    train(net, training_set(noise_index), config_.dnn.hyper);
  } catch (const TrainingDiverged& e) {
    std::cerr << "warning: noise_power " << config_.noise_powers[noise_index]
              << ": " << e.what() << "; marking record as failed\n";
    return std::nullopt;
  }
  return net;
}

std::vector<TrialOutcome> Simulator::run_point(std::size_t noise_index,
                                               DetectorKind detector,
                                               const Network* network,
                                               int threads) const {
  const auto n = static_cast<std::ptrdiff_t>(config_.n_transmissions);
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(n));
  if (threads == 1) {
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      outcomes[t] = run_trial(noise_index, static_cast<std::size_t>(t), detector, network);
    }
    return outcomes;
  }
  const int team = threads > 0 ? threads : omp_get_max_threads();
  // Every trial owns its substream and output slot, so the schedule cannot
  // change any result.
#pragma omp parallel for schedule(dynamic, 8) num_threads(team)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    outcomes[t] = run_trial(noise_index, static_cast<std::size_t>(t), detector, network);
  }
  return outcomes;
}

SweepRecord Simulator::aggregate(std::size_t noise_index, DetectorKind detector,
                                 const std::vector<TrialOutcome>& outcomes) const {
  const double sigma2 = config_.noise_powers[noise_index];
  SweepRecord r;
  r.noise_power = sigma2;
  r.snr_tx_db = tx_snr_db(sigma2, config_.n_t);
  r.ebn0_tx_db = tx_ebn0_db(sigma2, config_.n_t, table_.bits_per_symbol());
  r.detector = std::string(to_string(detector));
  r.estimator = std::string(to_string(config_.estimator));
  r.seed = config_.seed;

  // Ordered reduction by trial index.
  double mse_sum = 0.0;
  std::size_t sym_err = 0, syms = 0, bit_err = 0, bits = 0;
  std::vector<bool> crc_ok;
  crc_ok.reserve(outcomes.size());
  for (const TrialOutcome& o : outcomes) {
    mse_sum += o.channel_mse;
    sym_err += o.symbol_errors;
    syms += o.symbols;
    bit_err += o.bit_errors;
    bits += o.bits;
    crc_ok.push_back(o.crc_ok);
  }
  r.channel_mse = mse_sum / static_cast<double>(outcomes.size());
  r.bler = bler(crc_ok);
  r.ser = static_cast<double>(sym_err) / static_cast<double>(syms);
  r.ber = static_cast<double>(bit_err) / static_cast<double>(bits);
  r.classification_error = r.ser;
  return r;
}

std::vector<SweepRecord> Simulator::run_sweep(int threads) const {
  std::vector<SweepRecord> records;
  for (std::size_t p = 0; p < config_.noise_powers.size(); ++p) {
    for (DetectorKind d : config_.detectors) {
      std::optional<Network> net;
      if (d == DetectorKind::DNN) net = train_detector(p);
      const Network* np = net ? &*net : nullptr;
      SweepRecord rec = aggregate(p, d, run_point(p, d, np, threads));
      if (d == DetectorKind::DNN && !net) rec.classification_error = 1.0;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

} // namespace mimosim
