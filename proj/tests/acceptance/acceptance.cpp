// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/channel_estimation.hpp"
#include "mimosim/config.hpp"
#include "mimosim/constellation.hpp"
#include "mimosim/csv.hpp"
#include "mimosim/framing.hpp"
#include "mimosim/metrics.hpp"
#include "mimosim/neural_detector.hpp"
#include "mimosim/random.hpp"
#include "mimosim/receiver.hpp"
#include "mimosim/simulation.hpp"

using namespace mimosim;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

Verdict pilot_semi_unitarity() {
  RandomStream rng(101);
  double worst = 0.0;
  int cases = 0;
  for (int n_t : {1, 2, 4, 8, 16}) {
    for (int n_pilot = n_t; n_pilot <= 64; ++n_pilot) {
      for (PilotMode mode : {PilotMode::UnitaryRandom, PilotMode::Permutation}) {
        const CMatrix x = build_pilot_matrix(n_t, n_pilot, rng, mode);
        const CMatrix gram = x * x.adjoint();
        worst = std::max(worst, (gram - CMatrix::Identity(n_t, n_t)).norm());
        ++cases;
      }
    }
  }
  return {worst < 1e-10, fmt("%d pilot matrices, max ||X X^H - I||_F = %.3e (< 1e-10)", cases, worst)};
}

Verdict noiseless_ls() {
  RandomStream rng(102);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const int n_t = 1 + static_cast<int>(rng.bits() % 8);
    const int n_r = n_t + static_cast<int>(rng.bits() % 8);
    const int n_pilot = n_t + static_cast<int>(rng.bits() % 16);
    ChannelRealization ch{sample_channel(n_r, n_t, rng), std::pow(10.0, rng.uniform(-12.0, 0.0)), 0.0};
    const CMatrix x = build_pilot_matrix(n_t, n_pilot, rng);
    const CMatrix y = transmit_pilots(ch, x, rng);
    const CMatrix h_hat = estimate_ls(y, x, ch.gain);
    worst = std::max(worst, estimation_mse(error_vector(ch.h, h_hat), n_r, n_t));
  }
  return {worst < 1e-18, fmt("100 draws, max MSE = %.3e (< 1e-18)", worst)};
}

Verdict estimation_mse_closed_forms() {
  const int n = 4, n_pilot = 8, reps = 2000;
  bool ok = true;
  std::string detail;
  for (double sigma2 : {0.01, 0.1, 1.0}) {
    RandomStream rng = RandomStream::derive(103, {static_cast<std::uint64_t>(sigma2 * 1000)});
    double ls = 0.0, mmse = 0.0;
    for (int r = 0; r < reps; ++r) {
      ChannelRealization ch{sample_channel(n, n, rng), 1.0, sigma2};
      const CMatrix x = build_pilot_matrix(n, n_pilot, rng);
      const CMatrix y = transmit_pilots(ch, x, rng);
      ls += estimation_mse(error_vector(ch.h, estimate_ls(y, x, 1.0)), n, n);
      mmse += estimation_mse(error_vector(ch.h, estimate_lmmse(y, x, 1.0, sigma2)), n, n);
    }
    ls /= reps;
    mmse /= reps;
    const double ls_ref = sigma2, mmse_ref = sigma2 / (1.0 + sigma2);
    const double ls_dev = std::abs(ls / ls_ref - 1.0), mmse_dev = std::abs(mmse / mmse_ref - 1.0);
    ok = ok && ls_dev < 0.05 && mmse_dev < 0.05 && mmse < ls;
    detail += fmt("s2=%g LS %.4g (%+.2f%%) LMMSE %.4g (%+.2f%%); ", sigma2, ls,
                  100 * (ls / ls_ref - 1), mmse, 100 * (mmse / mmse_ref - 1));
  }
  return {ok, detail + "tolerance 5%, LMMSE < LS"};
}

Verdict detector_identity() {
  const std::size_t n = 100000;
  std::size_t mismatches = 0;
  std::string detail;
  for (int m : {4, 16, 64, 256}) {
    const auto table = build_constellation(m == 4 ? Scheme::QPSK : Scheme::QAM, m);
    RandomStream rng = RandomStream::derive(104, {static_cast<std::uint64_t>(m)});
    std::vector<Complex> s(n);
    for (auto& v : s) v = table.point(static_cast<SymbolIndex>(rng.bits() % m)) + rng.complex_normal(0.05);
    const auto ml = detect_ml(s, table);
    const auto km = detect_kmeans(to_iq_points(s), table);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < n; ++i) diff += ml.indices[i] != km.indices[i];
    mismatches += diff;
    detail += fmt("M=%d %zu/%zu equal; ", m, n - diff, n);
  }
  return {mismatches == 0, detail + "required 100%"};
}

Verdict awgn_ber() {
  const std::vector<double> ebn0_db{0.0, 2.0, 4.0, 6.0};
  std::string noise;
  for (double e : ebn0_db) {
    if (!noise.empty()) noise += ",";
    noise += format_double(1.0 / (2.0 * std::pow(10.0, e / 10.0)));
  }
  const Simulator sim(config_from_map({{"N_t", "1"}, {"N_r", "1"}, {"constellation", "QPSK"},
                                       {"M_constellation", "4"}, {"n_pilot", "1"},
                                       {"codeword_size", "998"}, {"crc_length", "2"},
                                       {"estimator", "perfect"}, {"G_override", "1"},
                                       {"noise_power", noise}, {"detector", "ml"},
                                       {"n_transmissions", "200"}}));
  const auto recs = sim.run_sweep();
  const double bits = 200.0 * 1000.0;
  bool ok = recs.size() == ebn0_db.size();
  std::string detail;
  for (const auto& r : recs) {
    const double ebn0 = std::pow(10.0, r.ebn0_tx_db / 10.0);
    const double p = q_function(std::sqrt(2.0 * ebn0));
    const double tol = 3.0 * std::sqrt(p * (1.0 - p) / bits);
    ok = ok && std::abs(r.ber - p) <= tol;
    detail += fmt("%.0fdB BER %.4e vs %.4e (+-%.1e); ", std::round(r.ebn0_tx_db) + 0.0, r.ber, p, tol);
  }
  return {ok, detail + "2e5 bits/point"};
}

Verdict dnn_gradient_check() {
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Network net(NetworkSpec{2, 8, 2, 4, seed});
    RandomStream rng = RandomStream::derive(106, {seed});
    RVector params = net.flat_parameters();
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) += rng.uniform(-0.5, 0.5);
    net.set_flat_parameters(params);
    RMatrix x(32, 2);
    IndexVector y(32);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      x(r, 0) = rng.normal();
      x(r, 1) = rng.normal();
      y[r] = static_cast<SymbolIndex>(rng.bits() % 4);
    }
    const RMatrix targets = one_hot(y, 4);
    const RVector g = gradient(net, x, y).flat();
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      RVector p = params;
      p(i) += h;
      net.set_flat_parameters(p);
      const double up = cross_entropy(forward(net, x), targets);
      p(i) -= 2 * h;
      net.set_flat_parameters(p);
      const double down = cross_entropy(forward(net, x), targets);
      const double fd = (up - down) / (2 * h);
      const double scale = std::max(std::abs(g(i)), std::abs(fd));
      worst = std::max(worst, scale == 0.0 ? 0.0 : std::abs(g(i) - fd) / scale);
    }
  }
  return {worst < 1e-5, fmt("D=2 W=8, 3 seeds, max relative error %.3e (< 1e-5)", worst)};
}

Verdict dnn_parity() {
  const Simulator sim(config_from_map({{"N_t", "1"}, {"N_r", "1"}, {"constellation", "QPSK"},
                                       {"M_constellation", "4"}, {"n_pilot", "1"},
                                       {"codeword_size", "198"}, {"noise_power", "1e-3"},
                                       {"dnn_training_symbols", "10000"}, {"detector", "dnn"},
                                       {"n_transmissions", "100"}}));
  const auto net = sim.train_detector(0);
  if (!net) return {false, "training diverged"};
  std::size_t agree = 0, total = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    RandomStream rng = sim.trial_stream(0, t);
    const auto tx = sim.transmit_block(sim.trial_payload(t, rng), 1e-3, rng);
    const auto ml = sim.detect(tx, DetectorKind::ML, nullptr);
    const auto dnn = sim.detect(tx, DetectorKind::DNN, &*net);
    for (std::size_t i = 0; i < ml.size(); ++i) agree += ml[i] == dnn[i];
    total += ml.size();
  }
  const double rate = static_cast<double>(agree) / total;
  return {total == 10000 && rate >= 0.99,
          fmt("%zu/%zu test symbols agree with ML (%.2f%%, >= 99%%)", agree, total, 100 * rate)};
}

Verdict crc_detection() {
  const CrcSpec spec = CrcSpec::default_for_length(2);
  std::size_t patterns = 0, missed = 0;
  std::vector<std::uint8_t> payload(16), word(18);
  for (std::uint32_t v = 0; v < (1u << 16); ++v) {
    for (int i = 0; i < 16; ++i) payload[i] = (v >> (15 - i)) & 1u;
    const BitVector crc = crc_compute(payload, spec);
    std::copy(payload.begin(), payload.end(), word.begin());
    std::copy(crc.begin(), crc.end(), word.begin() + 16);
    for (int len = 1; len <= 2; ++len) {
      for (int start = 0; start + len <= 18; ++start) {
        for (int j = 0; j < len; ++j) word[start + j] ^= 1u;
        ++patterns;
        missed += crc_verify(std::span(word).first(16), std::span(word).subspan(16), spec);
        for (int j = 0; j < len; ++j) word[start + j] ^= 1u;
      }
    }
  }
  std::string generator;
  for (auto b : spec.generator()) generator += static_cast<char>('0' + b);
  return {missed == 0, fmt("generator %s, %zu error patterns over all 2^16 payloads, %zu undetected",
                           generator.c_str(), patterns, missed)};
}

Verdict bler_monotonic_and_deterministic() {
  const SimConfig cfg = config_from_map({{"n_transmissions", "1000"}});
  const Simulator sim(cfg);
  const auto recs = sim.run_sweep(1);
  int inversions = 0;
  bool within = true;
  std::string detail = "BLER";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    detail += fmt(" %.3f", recs[i].bler);
    if (i == 0 || recs[i].bler >= recs[i - 1].bler) continue;
    ++inversions;
    const double p = 0.5 * (recs[i].bler + recs[i - 1].bler);
    within = within && recs[i - 1].bler - recs[i].bler <= 3.0 * std::sqrt(2.0 * p * (1 - p) / 1000.0);
  }
  const std::string reference = format_csv(recs);
  bool identical = true;
  for (int threads : {2, 4, 0}) identical = identical && format_csv(sim.run_sweep(threads)) == reference;
  return {inversions <= 1 && within && identical,
          detail + fmt("; %d inversion(s); CSV identical at 1/2/4/all threads: %s", inversions,
                       identical ? "yes" : "no")};
}

Verdict metric_formulas() {
  const double snr = tx_snr_db(5e-3, 16), ebn0 = tx_ebn0_db(5e-3, 16, 6);
  return {std::abs(snr - 10.969) <= 1e-3 && std::abs(ebn0 - 3.188) <= 1e-3,
          fmt("tx_snr_db = %.6f (10.969), tx_ebn0_db = %.6f (3.188), tolerance 1e-3", snr, ebn0)};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "pilot semi-unitarity", 5, pilot_semi_unitarity},
      {2, "noiseless LS identity", 5, noiseless_ls},
      {3, "estimation MSE closed forms", 30, estimation_mse_closed_forms},
      {4, "K-means / ML identity", 30, detector_identity},
      {5, "AWGN BER oracle", 60, awgn_ber},
      {6, "DNN gradient check", 10, dnn_gradient_check},
      {7, "DNN parity with ML", 60, dnn_parity},
      {8, "CRC error detection", 1, crc_detection},
      {9, "BLER monotonicity and determinism", 120, bler_monotonic_and_deterministic},
      {10, "metric formulas", 1, metric_formulas},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = v.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("%s [%d] %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
