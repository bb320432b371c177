#ifndef MIMOSIM_NEURAL_DETECTOR_HPP
#define MIMOSIM_NEURAL_DETECTOR_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mimosim/random.hpp"
#include "mimosim/types.hpp"

namespace mimosim {

/// Fully connected classifier: `depth` sigmoid hidden layers of `width`
/// units followed by a softmax layer of `output_dim` classes.
struct NetworkSpec {
  int depth = 2;
  int width = 32;
  int input_dim = 2;
  int output_dim = 4;
  std::uint64_t seed = 7;

  void validate() const;
};

struct Hyperparameters {
  double learning_rate = 0.05;
  int batch_size = 64;
  int epochs = 200;
  double validation_fraction = 0.2;
  int patience = 10;

  void validate() const;
};

/// Rows of `features` are samples; labels are class indices in [0, M).
struct TrainingSet {
  RMatrix features;
  IndexVector labels;
};

struct DenseLayer {
  RMatrix weights; // out x in
  RVector bias;    // out
};

class Network {
public:
  /// Glorot-uniform weights and zero biases, drawn from a stream seeded by
  /// spec.seed. The same stream later shuffles training data.
  explicit Network(const NetworkSpec& spec);

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  RandomStream& stream() noexcept { return stream_; }

  std::size_t parameter_count() const;

  /// All parameters as one vector: per layer, weights row-major then bias.
  RVector flat_parameters() const;
  void set_flat_parameters(const RVector& params);

private:
  NetworkSpec spec_;
  std::vector<DenseLayer> layers_;
  RandomStream stream_;
};

inline Network init_network(const NetworkSpec& spec) { return Network(spec); }

/// Class probabilities, one row per input row. Throws ShapeError when the
/// feature width differs from input_dim.
RMatrix forward(const Network& net, const RMatrix& features);

RMatrix one_hot(std::span<const SymbolIndex> labels, int classes);

inline constexpr double kProbabilityClamp = 1e-12;

/// Mean categorical cross-entropy with p clamped to [1e-12, 1 - 1e-12].
double cross_entropy(const RMatrix& probabilities, const RMatrix& targets);

/// Gradient of the mean clamped cross-entropy, laid out like the network.
struct NetworkGradient {
  std::vector<DenseLayer> layers;
  RVector flat() const;
};

NetworkGradient gradient(const Network& net, const RMatrix& features,
                         std::span<const SymbolIndex> labels);

struct TrainingHistory {
  std::vector<double> training_loss;   // per epoch, full training split
  std::vector<double> validation_loss; // per epoch
  int best_epoch = 0;
};

/// Mini-batch gradient descent with per-epoch shuffling and early stopping
/// on validation loss. The best-validation parameters are kept.
/// Throws TrainingDiverged on a non-finite loss.
TrainingHistory train(Network& net, const TrainingSet& data,
                      const Hyperparameters& hyper);

/// Arg-max class per row, ties to the lowest index.
IndexVector predict(const Network& net, const RMatrix& features);

/// Text format:
///   line 1  "mimosim-dnn 1"
///   line 2  "seed <seed>"
///   line 3  "dims <input> <hidden...> <output>"
///   then every parameter in flat_parameters() order, one per line, %.17g.
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

} // namespace mimosim

#endif // MIMOSIM_NEURAL_DETECTOR_HPP
