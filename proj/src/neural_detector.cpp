#include "mimosim/neural_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "mimosim/errors.hpp"

namespace mimosim {

namespace {

RMatrix sigmoid(const RMatrix& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

/// Column-wise softmax; each column is one sample.
RMatrix softmax_columns(const RMatrix& z) {
  RMatrix out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double mx = z.col(c).maxCoeff();
    const RVector e = (z.col(c).array() - mx).exp().matrix();
    out.col(c) = e / e.sum();
  }
  return out;
}

/// Activations of every layer with samples as columns. acts[0] is the input.
std::vector<RMatrix> forward_all(const Network& net, const RMatrix& features) {
  if (features.cols() != net.spec().input_dim) {
    throw ShapeError("forward: feature width " + std::to_string(features.cols()) +
                     " != input_dim " + std::to_string(net.spec().input_dim));
  }
  const auto& layers = net.layers();
  std::vector<RMatrix> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(features.transpose());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    RMatrix z = layers[l].weights * acts.back();
    z.colwise() += layers[l].bias;
    acts.push_back(l + 1 == layers.size() ? softmax_columns(z) : sigmoid(z));
  }
  return acts;
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

RMatrix gather_rows(const RMatrix& m, std::span<const std::size_t> rows) {
  RMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

IndexVector gather(const IndexVector& v, std::span<const std::size_t> rows) {
  IndexVector out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

double dataset_loss(const Network& net, const RMatrix& x, const IndexVector& y) {
  return cross_entropy(forward(net, x), one_hot(y, net.spec().output_dim));
}

} // namespace

void NetworkSpec::validate() const {
  if (depth < 1) throw InvalidParameter("dnn_depth: must be >= 1");
  if (width < 1) throw InvalidParameter("dnn_width: must be >= 1");
  if (input_dim < 1) throw InvalidParameter("dnn input_dim: must be >= 1");
  if (output_dim < 2) throw InvalidParameter("dnn output_dim: must be >= 2");
}

void Hyperparameters::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidParameter("dnn_learning_rate: must be finite and >= 0");
  }
  if (batch_size < 1) throw InvalidParameter("dnn_batch_size: must be >= 1");
  if (epochs < 1) throw InvalidParameter("dnn_epochs: must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidParameter("dnn_validation_fraction: must lie in (0, 1)");
  }
  if (patience < 1) throw InvalidParameter("dnn_patience: must be >= 1");
}

Network::Network(const NetworkSpec& spec) : spec_(spec), stream_(spec.seed) {
  spec_.validate();
  std::vector<int> dims{spec_.input_dim};
  for (int i = 0; i < spec_.depth; ++i) dims.push_back(spec_.width);
  dims.push_back(spec_.output_dim);

  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer{RMatrix(fan_out, fan_in), RVector::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.weights(r, c) = stream_.uniform(-limit, limit);
      }
    }
    layers_.push_back(std::move(layer));
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  }
  return n;
}

static RVector flatten(const std::vector<DenseLayer>& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  RVector out(static_cast<Eigen::Index>(n));
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out(pos++) = l.weights(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out(pos++) = l.bias(r);
  }
  return out;
}

RVector Network::flat_parameters() const { return flatten(layers_); }

void Network::set_flat_parameters(const RVector& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) {
    throw ShapeError("set_flat_parameters: expected " +
                     std::to_string(parameter_count()) + " values, got " +
                     std::to_string(params.size()));
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = params(pos++);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = params(pos++);
  }
}

RVector NetworkGradient::flat() const { return flatten(layers); }

RMatrix forward(const Network& net, const RMatrix& features) {
  return forward_all(net, features).back().transpose();
}

RMatrix one_hot(std::span<const SymbolIndex> labels, int classes) {
  RMatrix y = RMatrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= static_cast<SymbolIndex>(classes)) {
      throw InvalidParameter("label " + std::to_string(labels[i]) +
                             " out of range for " + std::to_string(classes) +
                             " classes");
    }
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

double cross_entropy(const RMatrix& probabilities, const RMatrix& targets) {
  if (probabilities.rows() != targets.rows() || probabilities.cols() != targets.cols()) {
    throw ShapeError("cross_entropy: probability and target shapes differ");
  }
  if (probabilities.rows() == 0) {
    throw UndefinedMeasure("cross_entropy: empty batch");
  }
  double total = 0.0;
  for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
    for (Eigen::Index c = 0; c < probabilities.cols(); ++c) {
      if (targets(r, c) != 0.0) {
        total -= targets(r, c) * std::log(clamp_probability(probabilities(r, c)));
      }
    }
  }
  return total / static_cast<double>(probabilities.rows());
}

NetworkGradient gradient(const Network& net, const RMatrix& features,
                         std::span<const SymbolIndex> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("gradient: feature rows and label count differ");
  }
  const auto acts = forward_all(net, features);
  const auto& layers = net.layers();
  const RMatrix targets = one_hot(labels, net.spec().output_dim).transpose();
  const RMatrix& p = acts.back();
  const double n = static_cast<double>(features.rows());

  // dL/dz_j = p_j * sum_m y_m a_m - y_j a_j, where a_m is 1 while p_m lies
  // inside the clamp interval and 0 where the clamp is saturated.
  RMatrix delta(p.rows(), p.cols());
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    double active_mass = 0.0;
    RVector ya(p.rows());
    for (Eigen::Index m = 0; m < p.rows(); ++m) {
      const double pm = p(m, c);
      const bool active = pm >= kProbabilityClamp && pm <= 1.0 - kProbabilityClamp;
      ya(m) = active ? targets(m, c) : 0.0;
      active_mass += ya(m);
    }
    delta.col(c) = (p.col(c) * active_mass - ya) / n;
  }

  NetworkGradient g;
  g.layers.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    g.layers[l].weights = delta * acts[l].transpose();
    g.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      const RMatrix& a = acts[l];
      delta = ((layers[l].weights.transpose() * delta).array() * a.array() *
               (1.0 - a.array())).matrix();
    }
  }
  return g;
}

TrainingHistory train(Network& net, const TrainingSet& data,
                      const Hyperparameters& hyper) {
  hyper.validate();
  const auto n = static_cast<std::size_t>(data.features.rows());
  if (n < 2) throw InvalidParameter("train: need at least 2 samples");
  if (data.labels.size() != n) throw ShapeError("train: label count != sample count");
  if (data.features.cols() != net.spec().input_dim) {
    throw ShapeError("train: feature width != input_dim");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), net.stream().engine());
  auto n_val = static_cast<std::size_t>(std::floor(hyper.validation_fraction * n));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  const RMatrix x_train = gather_rows(data.features, train_rows);
  const IndexVector y_train = gather(data.labels, train_rows);
  const RMatrix x_val = gather_rows(data.features, val_rows);
  const IndexVector y_val = gather(data.labels, val_rows);

  TrainingHistory hist;
  RVector best_params = net.flat_parameters();
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<std::size_t> perm(train_rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  const auto batch = static_cast<std::size_t>(hyper.batch_size);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), net.stream().engine());
    for (std::size_t start = 0; start < perm.size(); start += batch) {
      const std::size_t len = std::min(batch, perm.size() - start);
      const std::span<const std::size_t> rows(perm.data() + start, len);
      const NetworkGradient g =
          gradient(net, gather_rows(x_train, rows), gather(y_train, rows));
      auto& layers = net.layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].weights -= hyper.learning_rate * g.layers[l].weights;
        layers[l].bias -= hyper.learning_rate * g.layers[l].bias;
      }
    }

    const double train_loss = dataset_loss(net, x_train, y_train);
    const double val_loss = dataset_loss(net, x_val, y_val);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw TrainingDiverged(epoch, "training diverged at epoch " + std::to_string(epoch));
    }
    hist.training_loss.push_back(train_loss);
    hist.validation_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = net.flat_parameters();
      hist.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  net.set_flat_parameters(best_params);
  return hist;
}

IndexVector predict(const Network& net, const RMatrix& features) {
  const RMatrix p = forward(net, features);
  IndexVector out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c) {
      if (p(r, c) > p(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<SymbolIndex>(best);
  }
  return out;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write network file '" + path.string() + "'");
  out << "mimosim-dnn 1\n";
  out << "seed " << net.spec().seed << "\n";
  out << "dims " << net.spec().input_dim;
  for (int i = 0; i < net.spec().depth; ++i) out << ' ' << net.spec().width;
  out << ' ' << net.spec().output_dim << "\n";
  const RVector params = net.flat_parameters();
  char buf[40];
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", params(i));
    out << buf;
  }
  if (!out) throw IoError("error writing network file '" + path.string() + "'");
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file '" + path.string() + "'");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "mimosim-dnn" || version != 1) {
    throw IoError("'" + path.string() + "' is not a mimosim-dnn v1 file");
  }
  std::string tag;
  NetworkSpec spec;
  in >> tag >> spec.seed;
  if (tag != "seed") throw IoError("network file: expected 'seed'");
  in >> tag;
  if (tag != "dims") throw IoError("network file: expected 'dims'");
  std::string line;
  std::getline(in, line);
  std::istringstream dims_in(line);
  std::vector<int> dims;
  for (int d; dims_in >> d;) dims.push_back(d);
  if (dims.size() < 3) throw IoError("network file: need at least one hidden layer");
  for (std::size_t i = 2; i + 1 < dims.size(); ++i) {
    if (dims[i] != dims[1]) throw IoError("network file: hidden widths must match");
  }
  spec.input_dim = dims.front();
  spec.output_dim = dims.back();
  spec.width = dims[1];
  spec.depth = static_cast<int>(dims.size()) - 2;
  Network net(spec);
  RVector params(static_cast<Eigen::Index>(net.parameter_count()));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    if (!(in >> params(i))) throw IoError("network file: truncated parameter list");
  }
  net.set_flat_parameters(params);
  return net;
}

} // namespace mimosim
