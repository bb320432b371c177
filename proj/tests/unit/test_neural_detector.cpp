#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numeric>

#include <omp.h>

#include "mimosim/constellation.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/neural_detector.hpp"
#include "mimosim/receiver.hpp"

using namespace mimosim;

namespace {

RMatrix random_features(int rows, int cols, RandomStream& rng) {
  RMatrix x(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) x(r, c) = rng.uniform(-1.5, 1.5);
  }
  return x;
}

IndexVector random_labels(int rows, int classes, RandomStream& rng) {
  IndexVector y(rows);
  for (auto& v : y) v = static_cast<SymbolIndex>(rng.bits() % static_cast<std::uint64_t>(classes));
  return y;
}

double loss_at(const Network& net, const RMatrix& x, const IndexVector& y) {
  return cross_entropy(forward(net, x), one_hot(y, net.spec().output_dim));
}

// Noisy QPSK points with their transmitted labels.
TrainingSet qpsk_set(int n, double sigma2, RandomStream& rng, const ConstellationTable& t) {
  TrainingSet s{RMatrix(n, 2), IndexVector(n)};
  for (int i = 0; i < n; ++i) {
    const auto m = static_cast<SymbolIndex>(rng.bits() % 4);
    const Complex p = t.point(m) + rng.complex_normal(sigma2);
    s.features(i, 0) = p.real();
    s.features(i, 1) = p.imag();
    s.labels[i] = m;
  }
  return s;
}

} // namespace

TEST_CASE("initialization") {
  const NetworkSpec spec{1, 1, 2, 4, 99};
  const Network a(spec), b(spec);
  CHECK(a.parameter_count() == 11);
  CHECK(a.flat_parameters() == b.flat_parameters());
  for (const auto& l : a.layers()) CHECK(l.bias.isZero(0.0));

  const Network wide(NetworkSpec{1, 64, 64, 4, 5});
  const RMatrix& w = wide.layers()[0].weights;
  const double limit = std::sqrt(6.0 / 128.0);
  CHECK(w.maxCoeff() <= limit);
  CHECK(w.minCoeff() >= -limit);
  const double sd_of_mean = limit / std::sqrt(3.0 * static_cast<double>(w.size()));
  CHECK(std::abs(w.mean()) < 3.0 * sd_of_mean);

  CHECK_THROWS_AS(Network(NetworkSpec{0, 4, 2, 4, 1}), InvalidParameter);
  CHECK_THROWS_AS(Network(NetworkSpec{1, 0, 2, 4, 1}), InvalidParameter);
}

TEST_CASE("forward pass") {
  RandomStream rng(1);
  Network net(NetworkSpec{2, 8, 2, 16, 3});
  const RMatrix x = random_features(50, 2, rng);
  const RMatrix p = forward(net, x);
  CHECK(p.rows() == 50);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-9);
    CHECK(p.row(r).minCoeff() > 0.0);
    CHECK(p.row(r).maxCoeff() < 1.0);
  }
  CHECK_THROWS_AS((void)forward(net, random_features(3, 5, rng)), ShapeError);

  net.set_flat_parameters(RVector::Zero(static_cast<Eigen::Index>(net.parameter_count())));
  const RMatrix u = forward(net, x);
  CHECK((u.array() - 1.0 / 16.0).abs().maxCoeff() < 1e-15);

  Network tiny(NetworkSpec{1, 1, 2, 2, 0});
  tiny.layers()[0].weights << 0.5, -0.25;
  tiny.layers()[0].bias << 0.1;
  tiny.layers()[1].weights << 1.0, -1.0;
  tiny.layers()[1].bias << 0.0, 0.2;
  RMatrix one(1, 2);
  one << 1.0, 2.0;
  const RMatrix q = forward(tiny, one);
  // sigma(0.1) = 0.52497918747894; softmax of [a, 0.2 - a].
  CHECK(std::abs(q(0, 0) - 0.700558410598550398) < 1e-12);
  CHECK(std::abs(q(0, 1) - 0.299441589401449602) < 1e-12);
}

TEST_CASE("cross-entropy") {
  const IndexVector y{0, 2, 1};
  const RMatrix t = one_hot(y, 3);
  CHECK(cross_entropy(t, t) <= 1e-9);
  const RMatrix uniform = RMatrix::Constant(3, 3, 1.0 / 3.0);
  CHECK(std::abs(cross_entropy(uniform, t) - std::log(3.0)) < 1e-15);

  RandomStream rng(2);
  RMatrix p = random_features(20, 5, rng).array().abs() + 0.01;
  for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
  const IndexVector labels = random_labels(20, 5, rng);
  double oracle = 0.0;
  for (int r = 0; r < 20; ++r) oracle += -std::log(p(r, labels[r]));
  CHECK(std::abs(cross_entropy(p, one_hot(labels, 5)) - oracle / 20.0) < 1e-12);
  CHECK(cross_entropy(p, one_hot(labels, 5)) >= 0.0);

  CHECK_THROWS_AS((void)one_hot(IndexVector{3}, 3), InvalidParameter);
  CHECK_THROWS_AS((void)cross_entropy(uniform, RMatrix::Zero(2, 3)), ShapeError);
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    CAPTURE(seed);
    RandomStream rng(seed);
    Network net(NetworkSpec{2, 8, 2, 4, seed});
    // Non-zero biases so every parameter is exercised.
    RVector params = net.flat_parameters();
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) += rng.uniform(-0.3, 0.3);
    net.set_flat_parameters(params);
    const RMatrix x = random_features(16, 2, rng);
    const IndexVector y = random_labels(16, 4, rng);

    const RVector g = gradient(net, x, y).flat();
    REQUIRE(static_cast<std::size_t>(g.size()) == net.parameter_count());
    const double h = 1e-6;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      RVector plus = params, minus = params;
      plus(i) += h;
      minus(i) -= h;
      net.set_flat_parameters(plus);
      const double lp = loss_at(net, x, y);
      net.set_flat_parameters(minus);
      const double lm = loss_at(net, x, y);
      const double fd = (lp - lm) / (2.0 * h);
      worst = std::max(worst, std::abs(g(i) - fd) / std::max(1.0, std::abs(g(i))));
    }
    net.set_flat_parameters(params);
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("gradient structure") {
  RandomStream rng(4);
  Network net(NetworkSpec{2, 6, 2, 3, 4});
  const RMatrix x = random_features(12, 2, rng);
  const IndexVector y = random_labels(12, 3, rng);

  // Batch gradient is the mean of per-sample gradients.
  const RVector batch = gradient(net, x, y).flat();
  RVector mean = RVector::Zero(batch.size());
  for (int r = 0; r < 12; ++r) {
    mean += gradient(net, RMatrix(x.row(r)), IndexVector{y[r]}).flat();
  }
  mean /= 12.0;
  CHECK((batch - mean).cwiseAbs().maxCoeff() < 1e-12);

  // Permuting rows with their labels leaves the gradient unchanged.
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  RMatrix xp(12, 2);
  IndexVector yp(12);
  for (int r = 0; r < 12; ++r) {
    xp.row(r) = x.row(perm[r]);
    yp[r] = y[perm[r]];
  }
  CHECK((gradient(net, xp, yp).flat() - batch).cwiseAbs().maxCoeff() < 1e-12);

  // Saturated correct prediction: p - y = 0 at the output.
  Network sat(NetworkSpec{1, 2, 2, 3, 1});
  sat.layers()[1].weights.setZero();
  sat.layers()[1].bias << 0.0, 2000.0, 0.0;
  const auto g = gradient(sat, random_features(4, 2, rng), IndexVector{1, 1, 1, 1});
  CHECK(g.layers[1].weights.isZero(0.0));
  CHECK(g.layers[1].bias.isZero(0.0));
}

TEST_CASE("training on a separable toy problem beats the uniform predictor") {
  RandomStream rng(5);
  TrainingSet data{RMatrix(400, 2), IndexVector(400)};
  for (int i = 0; i < 400; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    data.features(i, 0) = a;
    data.features(i, 1) = b;
    data.labels[i] = a + b > 0 ? 1 : 0;
  }
  Network net(NetworkSpec{1, 4, 2, 2, 8});
  Hyperparameters hp;
  hp.epochs = 50;
  hp.learning_rate = 0.5;
  const auto hist = train(net, data, hp);
  CHECK(hist.training_loss.size() <= 50);
  CHECK(*std::min_element(hist.training_loss.begin(), hist.training_loss.end()) < std::log(2.0));
}

TEST_CASE("zero learning rate leaves the network untouched") {
  RandomStream rng(6);
  const auto t = build_constellation(Scheme::QPSK, 4);
  const TrainingSet data = qpsk_set(300, 0.01, rng, t);
  Network net(NetworkSpec{2, 4, 2, 4, 9});
  const RVector before = net.flat_parameters();
  Hyperparameters hp;
  hp.learning_rate = 0.0;
  hp.epochs = 5;
  hp.patience = 10;
  const auto hist = train(net, data, hp);
  CHECK(net.flat_parameters() == before);
  REQUIRE(hist.training_loss.size() == 5);
  for (double l : hist.training_loss) CHECK(l == hist.training_loss.front());
}

TEST_CASE("non-finite data reports divergence with the epoch") {
  RandomStream rng(7);
  const auto t = build_constellation(Scheme::QPSK, 4);
  TrainingSet data = qpsk_set(100, 0.01, rng, t);
  data.features(3, 0) = std::nan("");
  Network net(NetworkSpec{1, 4, 2, 4, 1});
  try {
    train(net, data, Hyperparameters{});
    FAIL("expected TrainingDiverged");
  } catch (const TrainingDiverged& e) {
    CHECK(e.epoch() == 0);
  }
}

TEST_CASE("QPSK detector reaches ML-level accuracy and is deterministic") {
  const auto t = build_constellation(Scheme::QPSK, 4);
  RandomStream rng(8);
  const TrainingSet data = qpsk_set(10000, 1e-3, rng, t);
  const TrainingSet test = qpsk_set(2000, 1e-3, rng, t);

  Network net(NetworkSpec{2, 16, 2, 4, 21});
  const auto hist = train(net, data, Hyperparameters{});
  const IndexVector pred = predict(net, test.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test.labels[i];
  CHECK(static_cast<double>(correct) / pred.size() >= 0.99);

  // predict is the arg-max of forward.
  const RMatrix p = forward(net, test.features);
  for (Eigen::Index r = 0; r < 50; ++r) {
    Eigen::Index arg = 0;
    p.row(r).maxCoeff(&arg);
    CHECK(pred[r] == static_cast<SymbolIndex>(arg));
  }

  const int saved = omp_get_max_threads();
  omp_set_num_threads(saved > 1 ? 1 : 4);
  Network again(NetworkSpec{2, 16, 2, 4, 21});
  const auto hist2 = train(again, data, Hyperparameters{});
  omp_set_num_threads(saved);
  CHECK(hist2.training_loss == hist.training_loss);
  CHECK(hist2.validation_loss == hist.validation_loss);
  CHECK(again.flat_parameters() == net.flat_parameters());
}

TEST_CASE("save and load round trip") {
  Network net(NetworkSpec{3, 5, 2, 16, 123});
  RandomStream rng(10);
  RVector params = net.flat_parameters();
  for (Eigen::Index i = 0; i < params.size(); ++i) params(i) += rng.uniform(-1, 1) * 1e-3;
  net.set_flat_parameters(params);
  const auto path = std::filesystem::temp_directory_path() / "mimosim_net.txt";
  save_network(net, path);
  const Network back = load_network(path);
  CHECK(back.spec().depth == 3);
  CHECK(back.spec().width == 5);
  CHECK(back.spec().output_dim == 16);
  CHECK(back.spec().seed == 123);
  CHECK(back.flat_parameters() == net.flat_parameters());
  CHECK_THROWS_AS((void)load_network("/nonexistent/mimosim/net.txt"), IoError);
}
