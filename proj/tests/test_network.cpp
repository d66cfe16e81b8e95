#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "testutil.hpp"
#include "wordrec/error.hpp"
#include "wordrec/network.hpp"
#include "wordrec/rng.hpp"

using namespace wordrec;
using testutil::TempDir;

namespace {

Network zero_network(const std::vector<int>& sizes) {
  Network net;
  net.arch.layer_sizes = sizes;
  for (size_t l = 1; l < sizes.size(); ++l) {
    Layer layer;
    layer.weights = Matrix(static_cast<size_t>(sizes[l]), static_cast<size_t>(sizes[l - 1]));
    layer.biases.assign(static_cast<size_t>(sizes[l]), 0.0);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::vector<TrainSample> random_samples(const Network& net, size_t count, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<TrainSample> samples(count);
  for (TrainSample& s : samples) {
    s.x.resize(static_cast<size_t>(net.input_size()));
    for (double& v : s.x) v = value(gen);
    s.label = static_cast<int>(gen() % static_cast<unsigned>(net.output_size()));
  }
  return samples;
}

// test-side finite differences, independent of grad_check
double fd_gradient(Network& net, const TrainSample& s, const std::vector<double>& target,
                   double& param, double eps) {
  const double saved = param;
  param = saved + eps;
  const double up = loss(forward(net, s.x).back(), target);
  param = saved - eps;
  const double down = loss(forward(net, s.x).back(), target);
  param = saved;
  return (up - down) / (2.0 * eps);
}

}  // namespace

TEST_CASE("param_count") {
  CHECK(param_count({{112, 100, 95, 90, 95, 100, 60}}) == 53840);
  CHECK(param_count({{2, 3, 2}}) == 17);
  CHECK(param_count({{112, 60}}) == 6780);
}

TEST_CASE("init_network is deterministic and matches param_count") {
  const Architecture arch{{112, 100, 95, 90, 95, 100, 60}};
  const Network a = init_network(arch, 7);
  const Network b = init_network(arch, 7);
  REQUIRE(a.layers.size() == b.layers.size());
  int64_t params = 0;
  for (size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].weights == b.layers[l].weights);
    CHECK(a.layers[l].biases == b.layers[l].biases);
    params += static_cast<int64_t>(a.layers[l].weights.data.size() + a.layers[l].biases.size());
  }
  CHECK(params == param_count(arch));

  const Network c = init_network(arch, 8);
  CHECK(c.layers[0].weights.data != a.layers[0].weights.data);
}

TEST_CASE("init_network first-layer weight spread is near 1/sqrt(fan_in)") {
  const Network net = init_network({{112, 100, 95, 90, 95, 100, 60}}, 21);
  const auto& w = net.layers[0].weights.data;  // 11,200 draws
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double v : w) var += (v - mean) * (v - mean);
  var /= static_cast<double>(w.size() - 1);
  const double expected = 1.0 / std::sqrt(112.0);
  CHECK(std::sqrt(var) == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("forward with all-zero parameters yields 0.5 everywhere") {
  const Network net = zero_network({3, 4, 2});
  const auto acts = forward(net, {0.3, -0.2, 0.9});
  REQUIRE(acts.size() == 3);
  for (size_t l = 1; l < acts.size(); ++l) {
    for (double a : acts[l]) CHECK(a == 0.5);
  }
}

TEST_CASE("forward outputs stay strictly inside (0, 1)") {
  const Network net = init_network({{5, 8, 3}}, 3);
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = value(gen);
    const std::vector<double> out = forward(net, x).back();
    for (double o : out) {
      CHECK(o > 0.0);
      CHECK(o < 1.0);
    }
  }
}

TEST_CASE("forward validates the input size") {
  const Network net = zero_network({3, 2});
  CHECK_THROWS_AS(forward(net, {1.0, 2.0}), Error);
}

TEST_CASE("loss is the plain sum of squared differences") {
  CHECK(loss({0.2, 0.8}, {0.2, 0.8}) == 0.0);
  CHECK(loss({0.5, 0.5}, {1.0, 0.0}) == 0.5);
  CHECK_THROWS_AS(loss({0.5}, {1.0, 0.0}), Error);

  std::mt19937 gen(4);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> o(5), t(5);
    for (double& v : o) v = value(gen);
    for (double& v : t) v = value(gen);
    CHECK(loss(o, t) >= 0.0);
  }
}

TEST_CASE("backprop reproduces the hand-worked single-unit example") {
  // w = 0, b = 0, x = 1, t = 1: output 0.5, dL/db = dL/dw = -0.25
  const Network net = zero_network({1, 1});
  const Gradients g = backprop(net, {1.0}, {1.0});
  CHECK(g.db[0][0] == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(g.dw[0](0, 0) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("backprop vanishes when the output already matches the target") {
  Network net = zero_network({2, 2});
  net.layers[0].biases = {0.4, -0.3};
  const std::vector<double> out = forward(net, {0.0, 0.0}).back();
  const Gradients g = backprop(net, {0.0, 0.0}, out);
  for (const auto& db : g.db) {
    for (double v : db) CHECK(std::abs(v) < 1e-15);
  }
  for (const auto& dw : g.dw) {
    for (double v : dw.data) CHECK(std::abs(v) < 1e-15);
  }
}

TEST_CASE("grad_check confirms backprop on a random (5,4,3) network") {
  const Network net = init_network({{5, 4, 3}}, 17);
  const auto samples = random_samples(net, 5, 29);
  const GradCheckReport report = grad_check(net, samples, 1e-5);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("grad_check at the symmetric zero point is exact to machine scale") {
  const Network net = zero_network({2, 2});
  const std::vector<TrainSample> samples = {{{0.0, 0.0}, 0}};
  const GradCheckReport report = grad_check(net, samples, 1e-5);
  CHECK(report.max_rel_error < 1e-9);
}

TEST_CASE("grad_check passes across a range of step sizes") {
  const Network net = init_network({{4, 6, 2}}, 40);
  const auto samples = random_samples(net, 3, 41);
  for (double eps : {1e-4, 1e-5, 1e-6}) {
    CHECK(grad_check(net, samples, eps).max_rel_error < 1e-6);
  }
}

TEST_CASE("a corrupted gradient is flagged against finite differences") {
  Network net = init_network({{3, 4, 2}}, 5);
  const auto samples = random_samples(net, 1, 6);
  const std::vector<double> target = [&] {
    std::vector<double> t(2, 0.0);
    t[static_cast<size_t>(samples[0].label)] = 1.0;
    return t;
  }();

  Gradients g = backprop(net, samples[0].x, target);
  g.dw[0](1, 2) *= 2.0;  // fault injection

  double worst = 0.0;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    for (size_t o = 0; o < net.layers[l].weights.rows; ++o) {
      for (size_t i = 0; i < net.layers[l].weights.cols; ++i) {
        const double fd =
            fd_gradient(net, samples[0], target, net.layers[l].weights(o, i), 1e-5);
        const double rel = std::abs(g.dw[l](o, i) - fd) /
                           std::max({std::abs(g.dw[l](o, i)), std::abs(fd), 1e-8});
        worst = std::max(worst, rel);
      }
    }
  }
  CHECK(worst > 0.1);
}

TEST_CASE("one SGD step matches the hand-worked arithmetic") {
  const Network net = zero_network({1, 1});
  std::vector<TrainSample> data = {{{1.0}, 0}};  // one-hot target [1]
  TrainConfig cfg;
  cfg.lr0 = 0.05;
  cfg.decay = 0.95;
  cfg.epochs = 1;
  cfg.seed = 0;
  const TrainResult result = sgd_train(net, data, cfg);
  CHECK(result.network.layers[0].weights(0, 0) == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(result.network.layers[0].biases[0] == doctest::Approx(0.0125).epsilon(1e-15));
  REQUIRE(result.history.size() == 1);
  CHECK(result.history[0].mean_loss == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("the learning rate decays multiplicatively per epoch") {
  const Network net = init_network({{2, 3, 2}}, 9);
  std::vector<TrainSample> data = {{{0.1, 0.9}, 0}, {{0.8, 0.2}, 1}};
  TrainConfig cfg;
  cfg.lr0 = 0.05;
  cfg.decay = 0.95;
  cfg.epochs = 3;
  cfg.seed = 1;
  const TrainResult result = sgd_train(net, data, cfg);
  REQUIRE(result.history.size() == 3);
  CHECK(result.history[0].lr == 0.05);
  CHECK(result.history[1].lr == 0.05 * 0.95);
  CHECK(result.history[2].lr == 0.05 * 0.95 * 0.95);
  CHECK(result.history[2].lr == doctest::Approx(0.045125).epsilon(1e-12));
}

TEST_CASE("training is bit-identical for identical seeds") {
  const Network net = init_network({{4, 5, 3}}, 100);
  const auto data = random_samples(net, 12, 101);
  TrainConfig cfg;
  cfg.lr0 = 0.05;
  cfg.decay = 0.95;
  cfg.epochs = 5;
  cfg.seed = 77;
  const TrainResult a = sgd_train(net, data, cfg);
  const TrainResult b = sgd_train(net, data, cfg);
  for (size_t l = 0; l < a.network.layers.size(); ++l) {
    CHECK(a.network.layers[l].weights == b.network.layers[l].weights);
    CHECK(a.network.layers[l].biases == b.network.layers[l].biases);
  }
  REQUIRE(a.history.size() == b.history.size());
  for (size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].mean_loss == b.history[e].mean_loss);
    CHECK(a.history[e].train_accuracy == b.history[e].train_accuracy);
  }
}

TEST_CASE("a small step along the gradient never raises that sample's loss") {
  std::mt19937 gen(301);
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = init_network({{4, 6, 3}}, static_cast<uint64_t>(trial));
    const auto samples = random_samples(net, 1, static_cast<unsigned>(trial + 1000));
    std::vector<double> target(3, 0.0);
    target[static_cast<size_t>(samples[0].label)] = 1.0;

    const double before = loss(forward(net, samples[0].x).back(), target);
    const Gradients g = backprop(net, samples[0].x, target);

    Network stepped = net;
    const double lr = 1e-3;
    for (size_t l = 0; l < stepped.layers.size(); ++l) {
      for (size_t i = 0; i < stepped.layers[l].weights.data.size(); ++i) {
        stepped.layers[l].weights.data[i] -= lr * g.dw[l].data[i];
      }
      for (size_t o = 0; o < stepped.layers[l].biases.size(); ++o) {
        stepped.layers[l].biases[o] -= lr * g.db[l][o];
      }
    }
    const double after = loss(forward(stepped, samples[0].x).back(), target);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("epoch shuffles are permutations") {
  Rng rng(404);
  std::vector<size_t> order(257);
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < 5; ++epoch) {
    rng.shuffle(order);
    std::vector<size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("sgd_train validates its inputs") {
  const Network net = zero_network({2, 2});
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(sgd_train(net, {}, cfg), Error);

  std::vector<TrainSample> data = {{{0.1, 0.2}, 0}};
  cfg.epochs = 0;
  CHECK_THROWS_AS(sgd_train(net, data, cfg), Error);

  cfg.epochs = 1;
  std::vector<TrainSample> bad = {{{0.1}, 0}};
  CHECK_THROWS_AS(sgd_train(net, bad, cfg), Error);
}

TEST_CASE("max_updates caps the number of single-sample steps") {
  const Network net = init_network({{2, 3, 2}}, 50);
  const auto data = random_samples(net, 10, 51);
  TrainConfig cfg;
  cfg.lr0 = 0.05;
  cfg.decay = 1.0;
  cfg.epochs = 100;
  cfg.seed = 1;
  cfg.max_updates = 25;
  const TrainResult result = sgd_train(net, data, cfg);
  // 10 + 10 + 5 visited samples: history stops in epoch 3
  CHECK(result.history.size() == 3);
}

TEST_CASE("predict takes the argmax with ties to the lowest index") {
  Network net = zero_network({1, 3});
  auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  net.layers[0].biases = {logit(0.1), logit(0.9), logit(0.3)};
  const Prediction p = predict(net, {0.0});
  CHECK(p.class_index == 1);
  CHECK(p.scores[1] == doctest::Approx(0.9).epsilon(1e-12));

  net.layers[0].biases = {logit(0.5), logit(0.5), logit(0.2)};
  CHECK(predict(net, {0.0}).class_index == 0);

  // argmax is invariant under the (monotone) sigmoid, so score order
  // follows bias order
  net.layers[0].biases = {-1.0, 2.0, 0.5};
  const Prediction q = predict(net, {0.0});
  CHECK(q.class_index == 1);
  CHECK(q.scores[1] > q.scores[2]);
  CHECK(q.scores[2] > q.scores[0]);
}

TEST_CASE("models round trip bit-exactly through JSON") {
  TempDir dir("model");
  const Network net = init_network({{3, 5, 2}}, 33);
  ModelMeta meta;
  meta.kmeans_k = 8;
  meta.coeff_count = 14;
  meta.labels = {"left", "right"};
  save_model(net, meta, dir.str("m.json"));

  const Model loaded = load_model(dir.str("m.json"));
  CHECK(loaded.network.arch.layer_sizes == net.arch.layer_sizes);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(loaded.network.layers[l].weights == net.layers[l].weights);
    CHECK(loaded.network.layers[l].biases == net.layers[l].biases);
  }
  CHECK(loaded.meta.kmeans_k == 8);
  CHECK(loaded.meta.coeff_count == 14);
  CHECK(loaded.meta.labels == meta.labels);
}

TEST_CASE("load_model rejects bad files with specific errors") {
  TempDir dir("model");

  try {
    load_model(dir.str("missing.json"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_file);
  }

  testutil::write_file(dir.str("v99.json"),
                       R"({"format_version":99,"architecture":[2,2],"layers":[]})");
  try {
    load_model(dir.str("v99.json"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::schema_mismatch);
  }

  testutil::write_file(
      dir.str("shape.json"),
      R"({"format_version":1,"architecture":[2,2],"feature_config":{"k":8,"coeff_count":14},
          "label_table":[],"layers":[{"weights":[[1.0,2.0]],"biases":[0.0]}]})");
  try {
    load_model(dir.str("shape.json"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::shape_mismatch);
  }

  testutil::write_file(dir.str("junk.json"), "not json");
  try {
    load_model(dir.str("junk.json"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::schema_mismatch);
  }
}
