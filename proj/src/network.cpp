#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wordrec/error.hpp"
#include "wordrec/network.hpp"
#include "wordrec/rng.hpp"

namespace wordrec {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_architecture(const Architecture& arch) {
  if (arch.layer_sizes.size() < 2) {
    fail(Errc::invalid_config, "architecture needs at least input and output layers");
  }
  for (int n : arch.layer_sizes) {
    if (n < 1) fail(Errc::invalid_config, "architecture layer sizes must be >= 1");
  }
}

std::vector<double> one_hot(int label, int classes) {
  if (label < 0 || label >= classes) {
    fail(Errc::dimension_mismatch,
         "label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
  }
  std::vector<double> t(static_cast<size_t>(classes), 0.0);
  t[static_cast<size_t>(label)] = 1.0;
  return t;
}

void check_input_size(const Network& net, const std::vector<double>& x) {
  if (x.size() != static_cast<size_t>(net.input_size())) {
    fail(Errc::dimension_mismatch,
         "input of " + std::to_string(x.size()) + " values, network expects " +
             std::to_string(net.input_size()));
  }
}

}  // namespace

std::string GradCheckReport::coordinate() const {
  if (layer < 0) return "none";
  std::string where = "layer " + std::to_string(layer) + " ";
  where += (col < 0) ? "bias[" + std::to_string(row) + "]"
                     : "weight[" + std::to_string(row) + "][" + std::to_string(col) + "]";
  where += " (sample " + std::to_string(sample) + ")";
  return where;
}

int64_t param_count(const Architecture& arch) {
  validate_architecture(arch);
  int64_t total = 0;
  for (size_t l = 1; l < arch.layer_sizes.size(); ++l) {
    const int64_t in = arch.layer_sizes[l - 1];
    const int64_t out = arch.layer_sizes[l];
    total += in * out + out;
  }
  return total;
}

Network init_network(const Architecture& arch, uint64_t seed) {
  validate_architecture(arch);
  Rng rng(mix_seed(seed, 0x6e657477ULL));

  Network net;
  net.arch = arch;
  net.layers.resize(arch.layer_sizes.size() - 1);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const size_t in = static_cast<size_t>(arch.layer_sizes[l]);
    const size_t out = static_cast<size_t>(arch.layer_sizes[l + 1]);
    const double weight_std = 1.0 / std::sqrt(static_cast<double>(in));
    Layer& layer = net.layers[l];
    layer.weights = Matrix(out, in);
    layer.biases.resize(out);
    for (double& w : layer.weights.data) w = rng.gaussian(0.0, weight_std);
    for (double& b : layer.biases) b = rng.gaussian(0.0, 0.01);
  }
  return net;
}

std::vector<std::vector<double>> forward(const Network& net, const std::vector<double>& x) {
  check_input_size(net, x);

  std::vector<std::vector<double>> activations;
  activations.reserve(net.layers.size() + 1);
  activations.push_back(x);
  for (const Layer& layer : net.layers) {
    const std::vector<double>& prev = activations.back();
    std::vector<double> next(layer.biases.size());
    for (size_t o = 0; o < next.size(); ++o) {
      const double* w = layer.weights.row(o);
      double z = layer.biases[o];
      for (size_t i = 0; i < prev.size(); ++i) z += w[i] * prev[i];
      next[o] = sigmoid(z);
    }
    activations.push_back(std::move(next));
  }
  return activations;
}

double loss(const std::vector<double>& output, const std::vector<double>& target) {
  if (output.size() != target.size()) {
    fail(Errc::dimension_mismatch, "loss: output and target sizes differ");
  }
  double acc = 0.0;
  for (size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    acc += d * d;
  }
  return acc;
}

Gradients backprop(const Network& net, const std::vector<double>& x,
                   const std::vector<double>& target) {
  if (target.size() != static_cast<size_t>(net.output_size())) {
    fail(Errc::dimension_mismatch, "backprop: target size differs from output layer");
  }
  const std::vector<std::vector<double>> a = forward(net, x);

  Gradients g;
  g.dw.resize(net.layers.size());
  g.db.resize(net.layers.size());

  // output delta: dL/dz = 2 (o - t) * o * (1 - o)
  const std::vector<double>& out = a.back();
  std::vector<double> delta(out.size());
  for (size_t j = 0; j < out.size(); ++j) {
    delta[j] = 2.0 * (out[j] - target[j]) * out[j] * (1.0 - out[j]);
  }

  for (size_t l = net.layers.size(); l-- > 0;) {
    const std::vector<double>& prev = a[l];
    g.db[l] = delta;
    g.dw[l] = Matrix(delta.size(), prev.size());
    for (size_t o = 0; o < delta.size(); ++o) {
      double* row = g.dw[l].row(o);
      for (size_t i = 0; i < prev.size(); ++i) row[i] = delta[o] * prev[i];
    }
    if (l == 0) break;

    const Layer& layer = net.layers[l];
    std::vector<double> next_delta(prev.size(), 0.0);
    for (size_t o = 0; o < delta.size(); ++o) {
      const double* row = layer.weights.row(o);
      for (size_t i = 0; i < prev.size(); ++i) next_delta[i] += row[i] * delta[o];
    }
    for (size_t i = 0; i < prev.size(); ++i) {
      next_delta[i] *= prev[i] * (1.0 - prev[i]);
    }
    delta = std::move(next_delta);
  }
  return g;
}

TrainResult sgd_train(Network net, const std::vector<TrainSample>& data,
                      const TrainConfig& cfg, const ProgressSink& progress) {
  if (data.empty()) fail(Errc::empty_training_set, "sgd_train: no training samples");
  if (cfg.epochs < 1) fail(Errc::invalid_config, "sgd_train: epochs must be >= 1");
  if (cfg.lr0 <= 0.0) fail(Errc::invalid_config, "sgd_train: lr0 must be positive");
  if (!(cfg.decay > 0.0 && cfg.decay <= 1.0)) {
    fail(Errc::invalid_config, "sgd_train: decay must be in (0, 1]");
  }
  for (const TrainSample& s : data) check_input_size(net, s.x);

  const int classes = net.output_size();
  Rng shuffle_rng(mix_seed(cfg.seed, 0x73687566ULL));

  TrainResult result;
  double lr = cfg.lr0;
  uint64_t updates = 0;
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    size_t correct = 0;
    size_t seen = 0;
    for (size_t idx : order) {
      if (cfg.max_updates != 0 && updates >= cfg.max_updates) break;
      const TrainSample& sample = data[idx];
      const std::vector<double> target = one_hot(sample.label, classes);

      const std::vector<std::vector<double>> a = forward(net, sample.x);
      const std::vector<double>& out = a.back();
      loss_sum += loss(out, target);
      const auto arg =
          std::max_element(out.begin(), out.end()) - out.begin();
      if (static_cast<int>(arg) == sample.label) ++correct;
      ++seen;

      // backward pass reusing the activations above
      std::vector<double> delta(out.size());
      for (size_t j = 0; j < out.size(); ++j) {
        delta[j] = 2.0 * (out[j] - target[j]) * out[j] * (1.0 - out[j]);
      }
      for (size_t l = net.layers.size(); l-- > 0;) {
        Layer& layer = net.layers[l];
        const std::vector<double>& prev = a[l];

        std::vector<double> next_delta;
        if (l > 0) {
          next_delta.assign(prev.size(), 0.0);
          for (size_t o = 0; o < delta.size(); ++o) {
            const double* row = layer.weights.row(o);
            for (size_t i = 0; i < prev.size(); ++i) next_delta[i] += row[i] * delta[o];
          }
          for (size_t i = 0; i < prev.size(); ++i) {
            next_delta[i] *= prev[i] * (1.0 - prev[i]);
          }
        }

        for (size_t o = 0; o < delta.size(); ++o) {
          double* row = layer.weights.row(o);
          const double step = lr * delta[o];
          for (size_t i = 0; i < prev.size(); ++i) row[i] -= step * prev[i];
          layer.biases[o] -= step;
        }
        delta = std::move(next_delta);
      }
      ++updates;
    }
    if (seen == 0) break;

    for (const Layer& layer : net.layers) {
      for (double w : layer.weights.data) {
        if (!std::isfinite(w)) fail(Errc::numeric_failure, "sgd_train: non-finite weight");
      }
      for (double b : layer.biases) {
        if (!std::isfinite(b)) fail(Errc::numeric_failure, "sgd_train: non-finite bias");
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.mean_loss = loss_sum / static_cast<double>(seen);
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    result.history.push_back(stats);
    if (progress) progress(stats);

    lr *= cfg.decay;
    if (cfg.max_updates != 0 && updates >= cfg.max_updates) break;
  }

  result.network = std::move(net);
  return result;
}

Prediction predict(const Network& net, const std::vector<double>& x) {
  Prediction p;
  p.scores = forward(net, x).back();
  p.class_index = static_cast<int>(
      std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin());
  return p;
}

namespace {

// Loss of the network with one parameter nudged by `delta`, evaluated in
// extended precision. Central differences cancel catastrophically in plain
// doubles once gradients get small; the comparison needs the oracle side to
// be strictly more accurate than the backprop side it judges.
long double perturbed_loss(const Network& net, const std::vector<double>& x,
                           const std::vector<double>& target, size_t target_layer,
                           size_t row, int col, long double delta) {
  std::vector<long double> a(x.begin(), x.end());
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    std::vector<long double> next(layer.biases.size());
    for (size_t o = 0; o < next.size(); ++o) {
      const double* w = layer.weights.row(o);
      long double z = layer.biases[o];
      if (l == target_layer && o == row && col < 0) z += delta;
      for (size_t i = 0; i < a.size(); ++i) {
        long double wi = w[i];
        if (l == target_layer && o == row && col == static_cast<int>(i)) wi += delta;
        z += wi * a[i];
      }
      next[o] = 1.0L / (1.0L + std::exp(-z));
    }
    a = std::move(next);
  }
  long double acc = 0.0L;
  for (size_t j = 0; j < a.size(); ++j) {
    const long double d = a[j] - static_cast<long double>(target[j]);
    acc += d * d;
  }
  return acc;
}

}  // namespace

GradCheckReport grad_check(const Network& net, const std::vector<TrainSample>& samples,
                           double epsilon) {
  if (epsilon <= 0.0) fail(Errc::invalid_config, "grad_check: epsilon must be positive");

  const int classes = net.output_size();
  GradCheckReport report;

  for (size_t s = 0; s < samples.size(); ++s) {
    const TrainSample& sample = samples[s];
    const std::vector<double> target = one_hot(sample.label, classes);
    const Gradients g = backprop(net, sample.x, target);

    auto check = [&](double analytic, size_t layer, size_t row, int col) {
      const long double eps = epsilon;
      const long double up = perturbed_loss(net, sample.x, target, layer, row, col, eps);
      const long double down = perturbed_loss(net, sample.x, target, layer, row, col, -eps);
      const double numeric = static_cast<double>((up - down) / (2.0L * eps));
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.sample = static_cast<int>(s);
        report.layer = static_cast<int>(layer);
        report.row = static_cast<int>(row);
        report.col = col;
      }
    };

    for (size_t l = 0; l < net.layers.size(); ++l) {
      const Layer& layer = net.layers[l];
      for (size_t o = 0; o < layer.weights.rows; ++o) {
        for (size_t i = 0; i < layer.weights.cols; ++i) {
          check(g.dw[l](o, i), l, o, static_cast<int>(i));
        }
        check(g.db[l][o], l, o, -1);
      }
    }
  }
  return report;
}

}  // namespace wordrec
