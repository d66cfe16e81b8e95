#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wordrec/matrix.hpp"

namespace wordrec {

struct Architecture {
  std::vector<int> layer_sizes;  // input, hidden..., output

  bool operator==(const Architecture&) const = default;
};

struct Layer {
  Matrix weights;              // out x in
  std::vector<double> biases;  // out
};

// Fully connected sigmoid network.
struct Network {
  Architecture arch;
  std::vector<Layer> layers;

  int input_size() const { return arch.layer_sizes.front(); }
  int output_size() const { return arch.layer_sizes.back(); }
};

struct Gradients {
  std::vector<Matrix> dw;
  std::vector<std::vector<double>> db;
};

struct TrainConfig {
  double lr0 = 0.05;
  double decay = 0.95;  // learning-rate multiplier applied after each epoch
  int epochs = 1;
  uint64_t seed = 0;
  uint64_t max_updates = 0;  // optional cap on single-sample updates; 0 = none
};

struct TrainSample {
  std::vector<double> x;
  int label = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double lr = 0.0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  Network network;
  std::vector<EpochStats> history;
};

struct Prediction {
  int class_index = 0;
  std::vector<double> scores;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  // worst coordinate: layer + (row, col) into the weight matrix, col == -1
  // meaning the bias at `row`
  int sample = -1;
  int layer = -1;
  int row = -1;
  int col = -1;

  std::string coordinate() const;
};

// Labels and feature parameters carried alongside a trained network.
struct ModelMeta {
  int kmeans_k = 8;
  int coeff_count = 14;
  std::vector<std::string> labels;
};

struct Model {
  Network network;
  ModelMeta meta;
};

int64_t param_count(const Architecture& arch);

// Weights ~ N(0, 1/sqrt(fan_in)), biases ~ N(0, 0.01), from a seeded stream.
Network init_network(const Architecture& arch, uint64_t seed);

// Returns all layer activations, a_0 = x included (backprop needs them).
std::vector<std::vector<double>> forward(const Network& net, const std::vector<double>& x);

// Sum of squared differences, no 1/2 factor.
double loss(const std::vector<double>& output, const std::vector<double>& target);

Gradients backprop(const Network& net, const std::vector<double>& x,
                   const std::vector<double>& target);

using ProgressSink = std::function<void(const EpochStats&)>;

// Per-sample SGD: seeded shuffle each epoch, theta -= lr * grad per sample,
// lr *= decay after each epoch. Loss/accuracy are measured on the forward
// pass each sample gets just before its update.
TrainResult sgd_train(Network net, const std::vector<TrainSample>& data,
                      const TrainConfig& cfg, const ProgressSink& progress = {});

// argmax over output activations; ties break to the lowest index.
Prediction predict(const Network& net, const std::vector<double>& x);

// Central finite differences against backprop for every parameter; returns
// the worst relative error over all parameters and samples.
GradCheckReport grad_check(const Network& net, const std::vector<TrainSample>& samples,
                           double epsilon);

void save_model(const Network& net, const ModelMeta& meta, const std::string& path);
Model load_model(const std::string& path);

}  // namespace wordrec
