#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/net/dataset.hpp"
#include "rdf/net/mlp.hpp"

namespace rdf::net {

struct TrainConfig {
    double lr = 1e-3;
    /// Learning rate reached at the last epoch by cosine decay; lr_final = lr keeps it constant.
    double lr_final = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double weight_decay = 0.01;
    double eikonal = 0.0;  // alpha
    int epochs = 50;
    int batch_size = 256;
    std::uint64_t seed = 0;
    int width = 128;

    void validate() const;
};

struct LossValue {
    double total = 0.0;
    double mse = 0.0;
    double eikonal = 0.0;
};

/// L = mean_b mean_i (y_hat - y)^2 + alpha mean_b mean_i (|grad_c y_hat_i| - 1)^2.
/// Fills `grads` (layer layout) when non-null.
LossValue loss(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double alpha,
               std::vector<DenseLayer>* grads = nullptr);

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_mean_l1 = 0.0;
    double val_max_l1 = 0.0;
};

struct TrainResult {
    MlpModel model;  // best validation snapshot, rounded to storage precision
    std::vector<EpochMetrics> metrics;
    int best_epoch = 0;
};

/// Scales q0 and qd0 by the joint limits to [-1, 1]; k and c_O pass through.
void set_spec_normalization(MlpModel& model, const arm::RobotSpec& spec);

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Adam with decoupled weight decay, fixed shuffling under config.seed, and
/// best-validation selection. Throws std::runtime_error on a non-finite loss.
TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& validation, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct EvalReport {
    double mean_l1 = 0.0;
    double max_l1 = 0.0;
    std::vector<double> per_link_mean_l1;
};

EvalReport evaluate(const MlpModel& model, const Dataset& data);
/// Same report for any predictor returning n_q x N outputs for n_in x N inputs.
EvalReport evaluate(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& predict, const Dataset& data);

/// Mean | |grad_c y_hat_i| - 1 | over records and links.
double mean_eikonal_residual(const MlpModel& model, const Dataset& data);

}  // namespace rdf::net
