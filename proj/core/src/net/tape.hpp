#pragma once

// Batched forward pass with optional forward-mode tangents, and the matching
// reverse pass for parameter gradients. Tangent matrices hold m blocks of B
// columns, block e being d/d(input direction e) for every sample.

#include <vector>

#include <Eigen/Dense>

#include "rdf/net/mlp.hpp"

namespace rdf::net::detail {

struct Tape {
    int batch = 0;
    int tangents = 0;
    std::vector<Eigen::MatrixXd> in;    // layer inputs
    std::vector<Eigen::MatrixXd> din;   // layer input tangents
    std::vector<Eigen::MatrixXd> s1;    // activation slope at z, hidden layers
    std::vector<Eigen::MatrixXd> s2;    // activation curvature at z
    std::vector<Eigen::MatrixXd> dz;    // pre-activation tangents
    Eigen::MatrixXd y;                  // n_q x B
    Eigen::MatrixXd dy;                 // n_q x (B m)
};

/// xn: normalized inputs; dxn: normalized input tangents (empty when m = 0).
void forward(const MlpModel& model, const Eigen::MatrixXd& xn, const Eigen::MatrixXd& dxn, int m, Tape& tape);

/// Parameter gradients for adjoints gy (of y) and gdy (of dy), in the layout of
/// MlpModel::layers().
void backward(const MlpModel& model, const Tape& tape, const Eigen::MatrixXd& gy, const Eigen::MatrixXd& gdy,
              std::vector<DenseLayer>& grads);

/// (x - offset) .* scale, column-wise.
Eigen::MatrixXd normalize(const MlpModel& model, const Eigen::MatrixXd& X);

/// Tangent seeds along the obstacle coordinates for B samples.
Eigen::MatrixXd obstacle_seeds(const MlpModel& model, int batch);

}  // namespace rdf::net::detail
