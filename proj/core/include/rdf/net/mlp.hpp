#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rdf::net {

enum class Activation { softplus, identity };

struct DenseLayer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
};

/// Fully connected network with a jump connection: the normalized input is
/// concatenated onto the output of hidden layer `jump_after` before the
/// next layer. Inputs are (q0, qd0, k, c_O); outputs one distance per link.
class MlpModel {
public:
    MlpModel() = default;

    /// Xavier-uniform weights, zero biases.
    static MlpModel create(int n_q, int n_d, int width, std::uint64_t seed, int hidden_layers = 8,
                           int jump_after = 4);

    int n_q() const { return n_q_; }
    int n_d() const { return n_d_; }
    int input_dim() const { return 3 * n_q_ + n_d_; }
    int jump_layer() const { return jump_layer_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    Activation activation() const { return activation_; }
    void set_activation(Activation a) { activation_ = a; }

    /// x_norm = (x - offset) .* scale.
    const Eigen::VectorXd& input_offset() const { return offset_; }
    const Eigen::VectorXd& input_scale() const { return scale_; }
    void set_normalization(Eigen::VectorXd offset, Eigen::VectorXd scale);

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    /// One column per sample.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;

    /// Output and full Jacobian d y / d x (n_q x input_dim).
    void jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::MatrixXd& J) const;

    /// Total scalar parameter count and flat access (weights row-major, then bias, layer by layer).
    std::size_t num_parameters() const;
    double& parameter(std::size_t index);

    /// Rounds every parameter to single precision (the storage precision).
    void round_to_float();

    void save(const std::string& path) const;
    static MlpModel load(const std::string& path);

private:
    int n_q_ = 0;
    int n_d_ = 0;
    int jump_layer_ = 0;  // index of the layer that receives the concatenated input
    Activation activation_ = Activation::softplus;
    std::vector<DenseLayer> layers_;
    Eigen::VectorXd offset_, scale_;
};

struct InputGrad {
    Eigen::VectorXd y;
    Eigen::MatrixXd J;  // n_q x n_d, d y_i / d c_O
};

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& x);
/// Forward-mode tangents along the n_d obstacle coordinates.
InputGrad mlp_input_grad(const MlpModel& model, const Eigen::VectorXd& x);

/// Elementwise activation and its first two derivatives.
void activate(Activation a, const Eigen::MatrixXd& z, Eigen::MatrixXd* s, Eigen::MatrixXd* ds, Eigen::MatrixXd* dds);

}  // namespace rdf::net
