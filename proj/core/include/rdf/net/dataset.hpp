#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"

namespace rdf::net {

/// Inputs x = (q0, qd0, k, c_O) and labels y = per-link reachability distance.
struct DatasetRecord {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

/// Records stored column-wise: X is (3 n_q + n_d) x N, Y is n_q x N.
struct Dataset {
    int n_q = 0;
    int n_d = 0;
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;

    Dataset() = default;
    Dataset(int n_q, int n_d, Eigen::Index count);

    int input_dim() const { return 3 * n_q + n_d; }
    Eigen::Index size() const { return X.cols(); }
    DatasetRecord record(Eigen::Index i) const { return {X.col(i), Y.col(i)}; }
    Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// n_init initial conditions (q0, qd0, k) each paired with n_o obstacle
/// centers uniform in [-1, 1]^n_d, labeled by the exact reachability distance.
/// `threads` = 0 uses the hardware concurrency; output order never depends on it.
Dataset sample_dataset(const arm::RobotSpec& spec, int n_init, int n_o, std::uint64_t seed, unsigned threads = 0);

/// Shuffled 80/20 train/validation split of `all`; the test member stays empty.
DatasetSplit split_train_validation(const Dataset& all, std::uint64_t seed);

/// split_train_validation plus a test set of the
/// validation size sampled independently (initial conditions from a derived seed).
DatasetSplit split_dataset(const arm::RobotSpec& spec, const Dataset& all, int n_o, std::uint64_t seed,
                           unsigned threads = 0);

/// Binary format: "RDF1", u32 version, u32 n_q, u32 n_d, u64 count, then per
/// record f32 x followed by f32 y, all little-endian.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);
void write_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace rdf::net
