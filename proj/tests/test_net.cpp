#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/dataset.hpp"
#include "rdf/net/mlp.hpp"
#include "rdf/net/train.hpp"
#include "support/oracles.hpp"

using namespace rdf;
using namespace rdf::net;

namespace {

// Plain loop-based forward pass with the same layout, for cross-checking.
Eigen::VectorXd reference_forward(const MlpModel& m, const Eigen::VectorXd& x) {
    std::vector<double> xn(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) xn[static_cast<std::size_t>(i)] = (x[i] - m.input_offset()[i]) * m.input_scale()[i];
    std::vector<double> a = xn;
    const auto& layers = m.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (static_cast<int>(l) == m.jump_layer()) a.insert(a.end(), xn.begin(), xn.end());
        std::vector<double> z(static_cast<std::size_t>(layers[l].W.rows()));
        for (Eigen::Index r = 0; r < layers[l].W.rows(); ++r) {
            double s = layers[l].b[r];
            for (Eigen::Index c = 0; c < layers[l].W.cols(); ++c) s += layers[l].W(r, c) * a[static_cast<std::size_t>(c)];
            z[static_cast<std::size_t>(r)] = s;
        }
        if (l + 1 < layers.size() && m.activation() == Activation::softplus)
            for (double& v : z) v = v > 30 ? v : std::log1p(std::exp(v));
        a = z;
    }
    return Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

Eigen::VectorXd random_input(Rng& rng, int n_q, int n_d) {
    return oracle::uniform_vec(rng, 3 * n_q + n_d, -1, 1);
}

Dataset random_dataset(Rng& rng, int n_q, int n_d, int count) {
    Dataset d(n_q, n_d, count);
    for (int i = 0; i < count; ++i) {
        d.X.col(i) = random_input(rng, n_q, n_d);
        d.Y.col(i) = oracle::uniform_vec(rng, n_q, -0.5, 1.0);
    }
    return d;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("rdf_test_net_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("zero weights give the output bias") {
    MlpModel m = MlpModel::create(2, 2, 16, 1);
    for (auto& l : m.layers()) l.W.setZero();
    m.layers().back().b = Eigen::Vector2d(0.25, -1.5);
    Rng rng(1);
    CHECK((m.forward(random_input(rng, 2, 2)) - Eigen::Vector2d(0.25, -1.5)).norm() == 0.0);
}

TEST_CASE("last layer is linear") {
    MlpModel m = MlpModel::create(2, 2, 16, 2);
    Rng rng(2);
    m.layers().back().b = Eigen::Vector2d(0.3, -0.2);
    const auto x = random_input(rng, 2, 2);
    const Eigen::VectorXd y = m.forward(x) - m.layers().back().b;
    m.layers().back().W *= 2;
    CHECK((m.forward(x) - m.layers().back().b - 2 * y).norm() < 1e-14);
}

TEST_CASE("forward matches the loop reference") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n_q = 1 + static_cast<int>(rng.below(3)), n_d = 2 + static_cast<int>(rng.below(2));
        MlpModel m = MlpModel::create(n_q, n_d, 24, trial, 6, 3);
        m.set_normalization(oracle::uniform_vec(rng, m.input_dim(), -0.2, 0.2), oracle::uniform_vec(rng, m.input_dim(), 0.5, 2));
        for (auto& l : m.layers()) l.b = oracle::uniform_vec(rng, static_cast<int>(l.b.size()), -0.3, 0.3);
        const auto x = random_input(rng, n_q, n_d);
        CHECK((m.forward(x) - reference_forward(m, x)).norm() < 1e-12);
        // Batched and single evaluation agree.
        Eigen::MatrixXd X(m.input_dim(), 3);
        X << x, random_input(rng, n_q, n_d), x;
        const Eigen::MatrixXd Y = m.forward_batch(X);
        CHECK((Y.col(0) - m.forward(x)).norm() < 1e-12);
        CHECK((Y.col(2) - Y.col(0)).norm() == 0.0);
    }
}

TEST_CASE("linear network input gradient is the weight product") {
    MlpModel m = MlpModel::create(2, 2, 8, 4, 3, 1);
    m.set_activation(Activation::identity);
    Rng rng(4);
    m.set_normalization(oracle::uniform_vec(rng, 8, -0.2, 0.2), oracle::uniform_vec(rng, 8, 0.5, 2));
    // y = A x + c exactly; probe A column by column.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
    const Eigen::VectorXd y0 = m.forward(zero);
    Eigen::MatrixXd A(2, 8);
    for (int i = 0; i < 8; ++i) A.col(i) = m.forward(Eigen::VectorXd::Unit(8, i)) - y0;
    const auto g = mlp_input_grad(m, random_input(rng, 2, 2));
    CHECK((g.J - A.rightCols(2)).norm() < 1e-12);
    Eigen::VectorXd y;
    Eigen::MatrixXd J;
    m.jacobian(random_input(rng, 2, 2), y, J);
    CHECK((J - A).norm() < 1e-12);
}

TEST_CASE("input gradient matches finite differences") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        MlpModel m = MlpModel::create(2, 2, 32, 10 + trial);
        set_spec_normalization(m, arm::RobotSpec::planar(2));
        const auto x = random_input(rng, 2, 2);
        const auto g = mlp_input_grad(m, x);
        CHECK((g.y - m.forward(x)).norm() < 1e-14);
        for (int e = 0; e < 2; ++e) {
            const double h = 1e-5;
            Eigen::VectorXd xp = x, xm = x;
            xp[6 + e] += h;
            xm[6 + e] -= h;
            const Eigen::VectorXd fd = (m.forward(xp) - m.forward(xm)) / (2 * h);
            for (int i = 0; i < 2; ++i) CHECK(oracle::rel_error(g.J(i, e), fd[i], 1e-3) <= 1e-6);
        }
    }
}

TEST_CASE("loss values") {
    Rng rng(6);
    MlpModel m = MlpModel::create(2, 2, 16, 6);
    Eigen::MatrixXd X(8, 5);
    for (int i = 0; i < 5; ++i) X.col(i) = random_input(rng, 2, 2);
    const Eigen::MatrixXd Y = m.forward_batch(X);
    CHECK(loss(m, X, Y, 0.0).total < 1e-24);

    // A linear model rescaled so each output's obstacle gradient has unit norm.
    MlpModel lin = MlpModel::create(2, 2, 8, 7, 3, 1);
    lin.set_activation(Activation::identity);
    const auto g = mlp_input_grad(lin, X.col(0));
    for (int i = 0; i < 2; ++i) {
        const double n = g.J.row(i).norm();
        lin.layers().back().W.row(i) /= n;
        lin.layers().back().b[i] /= n;
    }
    const LossValue v = loss(lin, X, oracle::uniform_vec(rng, 10, -1, 1).reshaped(2, 5), 1.0);
    CHECK(v.eikonal < 1e-24);
    CHECK(v.total == doctest::Approx(v.mse));
}

TEST_CASE("weight gradients match finite differences") {
    Rng rng(7);
    const Dataset d = random_dataset(rng, 2, 2, 12);
    for (double alpha : {0.0, 0.1}) {
        MlpModel m = MlpModel::create(2, 2, 16, 8, 6, 3);
        set_spec_normalization(m, arm::RobotSpec::planar(2));
        std::vector<DenseLayer> grads;
        loss(m, d.X, d.Y, alpha, &grads);
        std::vector<double> flat;
        for (const auto& l : grads) {
            for (Eigen::Index r = 0; r < l.W.rows(); ++r)
                for (Eigen::Index c = 0; c < l.W.cols(); ++c) flat.push_back(l.W(r, c));
            for (Eigen::Index r = 0; r < l.b.size(); ++r) flat.push_back(l.b[r]);
        }
        REQUIRE(flat.size() == m.num_parameters());
        for (int probe = 0; probe < 50; ++probe) {
            const std::size_t i = rng.below(m.num_parameters());
            const double saved = m.parameter(i), h = 1e-6;
            m.parameter(i) = saved + h;
            const double up = loss(m, d.X, d.Y, alpha).total;
            m.parameter(i) = saved - h;
            const double down = loss(m, d.X, d.Y, alpha).total;
            m.parameter(i) = saved;
            CHECK(oracle::rel_error(flat[i], (up - down) / (2 * h), 1e-4) <= 1e-4);
        }
    }
}

TEST_CASE("training memorizes one record") {
    Rng rng(8);
    const Dataset one = random_dataset(rng, 2, 2, 1);
    TrainConfig c;
    c.epochs = 500;
    c.batch_size = 1;
    c.weight_decay = 0;
    c.lr = c.lr_final = 1e-3;
    MlpModel m = MlpModel::create(2, 2, 32, 9);
    const TrainResult r = train(m, one, one, c);
    CHECK(r.metrics.back().train_loss <= 1e-6);
}

TEST_CASE("zero learning rate leaves weights alone") {
    Rng rng(9);
    const Dataset d = random_dataset(rng, 2, 2, 20);
    TrainConfig c;
    c.epochs = 3;
    c.batch_size = 4;
    c.lr = c.lr_final = 0.0;
    c.weight_decay = 0.5;
    MlpModel m = MlpModel::create(2, 2, 16, 10);
    TrainResult r = train(m, d, d, c);
    m.round_to_float();
    for (std::size_t i = 0; i < m.num_parameters(); ++i) CHECK(r.model.parameter(i) == m.parameter(i));
}

TEST_CASE("training is deterministic and keeps the best epoch") {
    Rng rng(10);
    const Dataset tr = random_dataset(rng, 2, 2, 200), va = random_dataset(rng, 2, 2, 50);
    TrainConfig c;
    c.epochs = 8;
    c.batch_size = 32;
    c.seed = 3;
    c.eikonal = 1e-3;
    const MlpModel m = MlpModel::create(2, 2, 16, 11);
    std::vector<EpochMetrics> seen;
    const TrainResult a = train(m, tr, va, c, [&](const EpochMetrics& e) { seen.push_back(e); });
    const TrainResult b = train(m, tr, va, c);
    REQUIRE(a.metrics.size() == 8);
    CHECK(seen.size() == 8);
    int best = 0;
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].train_loss == b.metrics[i].train_loss);
        CHECK(a.metrics[i].val_loss == b.metrics[i].val_loss);
        if (a.metrics[i].val_loss < a.metrics[static_cast<std::size_t>(best)].val_loss) best = static_cast<int>(i);
    }
    CHECK(a.metrics[static_cast<std::size_t>(best)].epoch == a.best_epoch);
    CHECK(evaluate(a.model, va).mean_l1 == doctest::Approx(a.metrics[static_cast<std::size_t>(best)].val_mean_l1).epsilon(1e-12));
}

TEST_CASE("non-finite loss aborts training") {
    Rng rng(11);
    Dataset d = random_dataset(rng, 2, 2, 10);
    d.Y(0, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainConfig c;
    c.epochs = 1;
    CHECK_THROWS_AS(train(MlpModel::create(2, 2, 8, 1), d, d, c), std::runtime_error);
    c.epochs = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("evaluation") {
    Rng rng(12);
    const Dataset d = random_dataset(rng, 2, 2, 100);
    const auto lookup = [&](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd out(2, X.cols());
        for (Eigen::Index i = 0; i < X.cols(); ++i)
            for (Eigen::Index r = 0; r < d.size(); ++r)
                if (d.X.col(r) == X.col(i)) out.col(i) = d.Y.col(r);
        return out;
    };
    CHECK(evaluate(lookup, d).mean_l1 == 0.0);
    const auto zero = evaluate([](const Eigen::MatrixXd& X) { return Eigen::MatrixXd::Zero(2, X.cols()); }, d);
    CHECK(zero.mean_l1 == doctest::Approx(d.Y.cwiseAbs().mean()).epsilon(1e-14));
    CHECK(zero.max_l1 == doctest::Approx(d.Y.cwiseAbs().maxCoeff()).epsilon(1e-14));
    REQUIRE(zero.per_link_mean_l1.size() == 2);
    CHECK(zero.per_link_mean_l1[1] == doctest::Approx(d.Y.row(1).cwiseAbs().mean()).epsilon(1e-14));
}

TEST_CASE("model files round-trip") {
    MlpModel m = MlpModel::create(2, 2, 16, 12);
    set_spec_normalization(m, arm::RobotSpec::planar(2));
    m.round_to_float();
    const auto dir = temp_dir("model");
    m.save((dir / "m.mlp1").string());
    const MlpModel back = MlpModel::load((dir / "m.mlp1").string());
    Rng rng(13);
    const Dataset d = random_dataset(rng, 2, 2, 30);
    CHECK((back.forward_batch(d.X) - m.forward_batch(d.X)).norm() == 0.0);
    CHECK(evaluate(back, d).mean_l1 == doctest::Approx(evaluate(m, d).mean_l1).epsilon(1e-12));
    CHECK(read_bytes(dir / "m.mlp1").substr(0, 4) == "MLP1");
    std::ofstream(dir / "bad.mlp1") << "XXXX";
    CHECK_THROWS(MlpModel::load((dir / "bad.mlp1").string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("dataset sampling") {
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    const Dataset d = sample_dataset(spec, 2, 16, 5, 1);
    CHECK(d.size() == 32);
    CHECK(d.input_dim() == 8);
    const Dataset again = sample_dataset(spec, 2, 16, 5, 2);
    CHECK(d.X == again.X);
    CHECK(d.Y == again.Y);
    const auto dir = temp_dir("dataset");
    write_dataset(d, (dir / "a.rdf1").string());
    write_dataset(again, (dir / "b.rdf1").string());
    CHECK(read_bytes(dir / "a.rdf1") == read_bytes(dir / "b.rdf1"));
    CHECK(read_bytes(dir / "a.rdf1").substr(0, 4) == "RDF1");
    const Dataset back = read_dataset((dir / "a.rdf1").string());
    CHECK(back.size() == 32);
    CHECK((back.X - d.X).cwiseAbs().maxCoeff() < 1e-6);

    // Labels re-derived from scratch.
    for (Eigen::Index i = 0; i < d.size(); i += 3) {
        const Eigen::VectorXd x = d.X.col(i);
        const auto r = exact::rdf_ground_truth(spec, x.segment(0, 2), x.segment(2, 2), x.segment(4, 2),
                                               {x.segment(6, 2), spec.obstacle_side});
        for (int j = 0; j < 2; ++j) CHECK(std::abs(r.link_distances[static_cast<std::size_t>(j)] - d.Y(j, i)) <= 1e-12);
    }
    // Obstacle centers stay in the unit box.
    CHECK(d.X.bottomRows(2).cwiseAbs().maxCoeff() <= 1.0);

    const DatasetSplit s = split_train_validation(d, 3);
    CHECK(s.train.size() + s.validation.size() == 32);
    CHECK(s.validation.size() == 6);
    CHECK(s.test.size() == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("training loss falls over the first epochs") {
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    const Dataset all = sample_dataset(spec, 40, 16, 21, 1);
    const DatasetSplit s = split_train_validation(all, 21);
    TrainConfig c;
    c.epochs = 5;
    c.batch_size = 64;
    c.lr = c.lr_final = 3e-4;
    c.seed = 21;
    MlpModel m = MlpModel::create(2, 2, 64, 21);
    set_spec_normalization(m, spec);
    const TrainResult r = train(m, s.train, s.validation, c);
    for (std::size_t i = 1; i < r.metrics.size(); ++i) CHECK(r.metrics[i].train_loss < r.metrics[i - 1].train_loss);
}

TEST_CASE("eikonal term pulls gradient norms toward one") {
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    const Dataset all = sample_dataset(spec, 60, 16, 31, 1);
    const DatasetSplit s = split_train_validation(all, 31);
    std::vector<double> with, without;
    for (std::uint64_t seed : {1, 2, 3}) {
        for (double alpha : {0.0, 1e-3}) {
            TrainConfig c;
            c.epochs = 30;
            c.batch_size = 64;
            c.seed = seed;
            c.eikonal = alpha;
            MlpModel m = MlpModel::create(2, 2, 32, seed, 6, 3);
            set_spec_normalization(m, spec);
            const TrainResult r = train(m, s.train, s.validation, c);
            (alpha > 0 ? with : without).push_back(mean_eikonal_residual(r.model, s.validation));
        }
    }
    std::sort(with.begin(), with.end());
    std::sort(without.begin(), without.end());
    MESSAGE("eikonal residual median: alpha=1e-3 " << with[1] << ", alpha=0 " << without[1]);
    CHECK(with[1] < without[1]);
}
