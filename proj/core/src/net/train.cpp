#include "rdf/net/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rdf/random.hpp"
#include "tape.hpp"

namespace rdf::net {

namespace {

constexpr Eigen::Index kEvalChunk = 4096;

struct Adam {
    std::vector<DenseLayer> m, v;
    long step = 0;

    explicit Adam(const MlpModel& model) {
        for (const auto& l : model.layers()) {
            m.push_back({Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()), Eigen::VectorXd::Zero(l.b.size())});
            v.push_back(m.back());
        }
    }

    void apply(MlpModel& model, const std::vector<DenseLayer>& g, const TrainConfig& c, double lr) {
        ++step;
        const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
        constexpr double eps = 1e-8;
        auto update = [&](auto& p, const auto& grad, auto& mm, auto& vv) {
            mm = c.beta1 * mm + (1.0 - c.beta1) * grad;
            vv = c.beta2 * vv + (1.0 - c.beta2) * grad.cwiseAbs2();
            p.array() -= lr * ((mm.array() / bc1) / ((vv.array() / bc2).sqrt() + eps) + c.weight_decay * p.array());
        };
        auto& layers = model.layers();
        for (std::size_t l = 0; l < layers.size(); ++l) {
            update(layers[l].W, g[l].W, m[l].W, v[l].W);
            update(layers[l].b, g[l].b, m[l].b, v[l].b);
        }
    }
};

double learning_rate(const TrainConfig& c, int epoch) {
    if (c.epochs <= 1) return c.lr;
    const double t = static_cast<double>(epoch) / (c.epochs - 1);
    return c.lr_final + 0.5 * (c.lr - c.lr_final) * (1.0 + std::cos(std::numbers::pi * t));
}

// Loss over a dataset in chunks; no gradients.
LossValue dataset_loss(const MlpModel& model, const Dataset& data, double alpha) {
    LossValue sum;
    const Eigen::Index n = data.size();
    for (Eigen::Index s = 0; s < n; s += kEvalChunk) {
        const Eigen::Index len = std::min(kEvalChunk, n - s);
        const LossValue v = loss(model, data.X.middleCols(s, len), data.Y.middleCols(s, len), alpha);
        const double w = static_cast<double>(len) / static_cast<double>(n);
        sum.total += w * v.total;
        sum.mse += w * v.mse;
        sum.eikonal += w * v.eikonal;
    }
    return sum;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(lr >= 0) || !(lr_final >= 0)) throw std::invalid_argument("TrainConfig: learning rates must be >= 0");
    if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1))
        throw std::invalid_argument("TrainConfig: Adam betas must lie in (0, 1)");
    if (!(weight_decay >= 0)) throw std::invalid_argument("TrainConfig: weight decay must be >= 0");
    if (!(eikonal >= 0)) throw std::invalid_argument("TrainConfig: eikonal coefficient must be >= 0");
    if (epochs < 1 || batch_size < 1 || width < 1) throw std::invalid_argument("TrainConfig: counts must be positive");
}

LossValue loss(const MlpModel& model, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double alpha,
               std::vector<DenseLayer>* grads) {
    const Eigen::Index B = X.cols();
    if (B == 0) throw std::invalid_argument("loss: empty batch");
    if (Y.rows() != model.n_q() || Y.cols() != B) throw std::invalid_argument("loss: label shape mismatch");
    const int m = alpha > 0 ? model.n_d() : 0;
    const double norm = 1.0 / (static_cast<double>(B) * model.n_q());

    detail::Tape tape;
    detail::forward(model, detail::normalize(model, X), m > 0 ? detail::obstacle_seeds(model, static_cast<int>(B))
                                                              : Eigen::MatrixXd(),
                    m, tape);
    const Eigen::MatrixXd err = tape.y - Y;
    LossValue out;
    out.mse = err.squaredNorm() * norm;

    Eigen::MatrixXd gdy;
    if (m > 0) {
        // gradient norms per (link, sample)
        Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(model.n_q(), B);
        for (int e = 0; e < m; ++e) sq += tape.dy.middleCols(e * B, B).cwiseAbs2();
        const Eigen::MatrixXd gn = sq.cwiseSqrt();
        out.eikonal = (gn.array() - 1.0).square().sum() * norm;
        if (grads) {
            const Eigen::MatrixXd coef =
                (2.0 * alpha * norm * (gn.array() - 1.0) / gn.array().max(1e-300)).matrix();
            gdy.resize(tape.dy.rows(), tape.dy.cols());
            for (int e = 0; e < m; ++e) gdy.middleCols(e * B, B) = coef.cwiseProduct(tape.dy.middleCols(e * B, B));
        }
    }
    out.total = out.mse + alpha * out.eikonal;
    if (grads) detail::backward(model, tape, 2.0 * norm * err, gdy, *grads);
    return out;
}

void set_spec_normalization(MlpModel& model, const arm::RobotSpec& spec) {
    const int n_q = spec.n_q();
    if (model.n_q() != n_q || model.n_d() != spec.n_d) throw std::invalid_argument("normalization: shape mismatch");
    Eigen::VectorXd offset = Eigen::VectorXd::Zero(model.input_dim());
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(model.input_dim());
    for (int j = 0; j < n_q; ++j) {
        const arm::Joint& jt = spec.joints[static_cast<std::size_t>(j)];
        offset[j] = 0.5 * (jt.q_max + jt.q_min);
        scale[j] = 2.0 / (jt.q_max - jt.q_min);
        offset[n_q + j] = 0.5 * (jt.qd_max + jt.qd_min);
        scale[n_q + j] = 2.0 / (jt.qd_max - jt.qd_min);
    }
    model.set_normalization(offset, scale);
}

TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& validation, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
    config.validate();
    if (train_set.size() == 0 || validation.size() == 0) throw std::invalid_argument("train: empty dataset");
    Rng rng(derive_seed(config.seed, 7));
    Adam adam(model);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(train_set.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);

    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    std::vector<DenseLayer> grads;
    Eigen::MatrixXd bx(train_set.X.rows(), config.batch_size), by(train_set.Y.rows(), config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        const double lr = learning_rate(config, epoch);
        double epoch_loss = 0.0;
        for (std::size_t s = 0; s < order.size(); s += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t len = std::min(order.size() - s, static_cast<std::size_t>(config.batch_size));
            bx.resize(Eigen::NoChange, static_cast<Eigen::Index>(len));
            by.resize(Eigen::NoChange, static_cast<Eigen::Index>(len));
            for (std::size_t i = 0; i < len; ++i) {
                bx.col(static_cast<Eigen::Index>(i)) = train_set.X.col(order[s + i]);
                by.col(static_cast<Eigen::Index>(i)) = train_set.Y.col(order[s + i]);
            }
            const LossValue v = loss(model, bx, by, config.eikonal, &grads);
            if (!std::isfinite(v.total))
                throw std::runtime_error("train: loss diverged to " + std::to_string(v.total) + " in epoch " +
                                         std::to_string(epoch + 1) + "; lower the learning rate");
            epoch_loss += v.total * static_cast<double>(len);
            adam.apply(model, grads, config, lr);
        }
        EpochMetrics em;
        em.epoch = epoch + 1;
        em.train_loss = epoch_loss / static_cast<double>(order.size());
        // Score the model as it would be stored.
        MlpModel stored = model;
        stored.round_to_float();
        em.val_loss = dataset_loss(stored, validation, config.eikonal).total;
        const EvalReport rep = evaluate(stored, validation);
        em.val_mean_l1 = rep.mean_l1;
        em.val_max_l1 = rep.max_l1;
        if (!std::isfinite(em.val_loss)) throw std::runtime_error("train: validation loss is not finite");
        result.metrics.push_back(em);
        if (em.val_loss < best) {
            best = em.val_loss;
            result.model = std::move(stored);
            result.best_epoch = em.epoch;
        }
        if (on_epoch) on_epoch(em);
    }
    return result;
}

EvalReport evaluate(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& predict, const Dataset& data) {
    EvalReport rep;
    rep.per_link_mean_l1.assign(static_cast<std::size_t>(data.n_q), 0.0);
    const Eigen::Index n = data.size();
    if (n == 0) return rep;
    double total = 0.0;
    for (Eigen::Index s = 0; s < n; s += kEvalChunk) {
        const Eigen::Index len = std::min(kEvalChunk, n - s);
        const Eigen::MatrixXd err = (predict(data.X.middleCols(s, len)) - data.Y.middleCols(s, len)).cwiseAbs();
        total += err.sum();
        rep.max_l1 = std::max(rep.max_l1, err.maxCoeff());
        for (int j = 0; j < data.n_q; ++j) rep.per_link_mean_l1[static_cast<std::size_t>(j)] += err.row(j).sum();
    }
    rep.mean_l1 = total / static_cast<double>(n * data.n_q);
    for (double& v : rep.per_link_mean_l1) v /= static_cast<double>(n);
    return rep;
}

EvalReport evaluate(const MlpModel& model, const Dataset& data) {
    return evaluate([&](const Eigen::MatrixXd& X) { return model.forward_batch(X); }, data);
}

double mean_eikonal_residual(const MlpModel& model, const Dataset& data) {
    double sum = 0.0;
    const Eigen::Index n = data.size();
    for (Eigen::Index s = 0; s < n; s += kEvalChunk) {
        const Eigen::Index len = std::min(kEvalChunk, n - s);
        detail::Tape tape;
        detail::forward(model, detail::normalize(model, data.X.middleCols(s, len)),
                        detail::obstacle_seeds(model, static_cast<int>(len)), model.n_d(), tape);
        Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(model.n_q(), len);
        for (int e = 0; e < model.n_d(); ++e) sq += tape.dy.middleCols(e * len, len).cwiseAbs2();
        sum += (sq.cwiseSqrt().array() - 1.0).abs().sum();
    }
    return sum / static_cast<double>(n * model.n_q());
}

}  // namespace rdf::net
