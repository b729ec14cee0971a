#include "rdf/net/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "../binary_io.hpp"
#include "rdf/random.hpp"
#include "tape.hpp"

namespace rdf::net {

void activate(Activation a, const Eigen::MatrixXd& z, Eigen::MatrixXd* s, Eigen::MatrixXd* ds, Eigen::MatrixXd* dds) {
    if (a == Activation::identity) {
        if (s) *s = z;
        if (ds) ds->setOnes(z.rows(), z.cols());
        if (dds) dds->setZero(z.rows(), z.cols());
        return;
    }
    // softplus(z) = log(1 + e^z), slope = sigmoid(z), curvature = sigmoid (1 - sigmoid)
    if (s) *s = z.unaryExpr([](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); });
    if (ds || dds) {
        const Eigen::MatrixXd sig = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        if (dds) *dds = sig.array() * (1.0 - sig.array());
        if (ds) *ds = sig;
    }
}

namespace detail {

Eigen::MatrixXd normalize(const MlpModel& model, const Eigen::MatrixXd& X) {
    if (X.rows() != model.input_dim())
        throw std::invalid_argument("MLP: input has " + std::to_string(X.rows()) + " rows, expected " +
                                    std::to_string(model.input_dim()));
    return ((X.colwise() - model.input_offset()).array().colwise() * model.input_scale().array()).matrix();
}

Eigen::MatrixXd obstacle_seeds(const MlpModel& model, int batch) {
    const int n_d = model.n_d();
    const int base = 3 * model.n_q();
    Eigen::MatrixXd seeds = Eigen::MatrixXd::Zero(model.input_dim(), static_cast<Eigen::Index>(batch) * n_d);
    for (int e = 0; e < n_d; ++e)
        seeds.block(base + e, static_cast<Eigen::Index>(e) * batch, 1, batch).setConstant(model.input_scale()[base + e]);
    return seeds;
}

void forward(const MlpModel& model, const Eigen::MatrixXd& xn, const Eigen::MatrixXd& dxn, int m, Tape& tape) {
    const auto& layers = model.layers();
    const std::size_t L = layers.size();
    const auto B = xn.cols();
    tape.batch = static_cast<int>(B);
    tape.tangents = m;
    tape.in.resize(L);
    tape.din.resize(L);
    tape.s1.resize(L);
    tape.s2.resize(L);
    tape.dz.resize(L);
    Eigen::MatrixXd a = xn;
    Eigen::MatrixXd da = dxn;
    for (std::size_t l = 0; l < L; ++l) {
        const DenseLayer& layer = layers[l];
        if (static_cast<int>(l) == model.jump_layer()) {
            Eigen::MatrixXd cat(a.rows() + xn.rows(), B);
            cat << a, xn;
            a = std::move(cat);
            if (m > 0) {
                Eigen::MatrixXd dcat(da.rows() + dxn.rows(), da.cols());
                dcat << da, dxn;
                da = std::move(dcat);
            }
        }
        tape.in[l] = a;
        Eigen::MatrixXd z = layer.W * a;
        z.colwise() += layer.b;
        Eigen::MatrixXd dz;
        if (m > 0) {
            dz.noalias() = layer.W * da;
            tape.din[l] = da;
        }
        if (l + 1 == L) {
            tape.y = std::move(z);
            tape.dy = std::move(dz);
            break;
        }
        Eigen::MatrixXd s, s1, s2;
        activate(model.activation(), z, &s, &s1, m > 0 ? &s2 : nullptr);
        if (m > 0) {
            da.resize(dz.rows(), dz.cols());
            for (int e = 0; e < m; ++e) da.middleCols(e * B, B) = s1.cwiseProduct(dz.middleCols(e * B, B));
            tape.s2[l] = std::move(s2);
            tape.dz[l] = std::move(dz);
        }
        tape.s1[l] = std::move(s1);
        a = std::move(s);
    }
}

void backward(const MlpModel& model, const Tape& tape, const Eigen::MatrixXd& gy, const Eigen::MatrixXd& gdy,
              std::vector<DenseLayer>& grads) {
    const auto& layers = model.layers();
    const std::size_t L = layers.size();
    const int m = tape.tangents;
    const Eigen::Index B = tape.batch;
    grads.resize(L);
    Eigen::MatrixXd gz = gy;    // adjoint of pre-activation z_l
    Eigen::MatrixXd gdz = gdy;  // adjoint of tangent pre-activation
    for (std::size_t l = L; l-- > 0;) {
        const DenseLayer& layer = layers[l];
        DenseLayer& g = grads[l];
        g.W.noalias() = gz * tape.in[l].transpose();
        if (m > 0) g.W.noalias() += gdz * tape.din[l].transpose();
        g.b = gz.rowwise().sum();
        if (l == 0) break;

        Eigen::MatrixXd ga = layer.W.transpose() * gz;
        Eigen::MatrixXd gda;
        if (m > 0) gda.noalias() = layer.W.transpose() * gdz;
        if (static_cast<int>(l) == model.jump_layer()) {
            const auto w = layers[l - 1].W.rows();
            ga.conservativeResize(w, Eigen::NoChange);
            if (m > 0) gda.conservativeResize(w, Eigen::NoChange);
        }
        // Through a = s(z) and da = s'(z) dz of layer l-1.
        const std::size_t h = l - 1;
        gz = tape.s1[h].cwiseProduct(ga);
        if (m > 0) {
            gdz.resize(gda.rows(), gda.cols());
            for (int e = 0; e < m; ++e) {
                const auto blk = gda.middleCols(e * B, B);
                gdz.middleCols(e * B, B) = tape.s1[h].cwiseProduct(blk);
                gz += tape.s2[h].cwiseProduct(tape.dz[h].middleCols(e * B, B)).cwiseProduct(blk);
            }
        }
    }
}

}  // namespace detail

MlpModel MlpModel::create(int n_q, int n_d, int width, std::uint64_t seed, int hidden_layers, int jump_after) {
    if (n_q < 1 || n_d < 1 || width < 1 || hidden_layers < 1) throw std::invalid_argument("MlpModel: bad shape");
    if (jump_after < 1 || jump_after >= hidden_layers)
        throw std::invalid_argument("MlpModel: jump must sit between two hidden layers");
    MlpModel m;
    m.n_q_ = n_q;
    m.n_d_ = n_d;
    m.jump_layer_ = jump_after;
    const int n_in = 3 * n_q + n_d;
    Rng rng(seed);
    auto dense = [&](int out, int in) {
        DenseLayer l;
        const double limit = std::sqrt(6.0 / (in + out));
        l.W.resize(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) l.W(r, c) = rng.uniform(-limit, limit);
        l.b = Eigen::VectorXd::Zero(out);
        return l;
    };
    m.layers_.push_back(dense(width, n_in));
    for (int h = 1; h < hidden_layers; ++h) m.layers_.push_back(dense(width, h == jump_after ? width + n_in : width));
    m.layers_.push_back(dense(n_q, width));
    m.offset_ = Eigen::VectorXd::Zero(n_in);
    m.scale_ = Eigen::VectorXd::Ones(n_in);
    m.round_to_float();
    return m;
}

void MlpModel::set_normalization(Eigen::VectorXd offset, Eigen::VectorXd scale) {
    if (offset.size() != input_dim() || scale.size() != input_dim())
        throw std::invalid_argument("MlpModel: normalization has the wrong size");
    offset_ = offset.cast<float>().cast<double>();
    scale_ = scale.cast<float>().cast<double>();
}

Eigen::MatrixXd MlpModel::forward_batch(const Eigen::MatrixXd& X) const {
    detail::Tape tape;
    detail::forward(*this, detail::normalize(*this, X), Eigen::MatrixXd(), 0, tape);
    return tape.y;
}

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const { return forward_batch(x); }

void MlpModel::jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::MatrixXd& J) const {
    detail::Tape tape;
    const int n = input_dim();
    const Eigen::MatrixXd seeds = scale_.asDiagonal();
    detail::forward(*this, detail::normalize(*this, x), seeds, n, tape);
    y = tape.y.col(0);
    J = tape.dy;
}

std::size_t MlpModel::num_parameters() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.W.size() + l.b.size());
    return n;
}

double& MlpModel::parameter(std::size_t index) {
    for (auto& l : layers_) {
        const auto nw = static_cast<std::size_t>(l.W.size());
        if (index < nw) {
            const auto cols = static_cast<std::size_t>(l.W.cols());
            return l.W(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
        }
        index -= nw;
        if (index < static_cast<std::size_t>(l.b.size())) return l.b[static_cast<Eigen::Index>(index)];
        index -= static_cast<std::size_t>(l.b.size());
    }
    throw std::out_of_range("MlpModel::parameter: index out of range");
}

void MlpModel::round_to_float() {
    for (auto& l : layers_) {
        l.W = l.W.cast<float>().cast<double>();
        l.b = l.b.cast<float>().cast<double>();
    }
}

void MlpModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model " + path);
    io::put_magic(out, "MLP1");
    io::put_u32(out, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        io::put_u32(out, static_cast<std::uint32_t>(l.W.rows()));
        io::put_u32(out, static_cast<std::uint32_t>(l.W.cols()));
    }
    for (const auto& l : layers_) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) io::put_f32(out, l.W(r, c));
        for (Eigen::Index r = 0; r < l.b.size(); ++r) io::put_f32(out, l.b[r]);
    }
    io::put_u32(out, static_cast<std::uint32_t>(offset_.size()));
    for (Eigen::Index i = 0; i < offset_.size(); ++i) io::put_f32(out, offset_[i]);
    for (Eigen::Index i = 0; i < scale_.size(); ++i) io::put_f32(out, scale_[i]);
    if (!out) throw std::runtime_error("failed writing model " + path);
}

MlpModel MlpModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model " + path);
    io::expect_magic(in, "MLP1", path);
    const std::uint32_t count = io::get_u32(in);
    if (count < 2 || count > 1024) throw std::runtime_error(path + ": implausible layer count");
    MlpModel m;
    m.layers_.resize(count);
    for (auto& l : m.layers_) {
        const auto rows = io::get_u32(in);
        const auto cols = io::get_u32(in);
        l.W.resize(rows, cols);
        l.b.resize(rows);
    }
    for (auto& l : m.layers_) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = io::get_f32(in);
        for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b[r] = io::get_f32(in);
    }
    const auto n_in = static_cast<Eigen::Index>(io::get_u32(in));
    m.offset_.resize(n_in);
    m.scale_.resize(n_in);
    for (Eigen::Index i = 0; i < n_in; ++i) m.offset_[i] = io::get_f32(in);
    for (Eigen::Index i = 0; i < n_in; ++i) m.scale_[i] = io::get_f32(in);

    // Recover the shape: outputs give n_q, the input width gives n_d, and the
    // jump layer is the one whose fan-in exceeds the previous width by n_in.
    m.n_q_ = static_cast<int>(m.layers_.back().W.rows());
    m.n_d_ = static_cast<int>(n_in) - 3 * m.n_q_;
    if (m.n_d_ < 1 || m.layers_.front().W.cols() != n_in) throw std::runtime_error(path + ": inconsistent shapes");
    m.jump_layer_ = -1;
    for (std::size_t l = 1; l < m.layers_.size(); ++l) {
        const auto expected = m.layers_[l - 1].W.rows();
        if (m.layers_[l].W.cols() == expected + n_in && m.jump_layer_ < 0) m.jump_layer_ = static_cast<int>(l);
        else if (m.layers_[l].W.cols() != expected) throw std::runtime_error(path + ": inconsistent shapes");
    }
    return m;
}

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& x) { return model.forward(x); }

InputGrad mlp_input_grad(const MlpModel& model, const Eigen::VectorXd& x) {
    detail::Tape tape;
    detail::forward(model, detail::normalize(model, x), detail::obstacle_seeds(model, 1), model.n_d(), tape);
    return {tape.y.col(0), tape.dy};
}

}  // namespace rdf::net
