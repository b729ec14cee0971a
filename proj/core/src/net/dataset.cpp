#include "rdf/net/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <exception>
#include <iomanip>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "../binary_io.hpp"
#include "rdf/arm/reach_set.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/random.hpp"

namespace rdf::net {

namespace {

constexpr std::uint32_t kDatasetVersion = 1;

struct InitialCondition {
    Eigen::VectorXd q0, qd0, k;
    std::vector<Eigen::VectorXd> obstacles;
};

// Runs body(i) for i in [0, n) on a few workers; results go to slot i.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

Dataset::Dataset(int n_q_, int n_d_, Eigen::Index count)
    : n_q(n_q_), n_d(n_d_), X(3 * n_q_ + n_d_, count), Y(n_q_, count) {}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
    Dataset out(n_q, n_d, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.col(static_cast<Eigen::Index>(i)) = X.col(rows[i]);
        out.Y.col(static_cast<Eigen::Index>(i)) = Y.col(rows[i]);
    }
    return out;
}

Dataset sample_dataset(const arm::RobotSpec& spec, int n_init, int n_o, std::uint64_t seed, unsigned threads) {
    spec.validate();
    if (n_init < 0 || n_o < 1) throw std::invalid_argument("sample_dataset: need n_init >= 0 and n_o >= 1");
    const int n_q = spec.n_q();
    const int n_d = spec.n_d;

    // Draw every input serially so the dataset does not depend on scheduling.
    Rng rng(seed);
    std::vector<InitialCondition> inits(static_cast<std::size_t>(n_init));
    for (auto& ic : inits) {
        ic.q0.resize(n_q);
        ic.qd0.resize(n_q);
        ic.k.resize(n_q);
        for (int j = 0; j < n_q; ++j) {
            const arm::Joint& jt = spec.joints[static_cast<std::size_t>(j)];
            ic.q0[j] = rng.uniform(jt.q_min, jt.q_max);
            ic.qd0[j] = rng.uniform(jt.qd_min, jt.qd_max);
            ic.k[j] = rng.uniform(-1.0, 1.0);
        }
        ic.obstacles.resize(static_cast<std::size_t>(n_o));
        for (auto& c : ic.obstacles) {
            c.resize(n_d);
            for (int d = 0; d < n_d; ++d) c[d] = rng.uniform(-1.0, 1.0);
        }
    }

    Dataset ds(n_q, n_d, static_cast<Eigen::Index>(n_init) * n_o);
    parallel_for(inits.size(), threads, [&](std::size_t i) {
        const InitialCondition& ic = inits[i];
        const arm::ReachSet reach(spec, ic.q0, ic.qd0);
        const auto hulls = exact::buffered_hulls(reach, ic.k, spec.obstacle_side);
        for (int o = 0; o < n_o; ++o) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * n_o + o;
            const Eigen::VectorXd& c = ic.obstacles[static_cast<std::size_t>(o)];
            ds.X.col(col) << ic.q0, ic.qd0, ic.k, c;
            const exact::RdfResult r = exact::rdf_from_hulls(hulls, c);
            for (int j = 0; j < n_q; ++j) ds.Y(j, col) = r.link_distances[static_cast<std::size_t>(j)];
        }
    });
    if (!ds.Y.allFinite()) throw std::runtime_error("sample_dataset: non-finite label");
    return ds;
}

DatasetSplit split_train_validation(const Dataset& all, std::uint64_t seed) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(all.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
    Rng rng(derive_seed(seed, 1));
    rng.shuffle(rows);
    const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(rows.size())));
    DatasetSplit out;
    out.train = all.subset({rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train)});
    out.validation = all.subset({rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end()});
    return out;
}

DatasetSplit split_dataset(const arm::RobotSpec& spec, const Dataset& all, int n_o, std::uint64_t seed,
                           unsigned threads) {
    DatasetSplit out = split_train_validation(all, seed);
    const Eigen::Index n_test = out.validation.size();
    const int test_inits = static_cast<int>((n_test + n_o - 1) / n_o);
    Dataset test = sample_dataset(spec, test_inits, n_o, derive_seed(seed, 2), threads);
    std::vector<Eigen::Index> keep(static_cast<std::size_t>(n_test));
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<Eigen::Index>(i);
    out.test = test.subset(keep);
    return out;
}

void write_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset " + path);
    io::put_magic(out, "RDF1");
    io::put_u32(out, kDatasetVersion);
    io::put_u32(out, static_cast<std::uint32_t>(ds.n_q));
    io::put_u32(out, static_cast<std::uint32_t>(ds.n_d));
    io::put_u64(out, static_cast<std::uint64_t>(ds.size()));
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index r = 0; r < ds.X.rows(); ++r) io::put_f32(out, ds.X(r, i));
        for (Eigen::Index r = 0; r < ds.Y.rows(); ++r) io::put_f32(out, ds.Y(r, i));
    }
    if (!out) throw std::runtime_error("failed writing dataset " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset " + path);
    io::expect_magic(in, "RDF1", path);
    const std::uint32_t version = io::get_u32(in);
    if (version != kDatasetVersion)
        throw std::runtime_error(path + ": dataset version " + std::to_string(version) + " is not supported");
    const auto n_q = static_cast<int>(io::get_u32(in));
    const auto n_d = static_cast<int>(io::get_u32(in));
    const auto count = static_cast<Eigen::Index>(io::get_u64(in));
    Dataset ds(n_q, n_d, count);
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index r = 0; r < ds.X.rows(); ++r) ds.X(r, i) = io::get_f32(in);
        for (Eigen::Index r = 0; r < ds.Y.rows(); ++r) ds.Y(r, i) = io::get_f32(in);
    }
    return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const char* group : {"q0_", "qd0_", "k_"})
        for (int j = 0; j < ds.n_q; ++j) out << group << j << ',';
    for (int d = 0; d < ds.n_d; ++d) out << "c_" << d << ',';
    for (int j = 0; j < ds.n_q; ++j) out << "r_" << j << (j + 1 < ds.n_q ? ',' : '\n');
    out << std::setprecision(9);
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index r = 0; r < ds.X.rows(); ++r) out << static_cast<float>(ds.X(r, i)) << ',';
        for (Eigen::Index r = 0; r < ds.Y.rows(); ++r)
            out << static_cast<float>(ds.Y(r, i)) << (r + 1 < ds.Y.rows() ? ',' : '\n');
    }
}

}  // namespace rdf::net
