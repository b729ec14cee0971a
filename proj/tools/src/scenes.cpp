#include "rdf/cli/scenes.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rdf/cli/config.hpp"
#include "rdf/planner/audit.hpp"
#include "rdf/random.hpp"

namespace rdf::cli {

using nlohmann::json;

namespace {

Eigen::VectorXd uniform_between(Rng& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = rng.uniform(lo[i], hi[i]);
    return v;
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<TrialScene> sample_scenes(const arm::RobotSpec& spec, int count, int n_obstacles, std::uint64_t seed) {
    std::vector<TrialScene> scenes;
    const Eigen::VectorXd lo = spec.q_min(), hi = spec.q_max();
    for (int t = 0; t < count; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        for (int attempt = 0;; ++attempt) {
            if (attempt > 10000) throw std::runtime_error("sample_scenes: no collision-free scene found");
            TrialScene s;
            s.q_start = uniform_between(rng, lo, hi);
            s.q_goal = uniform_between(rng, lo, hi);
            for (int l = 0; l < n_obstacles; ++l)
                s.obstacles.push_back({uniform_between(rng, Eigen::VectorXd::Constant(spec.n_d, -1.0),
                                                       Eigen::VectorXd::Constant(spec.n_d, 1.0)),
                                       spec.obstacle_side});
            if (planner::in_collision(spec, s.q_start, s.obstacles) || planner::in_collision(spec, s.q_goal, s.obstacles))
                continue;
            scenes.push_back(std::move(s));
            break;
        }
    }
    return scenes;
}

void write_scenes(const std::filesystem::path& path, const arm::RobotSpec& spec, const std::vector<TrialScene>& scenes) {
    json j;
    j["format"] = "rdf-scenarios";
    j["version"] = 1;
    j["spec_hash"] = hex64(spec.hash());
    j["scenes"] = json::array();
    for (const auto& s : scenes) {
        json o;
        o["start"] = to_json(s.q_start);
        o["goal"] = to_json(s.q_goal);
        o["obstacles"] = json::array();
        for (const auto& ob : s.obstacles) o["obstacles"].push_back({{"center", to_json(ob.center)}, {"side", ob.side}});
        j["scenes"].push_back(o);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(1) << "\n";
}

std::vector<TrialScene> read_scenes(const std::filesystem::path& path, const arm::RobotSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenarios " + path.string());
    std::vector<TrialScene> scenes;
    try {
        const json j = json::parse(in);
        if (j.value("format", "") != "rdf-scenarios") throw ConfigError(path.string() + " is not a scenario file");
        if (j.at("spec_hash").get<std::string>() != hex64(spec.hash()))
            throw ConfigError(path.string() + " was written for a different robot spec");
        for (const auto& o : j.at("scenes")) {
            TrialScene s;
            s.q_start = from_json(o.at("start"));
            s.q_goal = from_json(o.at("goal"));
            for (const auto& ob : o.at("obstacles")) s.obstacles.push_back({from_json(ob.at("center")), ob.at("side")});
            scenes.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenes;
}

TrialRecord run_trial(const arm::RobotSpec& spec, const TrialScene& scene, int index, const TrialSettings& settings,
                      const net::MlpModel* model) {
    planner::PlanProblem p;
    p.spec = spec;
    p.obstacles = scene.obstacles;
    p.q_start = scene.q_start;
    p.q_goal = scene.q_goal;
    p.delta = settings.delta;
    p.mode = settings.mode;
    p.time_limit = settings.time_limit;
    p.max_steps = settings.max_steps;
    p.seed = derive_seed(settings.seed, 1000 + static_cast<std::uint64_t>(index));
    const planner::PlanResult r = planner::receding_horizon(p, model);

    TrialRecord rec;
    rec.trial = index;
    rec.status = r.status;
    rec.steps = r.steps;
    rec.violations = static_cast<int>(r.violations.size());
    rec.min_margin = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& it : r.iterations) {
        total += it.solve_seconds;
        rec.max_solve_seconds = std::max(rec.max_solve_seconds, it.solve_seconds);
        if (it.feasible)
            rec.min_margin = std::min(rec.min_margin, it.min_margin);
        else
            ++rec.infeasible_steps;
    }
    if (!r.iterations.empty()) rec.mean_solve_seconds = total / static_cast<double>(r.iterations.size());
    const auto& last = r.executed.back();
    rec.goal_distance = (r.terminal_q - scene.q_goal).norm();
    rec.rest_distance = (last.q - scene.q_goal).norm();
    rec.final_speed = last.qd.norm();
    return rec;
}

std::vector<TrialRecord> run_trials(const arm::RobotSpec& spec, const std::vector<TrialScene>& scenes,
                                    const TrialSettings& settings, const net::MlpModel* model, unsigned threads,
                                    const std::function<void(const TrialRecord&)>& on_done) {
    std::vector<TrialRecord> out(scenes.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, scenes.size())));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= scenes.size()) return;
            try {
                out[i] = run_trial(spec, scenes[i], static_cast<int>(i), settings, model);
                if (on_done) {
                    std::lock_guard lock(mu);
                    on_done(out[i]);
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                next = scenes.size();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace rdf::cli
