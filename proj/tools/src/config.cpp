#include "rdf/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rdf::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

Eigen::VectorXd vec(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

template <class T>
void get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, const char* section, std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(std::string("unknown key '") + it.key() + "' in " + section);
    }
}

arm::RobotSpec robot_from(const json& r, const fs::path& base) {
    if (r.is_string()) {
        const std::string s = r.get<std::string>();
        if (s == "planar2") return arm::RobotSpec::planar(2);
        if (s == "spatial7") return arm::RobotSpec::spatial7();
        return arm::RobotSpec::load(resolve(base, s).string());
    }
    if (!r.is_object()) throw ConfigError("robot must be a string or an object");
    if (r.contains("preset")) {
        const std::string p = r.at("preset").get<std::string>();
        if (p == "planar") return arm::RobotSpec::planar(r.value("n_q", 2));
        if (p == "spatial7") return arm::RobotSpec::spatial7();
        throw ConfigError("unknown robot preset '" + p + "'");
    }
    if (r.contains("file")) return arm::RobotSpec::load(resolve(base, r.at("file").get<std::string>()).string());
    return arm::RobotSpec::from_json(r.dump());
}

std::vector<exact::Obstacle> obstacles_from(const json& j, double default_side) {
    std::vector<exact::Obstacle> out;
    for (const auto& o : j) {
        exact::Obstacle ob;
        ob.center = vec(o.at("center"), "obstacle center");
        ob.side = o.value("side", default_side);
        out.push_back(ob);
    }
    return out;
}

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

arm::RobotSpec robot_from_config(const std::string& json_text, const fs::path& base_dir) {
    try {
        return robot_from(json::parse(json_text), base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("robot: ") + e.what());
    }
}

double PlanSection::effective_delta() const {
    if (delta) return *delta;
    // The exact distance already over-approximates, so it needs no margin.
    return mode == planner::ConstraintMode::neural ? 0.03 : 0.0;
}

RunConfig RunConfig::from_json(const std::string& text, const fs::path& base) {
    RunConfig c;
    try {
        const json j = json::parse(text);
        check_keys(j, "config", {"robot", "seed", "out", "dataset", "train", "eval", "plan", "render"});
        try {
            c.spec = j.contains("robot") ? robot_from(j.at("robot"), base) : arm::RobotSpec::planar(2);
            c.spec.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("robot: ") + e.what());
        }
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out")) c.out = resolve(base, j.at("out").get<std::string>());
        if (j.contains("dataset")) {
            const json& d = j.at("dataset");
            check_keys(d, "dataset", {"n_init", "n_obstacles", "threads"});
            get(d, "n_init", c.dataset.n_init);
            get(d, "n_obstacles", c.dataset.n_obstacles);
            get(d, "threads", c.dataset.threads);
        }
        if (j.contains("train")) {
            const json& t = j.at("train");
            check_keys(t, "train", {"dataset", "epochs", "width", "hidden_layers", "batch_size", "lr", "lr_final",
                                    "beta1", "beta2", "weight_decay", "eikonal"});
            if (t.contains("dataset")) c.train.dataset = resolve(base, t.at("dataset").get<std::string>());
            auto& tc = c.train.train;
            get(t, "epochs", tc.epochs);
            get(t, "width", tc.width);
            get(t, "hidden_layers", c.train.hidden_layers);
            get(t, "batch_size", tc.batch_size);
            get(t, "lr", tc.lr);
            tc.lr_final = tc.lr;
            get(t, "lr_final", tc.lr_final);
            if (t.contains("beta1")) {
                const json& b = t.at("beta1");
                if (b.is_array()) {
                    if (b.empty()) throw ConfigError("train.beta1 list is empty");
                    for (const auto& v : b) c.train.beta1_sweep.push_back(v.get<double>());
                    tc.beta1 = c.train.beta1_sweep.front();
                } else {
                    tc.beta1 = b.get<double>();
                }
            }
            get(t, "beta2", tc.beta2);
            get(t, "weight_decay", tc.weight_decay);
            get(t, "eikonal", tc.eikonal);
        }
        if (j.contains("eval")) {
            const json& e = j.at("eval");
            check_keys(e, "eval", {"model", "dataset"});
            if (e.contains("model")) c.eval.model = resolve(base, e.at("model").get<std::string>());
            if (e.contains("dataset")) c.eval.dataset = resolve(base, e.at("dataset").get<std::string>());
        }
        if (j.contains("plan")) {
            const json& p = j.at("plan");
            check_keys(p, "plan", {"trials", "obstacles", "mode", "delta", "time_limit", "max_steps", "model",
                                   "scenarios", "threads"});
            get(p, "trials", c.plan.trials);
            get(p, "obstacles", c.plan.obstacles);
            if (p.contains("mode")) c.plan.mode = planner::parse_mode(p.at("mode").get<std::string>());
            if (p.contains("delta")) c.plan.delta = p.at("delta").get<double>();
            get(p, "time_limit", c.plan.time_limit);
            get(p, "max_steps", c.plan.max_steps);
            if (p.contains("model")) c.plan.model = resolve(base, p.at("model").get<std::string>());
            if (p.contains("scenarios")) c.plan.scenarios = resolve(base, p.at("scenarios").get<std::string>());
            get(p, "threads", c.plan.threads);
        }
        if (j.contains("render")) {
            const json& r = j.at("render");
            check_keys(r, "render", {"q", "q0", "qd0", "k", "obstacles", "hulls", "field", "field_side", "model",
                                     "resolution"});
            if (r.contains("q")) c.render.q = vec(r.at("q"), "render.q");
            if (r.contains("q0")) c.render.q0 = vec(r.at("q0"), "render.q0");
            if (r.contains("qd0")) c.render.qd0 = vec(r.at("qd0"), "render.qd0");
            if (r.contains("k")) c.render.k = vec(r.at("k"), "render.k");
            if (r.contains("obstacles")) c.render.obstacles = obstacles_from(r.at("obstacles"), c.spec.obstacle_side);
            get(r, "hulls", c.render.hulls);
            get(r, "field", c.render.field);
            get(r, "field_side", c.render.field_side);
            if (r.contains("model")) c.render.model = resolve(base, r.at("model").get<std::string>());
            get(r, "resolution", c.render.resolution);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.dataset.n_init < 1 || c.dataset.n_obstacles < 1) throw ConfigError("dataset counts must be positive");
    if (c.plan.trials < 0 || c.plan.obstacles < 0) throw ConfigError("plan counts must be >= 0");
    if (c.render.resolution < 2) throw ConfigError("render.resolution must be >= 2");
    if (c.render.field != "none" && c.render.field != "exact" && c.render.field != "neural")
        throw ConfigError("render.field must be none, exact or neural");
    return c;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), path.parent_path());
}

std::uint64_t RunConfig::require_seed() const {
    if (!seed) throw ConfigError("no seed given: set \"seed\" in the config or pass --seed");
    return *seed;
}

const fs::path& RunConfig::require_out() const {
    if (out.empty()) throw ConfigError("no output given: set \"out\" in the config or pass --out");
    return out;
}

}  // namespace rdf::cli
