#include "rdf/cli/commands.hpp"

#include <cstdio>
#include <optional>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rdf/arm/kinematics.hpp"
#include "rdf/arm/reach_set.hpp"
#include "rdf/cli/scenes.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/dataset.hpp"
#include "rdf/net/train.hpp"
#include "rdf/random.hpp"

namespace rdf::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFormat = "rdf-manifest";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const fs::path& dir, json m) {
    m["format"] = kManifestFormat;
    m["version"] = 1;
    write_text(dir / "manifest.json", m.dump(1) + "\n");
}

json read_manifest(const fs::path& dir, const std::string& kind) {
    const fs::path path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing manifest " + path.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (m.value("format", "") != kManifestFormat || m.value("version", 0) != 1)
        throw ConfigError(path.string() + ": unsupported manifest format or version");
    if (m.value("kind", "") != kind) throw ConfigError(path.string() + " does not describe a " + kind);
    return m;
}

void check_spec(const json& m, const arm::RobotSpec& spec, const fs::path& dir) {
    if (m.at("spec_hash").get<std::string>() != hex64(spec.hash()))
        throw ConfigError(dir.string() + " was produced for a different robot spec (hash " +
                          m.at("spec_hash").get<std::string>() + ", config " + hex64(spec.hash()) + ")");
}

void check_file(const json& m, const fs::path& dir) {
    const fs::path file = dir / m.at("file").get<std::string>();
    if (!fs::exists(file)) throw ConfigError("missing " + file.string());
    if (hex64(file_hash(file)) != m.at("file_hash").get<std::string>())
        throw ConfigError(file.string() + " does not match its manifest hash");
}

net::Dataset load_dataset_dir(const fs::path& dir, const arm::RobotSpec& spec, json* manifest = nullptr) {
    if (dir.empty()) throw ConfigError("no dataset directory given");
    const json m = read_manifest(dir, "dataset");
    check_spec(m, spec, dir);
    check_file(m, dir);
    if (manifest) *manifest = m;
    return net::read_dataset((dir / m.at("file").get<std::string>()).string());
}

}  // namespace

std::uint64_t file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return arm::fnv1a(ss.str());
}

net::MlpModel load_model_dir(const fs::path& dir, const arm::RobotSpec& spec) {
    if (dir.empty()) throw ConfigError("no model directory given");
    const json m = read_manifest(dir, "model");
    check_spec(m, spec, dir);
    check_file(m, dir);
    net::MlpModel model = net::MlpModel::load((dir / m.at("file").get<std::string>()).string());
    if (model.n_q() != spec.n_q() || model.n_d() != spec.n_d)
        throw ConfigError(dir.string() + ": model shape does not fit the robot spec");
    return model;
}

void cmd_gen_dataset(const RunConfig& c, std::ostream& log) {
    const std::uint64_t seed = c.require_seed();
    const fs::path out = c.require_out();
    fs::create_directories(out);
    log << "sampling " << c.dataset.n_init << " initial conditions x " << c.dataset.n_obstacles << " obstacles\n";
    const net::Dataset ds = net::sample_dataset(c.spec, c.dataset.n_init, c.dataset.n_obstacles, seed, c.dataset.threads);
    const fs::path file = out / "dataset.rdf1";
    net::write_dataset(ds, file.string());
    json m;
    m["kind"] = "dataset";
    m["spec_hash"] = hex64(c.spec.hash());
    m["spec"] = json::parse(c.spec.to_json());
    m["seed"] = seed;
    m["n_init"] = c.dataset.n_init;
    m["n_obstacles"] = c.dataset.n_obstacles;
    m["count"] = ds.size();
    m["file"] = "dataset.rdf1";
    m["file_hash"] = hex64(file_hash(file));
    write_manifest(out, m);
    log << "wrote " << ds.size() << " records to " << file.string() << "\n";
}

void cmd_train(const RunConfig& c, std::ostream& log) {
    const std::uint64_t seed = c.require_seed();
    const fs::path out = c.require_out();
    json dm;
    const net::Dataset all = load_dataset_dir(c.train.dataset, c.spec, &dm);
    const net::DatasetSplit split = net::split_train_validation(all, seed);
    if (split.train.size() == 0 || split.validation.size() == 0)
        throw ConfigError("dataset too small for a train/validation split");
    net::TrainConfig tc = c.train.train;
    tc.seed = seed;
    const std::vector<double> betas = c.train.beta1_sweep.empty() ? std::vector<double>{tc.beta1} : c.train.beta1_sweep;
    fs::create_directories(out);
    log << "training on " << split.train.size() << " records, validating on " << split.validation.size() << "\n";
    std::optional<net::TrainResult> best;
    double best_val = std::numeric_limits<double>::infinity(), best_beta1 = tc.beta1;
    std::string sweep = "beta1,best_epoch,best_val_loss\n";
    for (double b1 : betas) {
        tc.beta1 = b1;
        std::optional<net::MlpModel> model;
        try {
            tc.validate();
            model = net::MlpModel::create(c.spec.n_q(), c.spec.n_d, tc.width, derive_seed(seed, 3), c.train.hidden_layers);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("train: ") + e.what());
        }
        net::set_spec_normalization(*model, c.spec);
        if (betas.size() > 1) log << "beta1 " << num(b1) << "\n";
        net::TrainResult r = net::train(*model, split.train, split.validation, tc, [&](const net::EpochMetrics& e) {
            log << "epoch " << e.epoch << " train " << num(e.train_loss) << " val " << num(e.val_loss) << " val L1 "
                << num(e.val_mean_l1) << "\n";
        });
        double val = std::numeric_limits<double>::infinity();
        for (const auto& e : r.metrics)
            if (e.epoch == r.best_epoch) val = e.val_loss;
        sweep += num(b1) + "," + std::to_string(r.best_epoch) + "," + num(val) + "\n";
        // Ties keep the earlier value.
        if (!best || val < best_val) {
            best_val = val;
            best_beta1 = b1;
            best = std::move(r);
        }
    }
    tc.beta1 = best_beta1;
    if (betas.size() > 1) write_text(out / "sweep.csv", sweep);
    const net::TrainResult& r = *best;
    std::string csv = "epoch,train_loss,val_loss,val_mean_l1,val_max_l1\n";
    for (const auto& e : r.metrics)
        csv += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_loss) + "," + num(e.val_mean_l1) +
               "," + num(e.val_max_l1) + "\n";
    write_text(out / "metrics.csv", csv);
    const fs::path file = out / "model.mlp1";
    r.model.save(file.string());
    json m;
    m["kind"] = "model";
    m["spec_hash"] = hex64(c.spec.hash());
    m["dataset_hash"] = dm.at("file_hash");
    m["seed"] = seed;
    m["best_epoch"] = r.best_epoch;
    m["epochs"] = tc.epochs;
    m["width"] = tc.width;
    m["hidden_layers"] = c.train.hidden_layers;
    m["lr"] = tc.lr;
    m["lr_final"] = tc.lr_final;
    m["beta1"] = tc.beta1;
    m["beta2"] = tc.beta2;
    m["weight_decay"] = tc.weight_decay;
    m["eikonal"] = tc.eikonal;
    m["batch_size"] = tc.batch_size;
    m["file"] = "model.mlp1";
    m["file_hash"] = hex64(file_hash(file));
    write_manifest(out, m);
    log << "best epoch " << r.best_epoch << ", model written to " << file.string() << "\n";
}

void cmd_eval(const RunConfig& c, std::ostream& log) {
    const fs::path out = c.require_out();
    const net::MlpModel model = load_model_dir(c.eval.model, c.spec);
    const net::Dataset data = load_dataset_dir(c.eval.dataset, c.spec);
    const net::EvalReport rep = net::evaluate(model, data);
    const double eik = net::mean_eikonal_residual(model, data);
    std::string csv = "metric,value\n";
    csv += "records," + std::to_string(data.size()) + "\n";
    csv += "mean_l1," + num(rep.mean_l1) + "\n";
    csv += "max_l1," + num(rep.max_l1) + "\n";
    for (std::size_t j = 0; j < rep.per_link_mean_l1.size(); ++j)
        csv += "link" + std::to_string(j) + "_mean_l1," + num(rep.per_link_mean_l1[j]) + "\n";
    csv += "mean_eikonal_residual," + num(eik) + "\n";
    fs::create_directories(out);
    write_text(out / "eval.csv", csv);
    log << "mean L1 " << num(rep.mean_l1) << " m, max L1 " << num(rep.max_l1) << " m over " << data.size()
        << " records\n";
}

void cmd_plan(const RunConfig& c, std::ostream& log) {
    const std::uint64_t seed = c.require_seed();
    const fs::path out = c.require_out();
    const PlanSection& p = c.plan;
    std::optional<net::MlpModel> model;
    if (p.mode == planner::ConstraintMode::neural) model = load_model_dir(p.model, c.spec);
    const std::vector<TrialScene> scenes =
        p.scenarios.empty() ? sample_scenes(c.spec, p.trials, p.obstacles, seed) : read_scenes(p.scenarios, c.spec);
    fs::create_directories(out);
    write_scenes(out / "scenarios.json", c.spec, scenes);

    TrialSettings s;
    s.mode = p.mode;
    s.delta = p.effective_delta();
    s.time_limit = p.time_limit;
    s.max_steps = p.max_steps;
    s.seed = seed;
    const auto records = run_trials(c.spec, scenes, s, model ? &*model : nullptr, p.threads, [&](const TrialRecord& r) {
        log << "trial " << r.trial << ": " << planner::to_string(r.status) << " after " << r.steps << " steps\n";
    });

    std::string results = "trial,status,steps,infeasible_steps,min_margin,violations,goal_distance,rest_distance,final_speed\n";
    std::string timing = "trial,mean_solve_s,max_solve_s\n";
    int reached = 0, collided = 0, stuck = 0, exhausted = 0, violations = 0;
    double solve_total = 0.0;
    for (const auto& r : records) {
        results += std::to_string(r.trial) + "," + planner::to_string(r.status) + "," + std::to_string(r.steps) + "," +
                   std::to_string(r.infeasible_steps) + "," + num(r.min_margin) + "," + std::to_string(r.violations) +
                   "," + num(r.goal_distance) + "," + num(r.rest_distance) + "," + num(r.final_speed) + "\n";
        timing += std::to_string(r.trial) + "," + num(r.mean_solve_seconds) + "," + num(r.max_solve_seconds) + "\n";
        reached += r.status == planner::PlanStatus::reached;
        collided += r.status == planner::PlanStatus::collided;
        stuck += r.status == planner::PlanStatus::stuck;
        exhausted += r.status == planner::PlanStatus::step_budget_exhausted;
        violations += r.violations;
        solve_total += r.mean_solve_seconds;
    }
    write_text(out / "results.csv", results);
    write_text(out / "timing.csv", timing);
    json summary;
    summary["mode"] = planner::to_string(p.mode);
    summary["delta"] = s.delta;
    summary["trials"] = records.size();
    summary["reached"] = reached;
    summary["collided"] = collided;
    summary["stuck"] = stuck;
    summary["step_budget_exhausted"] = exhausted;
    summary["audit_violations"] = violations;
    summary["spec_hash"] = hex64(c.spec.hash());
    write_text(out / "summary.json", summary.dump(1) + "\n");
    const double n = std::max<double>(1.0, static_cast<double>(records.size()));
    log << "reached " << reached << "/" << records.size() << ", collided " << collided << ", audit violations "
        << violations << ", mean solve time " << num(solve_total / n) << " s\n";
}

SceneRender build_scene(const RunConfig& c) {
    const RenderSection& r = c.render;
    SceneRender scene;
    scene.n_d = c.spec.n_d;
    scene.obstacles = r.obstacles;
    if (r.q) {
        if (r.q->size() != c.spec.n_q()) throw ConfigError("render.q needs n_q entries");
        const auto poses = arm::fk_point(c.spec, *r.q);
        for (int j = 0; j < c.spec.n_q(); ++j) scene.links.push_back(arm::link_occupancy(c.spec, poses, j));
    }
    const bool traj = r.q0 && r.qd0 && r.k;
    if ((r.hulls || r.field != "none") && !traj && (r.q0 || r.qd0 || r.k))
        throw ConfigError("render needs all of q0, qd0 and k");
    if (!traj) {
        if (r.field != "none") throw ConfigError("a contour needs q0, qd0 and k");
        return scene;
    }
    const int n = c.spec.n_q();
    if (r.q0->size() != n || r.qd0->size() != n || r.k->size() != n)
        throw ConfigError("render q0, qd0 and k need n_q entries");
    std::optional<arm::ReachSet> reach;
    if (r.hulls || r.field == "exact") reach.emplace(c.spec, *r.q0, *r.qd0);
    if (r.hulls) scene.hulls = exact::buffered_hulls(*reach, *r.k, c.spec.obstacle_side);
    if (r.field == "none") return scene;

    // Views: xy, plus xz in 3D; the remaining coordinate is held at 0.
    const int views = c.spec.n_d == 2 ? 1 : 2;
    std::function<double(const Eigen::VectorXd&)> field;
    std::vector<exact::ConvexPolytope> field_hulls;
    std::optional<net::MlpModel> model;
    if (r.field == "exact") {
        const double side = r.field_side > 0 ? r.field_side : c.spec.obstacle_side;
        field_hulls = exact::buffered_hulls(*reach, *r.k, side);
        field = [&](const Eigen::VectorXd& p) { return exact::rdf_from_hulls(field_hulls, p).min(); };
    }
    if (r.field == "neural") model = load_model_dir(r.model, c.spec);
    for (int v = 0; v < views; ++v) {
        const int axis2 = v == 0 ? 1 : 2;
        auto point = [&](double a, double b) {
            Eigen::VectorXd p = Eigen::VectorXd::Zero(c.spec.n_d);
            p[0] = a;
            p[axis2] = b;
            return p;
        };
        Eigen::MatrixXd grid;
        if (model) {
            // One batch for the whole grid.
            const int res = r.resolution;
            Eigen::MatrixXd X(model->input_dim(), static_cast<Eigen::Index>(res) * res);
            const double h = 2.0 / (res - 1);
            for (int i = 0; i < res; ++i)
                for (int j = 0; j < res; ++j) X.col(static_cast<Eigen::Index>(i) * res + j) << *r.q0, *r.qd0, *r.k,
                    point(-1.0 + i * h, -1.0 + j * h);
            const Eigen::RowVectorXd y = model->forward_batch(X).colwise().minCoeff();
            grid.resize(res, res);
            for (int i = 0; i < res; ++i)
                for (int j = 0; j < res; ++j) grid(i, j) = y[static_cast<Eigen::Index>(i) * res + j];
        } else {
            grid = sample_grid([&](double a, double b) { return field(point(a, b)); }, r.resolution);
        }
        scene.contours.push_back(marching_squares(grid, -1.0, 1.0));
    }
    return scene;
}

void cmd_render(const RunConfig& c, std::ostream& log) {
    const fs::path out = c.require_out();
    const SceneRender scene = build_scene(c);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, render_svg(scene));
    log << "wrote " << out.string() << "\n";
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reachability-based signed distance tools"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path, mode;
    std::optional<int> trials;
    std::optional<double> time_limit;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--out", out_path, "output directory (SVG file for render)");
    };
    CLI::App* gen = app.add_subcommand("gen-dataset", "sample and label a dataset");
    CLI::App* train = app.add_subcommand("train", "train a distance network");
    CLI::App* eval = app.add_subcommand("eval", "evaluate a trained network on a dataset");
    CLI::App* plan = app.add_subcommand("plan", "run receding-horizon planning trials");
    CLI::App* render = app.add_subcommand("render", "draw a scene as SVG");
    for (CLI::App* sub : {gen, train, eval, plan, render}) add_common(sub);
    plan->add_option("--mode", mode, "collision constraint")->check(CLI::IsMember({"neural", "exact"}));
    plan->add_option("--trials", trials, "number of trials")->check(CLI::NonNegativeNumber);
    plan->add_option("--time-limit", time_limit, "solver wall-clock budget per step, s (0: none)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig c = RunConfig::load(config_path);
        if (seed) c.seed = *seed;
        if (!out_path.empty()) c.out = out_path;
        if (!mode.empty()) c.plan.mode = planner::parse_mode(mode);
        if (trials) c.plan.trials = *trials;
        if (time_limit) c.plan.time_limit = *time_limit;
        if (gen->parsed()) cmd_gen_dataset(c, out);
        else if (train->parsed()) cmd_train(c, out);
        else if (eval->parsed()) cmd_eval(c, out);
        else if (plan->parsed()) cmd_plan(c, out);
        else cmd_render(c, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace rdf::cli
