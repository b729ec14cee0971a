#include "rdf/planner/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdf::planner {

namespace {

using Clock = std::chrono::steady_clock;

Eigen::VectorXd project(const Eigen::VectorXd& k) { return k.cwiseMax(-1.0).cwiseMin(1.0); }

struct Timeout {};
struct BudgetExhausted {};

class Runner {
public:
    Runner(const NlpProblem& p, const SolverOptions& o) : p_(p), o_(o), start_(Clock::now()) {}

    int evaluations = 0;
    bool has_best = false;
    Eigen::VectorXd best_k;
    double best_cost = std::numeric_limits<double>::infinity();
    double best_margin = std::numeric_limits<double>::infinity();

    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

    // Augmented Lagrangian value at k. With `grad`, also fills the gradient and
    // a Gauss-Newton Hessian. Records feasible points.
    double lagrangian(const Eigen::VectorXd& k, const Eigen::VectorXd& lambda, double mu, Eigen::VectorXd* grad,
                      Eigen::MatrixXd* hess = nullptr, Eigen::VectorXd* c_out = nullptr) {
        if (o_.time_limit > 0 && seconds() > o_.time_limit) throw Timeout{};
        if (o_.max_evaluations > 0 && evaluations >= o_.max_evaluations) throw BudgetExhausted{};
        ++evaluations;
        Eigen::VectorXd fg;
        const double f = p_.cost(k, grad ? &fg : nullptr);
        double value = f;
        if (grad) {
            *grad = fg;
            if (hess) *hess = p_.cost_hessian ? p_.cost_hessian(k) : Eigen::MatrixXd::Identity(p_.n, p_.n);
        }
        double min_c = std::numeric_limits<double>::infinity();
        if (p_.constraints) {
            Margins m = p_.constraints(k, false);
            const Eigen::VectorXd ct = m.value.array() - o_.constraint_tol;
            bool active = false;
            for (Eigen::Index i = 0; i < ct.size(); ++i) {
                if (ct[i] < lambda[i] / mu) {
                    value += -lambda[i] * ct[i] + 0.5 * mu * ct[i] * ct[i];
                    active = true;
                } else {
                    value += -lambda[i] * lambda[i] / (2.0 * mu);
                }
            }
            if (grad && active) {
                const Margins mg = p_.constraints(k, true);
                for (Eigen::Index i = 0; i < ct.size(); ++i) {
                    if (ct[i] >= lambda[i] / mu) continue;
                    const Eigen::VectorXd gi = mg.grad.row(i).transpose();
                    *grad += (-lambda[i] + mu * ct[i]) * gi;
                    if (hess) *hess += mu * gi * gi.transpose();
                }
            }
            if (m.value.size() > 0) min_c = m.value.minCoeff();
            if (c_out) *c_out = m.value;
        }
        if (min_c >= 0.0 && f < best_cost) {
            has_best = true;
            best_k = k;
            best_cost = f;
            best_margin = min_c;
        }
        return value;
    }

    // Projected Gauss-Newton with backtracking along the projection arc.
    Eigen::VectorXd inner(Eigen::VectorXd k, const Eigen::VectorXd& lambda, double mu) {
        const Eigen::Index n = k.size();
        Eigen::VectorXd g;
        Eigen::MatrixXd h;
        double v = lagrangian(k, lambda, mu, &g, &h);
        for (int it = 0; it < o_.max_inner; ++it) {
            // Variables held at a bound by the gradient stay fixed.
            std::vector<Eigen::Index> free;
            for (Eigen::Index j = 0; j < n; ++j)
                if (!((k[j] <= -1.0 && g[j] > 0) || (k[j] >= 1.0 && g[j] < 0))) free.push_back(j);
            if (free.empty()) return k;
            const auto nf = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd hf(nf, nf);
            Eigen::VectorXd gf(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                gf[a] = g[free[a]];
                for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = h(free[a], free[b]);
            }
            hf.diagonal().array() += 1e-10 * (1.0 + hf.diagonal().cwiseAbs().maxCoeff());
            const Eigen::VectorXd df = hf.ldlt().solve(-gf);
            Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
            for (Eigen::Index a = 0; a < nf; ++a) d[free[a]] = df[a];
            if (!d.allFinite() || g.dot(d) >= 0) d = -g;  // not a descent direction

            bool accepted = false;
            Eigen::VectorXd k_new;
            double alpha = 1.0;
            for (int b = 0; b < 16; ++b, alpha *= 0.5) {
                k_new = project(k + alpha * d);
                if ((k_new - k).lpNorm<Eigen::Infinity>() < 1e-12) return k;
                const double v_new = lagrangian(k_new, lambda, mu, nullptr);
                if (v_new <= v + 1e-4 * g.dot(k_new - k)) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) return k;
            const double step = (k_new - k).lpNorm<Eigen::Infinity>();
            k = k_new;
            v = lagrangian(k, lambda, mu, &g, &h);
            if (step < 0.1 * o_.step_tol) break;
        }
        return k;
    }

    void run(const Eigen::VectorXd& start) {
        const int m = p_.constraints ? static_cast<int>(p_.constraints(start, false).value.size()) : 0;
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
        double mu = o_.mu0;
        Eigen::VectorXd k = project(start);
        double prev_violation = std::numeric_limits<double>::infinity();
        for (int outer = 0; outer < o_.max_outer; ++outer) {
            const Eigen::VectorXd k_prev = k;
            k = inner(k, lambda, mu);
            if (outer == 0) {
                // Every start shares lambda = 0 and mu0 here, so equal iterates repeat the same run.
                for (const auto& f : first_iterates_)
                    if ((f - k).lpNorm<Eigen::Infinity>() < 1e-12) return;
                first_iterates_.push_back(k);
            }
            Eigen::VectorXd c;
            lagrangian(k, lambda, mu, nullptr, nullptr, &c);
            if (m == 0) return;
            const Eigen::VectorXd ct = c.array() - o_.constraint_tol;
            const double violation = std::max(0.0, -ct.minCoeff());
            bool multipliers_settled = true;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double next = std::max(0.0, lambda[i] - mu * ct[i]);
                if (std::abs(next - lambda[i]) > 1e-8 * (1.0 + lambda[i])) multipliers_settled = false;
                lambda[i] = next;
            }
            const double moved = (k - k_prev).lpNorm<Eigen::Infinity>();
            if (c.minCoeff() >= 0.0 && (multipliers_settled || moved < o_.step_tol)) return;
            // Stuck at a point the penalty cannot move.
            if (outer > 0 && moved < o_.step_tol && violation >= prev_violation) return;
            if (violation > 0.25 * prev_violation) mu = std::min(mu * o_.mu_growth, 1e8);
            prev_violation = violation;
        }
    }

private:
    const NlpProblem& p_;
    const SolverOptions& o_;
    Clock::time_point start_;
    std::vector<Eigen::VectorXd> first_iterates_;
};

}  // namespace

Eigen::VectorXd minimize_box(const NlpProblem& problem, const Eigen::VectorXd& start, int max_iterations) {
    NlpProblem unconstrained{problem.n, problem.cost, problem.cost_hessian, {}};
    SolverOptions o;
    o.max_inner = max_iterations;
    o.max_outer = 1;
    o.max_evaluations = 0;
    Runner r(unconstrained, o);
    return r.inner(project(start), Eigen::VectorXd(), 1.0);
}

SolveOutcome solve_augmented_lagrangian(const NlpProblem& problem, const std::vector<Eigen::VectorXd>& starts,
                                        const SolverOptions& options) {
    if (!problem.cost) throw std::invalid_argument("solver: cost function missing");
    Runner r(problem, options);
    SolveOutcome out;
    std::vector<Eigen::VectorXd> seen;
    try {
        for (const Eigen::VectorXd& s : starts) {
            if (s.size() != problem.n) throw std::invalid_argument("solver: start has the wrong size");
            const Eigen::VectorXd ps = project(s);
            bool duplicate = false;
            for (const auto& q : seen) duplicate = duplicate || (q - ps).lpNorm<Eigen::Infinity>() < 1e-12;
            if (duplicate) continue;
            seen.push_back(ps);
            r.run(ps);
            if (r.has_best && r.best_cost <= options.target_cost) break;
        }
    } catch (const Timeout&) {
        out.timed_out = true;
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.evaluations = r.evaluations;
    out.seconds = r.seconds();
    if (r.has_best) {
        out.status = SolveStatus::feasible;
        out.k = r.best_k;
        out.cost = r.best_cost;
        out.min_margin = r.best_margin;
    }
    return out;
}

}  // namespace rdf::planner
