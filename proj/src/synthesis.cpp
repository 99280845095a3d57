#include "qsens/synthesis.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "qsens/linalg.hpp"
#include "qsens/parallel.hpp"
#include "qsens/rng.hpp"

namespace qsens {

std::string to_string(InitStrategy s) {
    switch (s) {
    case InitStrategy::uniform: return "uniform";
    case InitStrategy::normal: return "normal";
    case InitStrategy::zeros: return "zeros";
    }
    return "normal";
}

InitStrategy init_strategy_from_string(const std::string& s) {
    if (s == "uniform") return InitStrategy::uniform;
    if (s == "normal" || s == "standard-normal") return InitStrategy::normal;
    if (s == "zeros") return InitStrategy::zeros;
    throw argument_error("unknown init strategy '" + s + "'");
}

namespace {

struct Eval {
    double error = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> grad;
    bool usable = false; // finite error, non-degenerate phase
};

// error and gradient in one pass over the propagator set
Eval eval_error_grad(const ProblemSpec& spec, const Controller& ctrl) {
    Eval ev;
    const std::vector<Mat> hs = step_hamiltonians(spec, ctrl);
    const double dt = ctrl.dt();
    const PropagatorSet props = propagate_hamiltonians(hs, dt);
    const GateOverlap ov = fidelity(props, spec.target);
    ev.error = ov.error;
    if (ov.phase_degenerate || !std::isfinite(ov.error)) return ev;

    const int kappa = ctrl.steps;
    const int mctl = ctrl.num_controls;
    const cxd weight = -std::exp(cxd(0.0, -ov.phase)) / static_cast<double>(spec.dim);

    ev.grad.assign(static_cast<std::size_t>(mctl) * kappa, 0.0);
    Mat suffix = spec.target.adjoint();
    for (int k = kappa - 1; k >= 0; --k) {
        const Mat ek = matmul(props.forward[k], suffix);
        for (int m = 0; m < mctl; ++m) {
            const Mat x = frechet_step(hs[k], spec.controls[m], 1.0, dt);
            ev.grad[static_cast<std::size_t>(m) * kappa + k] =
                std::real(weight * trace_prod(ek, x));
        }
        if (k > 0) suffix = matmul(suffix, props.steps[k]);
    }
    ev.usable = true;
    return ev;
}

double max_abs(const std::vector<double>& v) {
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x));
    return worst;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct LinePoint {
    double alpha = 0.0;
    double f = 0.0;
    double dphi = 0.0;
    Eval ev;
};

class BfgsState {
public:
    explicit BfgsState(std::size_t n) : n_(n), h_(n * n, 0.0) {
        for (std::size_t i = 0; i < n; ++i) h_[i * n + i] = 1.0;
    }

    void reset_identity() {
        std::fill(h_.begin(), h_.end(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) h_[i * n_ + i] = 1.0;
    }

    void scale(double c) {
        for (double& v : h_) v *= c;
    }

    std::vector<double> apply(const std::vector<double>& g) const {
        std::vector<double> out(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = h_.data() + i * n_;
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) s += row[j] * g[j];
            out[i] = s;
        }
        return out;
    }

    // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
    void update(const std::vector<double>& s, const std::vector<double>& y, double rho) {
        const std::vector<double> hy = apply(y);
        const double yhy = dot(y, hy);
        const double beta = rho * rho * yhy + rho;
        for (std::size_t i = 0; i < n_; ++i) {
            double* row = h_.data() + i * n_;
            const double si = s[i], ui = hy[i];
            for (std::size_t j = 0; j < n_; ++j)
                row[j] += beta * si * s[j] - rho * (si * hy[j] + ui * s[j]);
        }
    }

private:
    std::size_t n_;
    std::vector<double> h_;
};

} // namespace

std::vector<double> gradient_error(const ProblemSpec& spec, const Controller& ctrl) {
    const Eval ev = eval_error_grad(spec, ctrl);
    if (!ev.usable)
        throw contract_error("gradient_error: phase-degenerate fidelity, gradient undefined");
    return ev.grad;
}

OptimizeResult optimize(const ProblemSpec& spec, double t_f, int kappa,
                        const SynthesisConfig& config) {
    const int mctl = spec.num_controls();
    Controller ctrl(mctl, kappa, t_f);
    Rng rng(config.seed);
    switch (config.init) {
    case InitStrategy::uniform:
        for (double& v : ctrl.fields) v = rng.uniform_sym();
        break;
    case InitStrategy::normal:
        for (double& v : ctrl.fields) v = rng.gaussian();
        break;
    case InitStrategy::zeros:
        break;
    }

    const std::size_t n = ctrl.fields.size();
    OptimizeResult out;

    auto evaluate = [&](const std::vector<double>& x) {
        ctrl.fields = x;
        return eval_error_grad(spec, ctrl);
    };

    std::vector<double> x = ctrl.fields;
    Eval cur = evaluate(x);
    if (!cur.usable) {
        // a degenerate start (F = 0 exactly) has no usable gradient
        out.controller = ctrl;
        out.error = cur.error;
        out.fidelity = 1.0 - cur.error;
        return out;
    }
    out.error_history.push_back(cur.error);

    BfgsState hinv(n);
    bool first_update = true;

    constexpr double kC1 = 1e-4;
    constexpr double kC2 = 0.9;

    int it = 0;
    for (; it < config.max_iters; ++it) {
        if (max_abs(cur.grad) < config.grad_tol) {
            out.converged = true;
            break;
        }

        std::vector<double> p = hinv.apply(cur.grad);
        for (double& v : p) v = -v;
        double dphi0 = dot(cur.grad, p);
        if (!(dphi0 < 0.0)) { // not a descent direction, restart the model
            hinv.reset_identity();
            first_update = true;
            p = cur.grad;
            for (double& v : p) v = -v;
            dphi0 = dot(cur.grad, p);
            if (!(dphi0 < 0.0)) break; // zero gradient handled above
        }

        // strong Wolfe search: bracket then bisect
        auto probe = [&](double alpha) {
            std::vector<double> xt(x);
            for (std::size_t i = 0; i < n; ++i) xt[i] += alpha * p[i];
            LinePoint pt;
            pt.alpha = alpha;
            pt.ev = evaluate(xt);
            pt.f = pt.ev.usable ? pt.ev.error : std::numeric_limits<double>::infinity();
            pt.dphi = pt.ev.usable ? dot(pt.ev.grad, p) : 0.0;
            return pt;
        };

        const double f0 = cur.error;
        std::optional<LinePoint> accepted;
        LinePoint lo, hi;
        bool bracketed = false;

        LinePoint prev;
        prev.alpha = 0.0;
        prev.f = f0;
        prev.dphi = dphi0;
        prev.ev = cur;
        double alpha = 1.0;
        for (int trial = 0; trial < 30; ++trial) {
            LinePoint pt = probe(alpha);
            if (pt.f > f0 + kC1 * alpha * dphi0 || (trial > 0 && pt.f >= prev.f)) {
                lo = prev;
                hi = pt;
                bracketed = true;
                break;
            }
            if (std::abs(pt.dphi) <= -kC2 * dphi0) {
                accepted = pt;
                break;
            }
            if (pt.dphi >= 0.0) {
                lo = pt;
                hi = prev;
                bracketed = true;
                break;
            }
            prev = pt;
            alpha *= 2.0;
            if (alpha > 1e6) break;
        }

        if (!accepted && bracketed) {
            // zoom by bisection; lo always satisfies sufficient decrease
            for (int z = 0; z < 60 && !accepted; ++z) {
                const double am = 0.5 * (lo.alpha + hi.alpha);
                LinePoint pt = probe(am);
                if (pt.f > f0 + kC1 * am * dphi0 || pt.f >= lo.f) {
                    hi = pt;
                } else {
                    if (std::abs(pt.dphi) <= -kC2 * dphi0) {
                        accepted = pt;
                        break;
                    }
                    if (pt.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                    lo = pt;
                }
                if (std::abs(hi.alpha - lo.alpha) < 1e-18 * std::max(1.0, std::abs(lo.alpha))) {
                    if (lo.alpha > 0.0 && lo.ev.usable && lo.f < f0) accepted = lo;
                    break;
                }
            }
        }

        if (!accepted || accepted->alpha <= 0.0) break; // no usable step

        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = accepted->alpha * p[i];
            y[i] = accepted->ev.grad[i] - cur.grad[i];
        }
        const double ys = dot(y, s);
        const double ynorm = std::sqrt(dot(y, y));
        const double snorm = std::sqrt(dot(s, s));
        if (ys > 1e-12 * ynorm * snorm) {
            if (first_update) {
                hinv.scale(ys / dot(y, y)); // standard initial scaling
                first_update = false;
            }
            hinv.update(s, y, 1.0 / ys);
        }

        for (std::size_t i = 0; i < n; ++i) x[i] += s[i];
        cur = accepted->ev;
        out.error_history.push_back(cur.error);
    }

    ctrl.fields = x;
    out.controller = ctrl;
    out.error = cur.error;
    out.fidelity = 1.0 - cur.error;
    out.iterations = it;
    return out;
}

std::vector<SynthesizedController> batch_synthesize(const ProblemSpec& spec, double t_f,
                                                    int kappa, int count,
                                                    const SynthesisConfig& config) {
    if (count < 0) throw argument_error("batch_synthesize: negative restart count");
    std::vector<SynthesizedController> all(count);
    parallel_for(count, [&](int r) {
        SynthesisConfig local = config;
        local.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        OptimizeResult res = optimize(spec, t_f, kappa, local);
        SynthesizedController& sc = all[r];
        sc.controller = std::move(res.controller);
        sc.error = res.error;
        sc.fidelity = res.fidelity;
        sc.seed = local.seed;
        sc.init = config.init;
        sc.restart_index = r;
        sc.iterations = res.iterations;
        sc.converged = res.converged;
    });
    std::vector<SynthesizedController> survivors;
    for (auto& sc : all)
        if (std::isfinite(sc.error) && sc.error < config.fidelity_filter)
            survivors.push_back(std::move(sc));
    return survivors;
}

} // namespace qsens
