#include "qsens/robustness.hpp"

#include <cmath>

namespace qsens {

namespace {

// H~^(k) += d * sum_m alpha_m^(k) Hhat_m s_m^(k)
void accumulate_step(std::vector<Mat>& hs, const Controller& ctrl,
                     const UncertaintyStructure& unc, const DirectionSequence& dirs,
                     double d) {
    for (int k = 0; k < ctrl.steps; ++k)
        for (int m = 0; m < unc.slots(); ++m) {
            if (!unc.is_active(m)) continue;
            const double c = d * dirs.at(k, m) * unc.alpha(m, ctrl, k);
            if (c != 0.0) hs[k].add_scaled(c, unc.structures[m]);
        }
}

} // namespace

StepSizeResult choose_step_size(const ProblemSpec& spec, const Controller& ctrl,
                                const UncertaintyStructure& unc) {
    unc.validate(spec.dim);
    const std::vector<Mat> nominal = step_hamiltonians(spec, ctrl);
    const double dt = ctrl.dt();
    const PropagatorSet props = propagate_hamiltonians(nominal, dt);
    const double eps = fidelity(props, spec.target).error;
    const DirectionSequence dirs =
        bound_vu(z_coefficients(nominal, dt, props, spec, ctrl, unc)).worst;

    constexpr double kFloor = 1e-6;
    for (double exponent = 1.0; exponent <= 6.0 + 1e-9; exponent += 0.25) {
        const double d = std::pow(10.0, -exponent);
        std::vector<Mat> hs = nominal;
        accumulate_step(hs, ctrl, unc, dirs, d);
        const double perturbed = fidelity(total_propagator(hs, dt), spec.target).error;
        if (std::abs(perturbed - eps) / std::max(eps, 1e-12) < 0.1)
            return {d, false};
        if (d <= kFloor) break;
    }
    return {kFloor, true};
}

DeltaSearchResult find_delta_bar(const ProblemSpec& spec, const Controller& ctrl,
                                 const UncertaintyStructure& unc, double epsilon,
                                 double step, long max_iter) {
    if (!(step > 0.0)) throw argument_error("find_delta_bar: step must be positive");
    if (max_iter < 1) throw argument_error("find_delta_bar: max_iter must be positive");
    unc.validate(spec.dim);

    DeltaSearchResult out;
    out.step = step;
    out.threshold = epsilon;

    const double dt = ctrl.dt();
    std::vector<Mat> hs = step_hamiltonians(spec, ctrl);
    PropagatorSet props = propagate_hamiltonians(hs, dt);
    const double nominal_eps = fidelity(props, spec.target).error;
    if (epsilon <= nominal_eps) {
        // already violating at delta = 0
        out.trace.emplace_back(0.0, nominal_eps);
        return out;
    }

    // each pass reuses the propagators of H~(delta_{n-1}) for both the error
    // and the worst directions of the perturbed system
    DirectionSequence dirs = bound_vu(z_coefficients(hs, dt, props, spec, ctrl, unc)).worst;
    accumulate_step(hs, ctrl, unc, dirs, step);
    props = propagate_hamiltonians(hs, dt);
    long n = 1;
    double err = fidelity(props, spec.target).error;
    out.trace.emplace_back(step, err);

    while (err < epsilon) {
        if (n >= max_iter) {
            out.terminated = DeltaSearchResult::Termination::max_iterations;
            out.n_bar = n;
            out.delta_bar = static_cast<double>(n) * step; // lower bound only
            return out;
        }
        ++n;
        dirs = bound_vu(z_coefficients(hs, dt, props, spec, ctrl, unc)).worst;
        accumulate_step(hs, ctrl, unc, dirs, step);
        props = propagate_hamiltonians(hs, dt);
        err = fidelity(props, spec.target).error;
        out.trace.emplace_back(static_cast<double>(n) * step, err);
    }

    out.n_bar = n - 1;
    out.delta_bar = static_cast<double>(n - 1) * step;
    return out;
}

} // namespace qsens
