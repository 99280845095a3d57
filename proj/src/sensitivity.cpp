#include "qsens/sensitivity.hpp"

#include <cmath>

#include "qsens/linalg.hpp"

namespace qsens {

ZCoefficients z_coefficients(const std::vector<Mat>& step_h, double dt,
                             const ProblemSpec& spec, const Controller& ctrl,
                             const UncertaintyStructure& unc) {
    return z_coefficients(step_h, dt, propagate_hamiltonians(step_h, dt), spec, ctrl, unc);
}

ZCoefficients z_coefficients(const std::vector<Mat>& step_h, double dt,
                             const PropagatorSet& props, const ProblemSpec& spec,
                             const Controller& ctrl, const UncertaintyStructure& unc) {
    unc.validate(spec.dim);
    const int kappa = static_cast<int>(step_h.size());
    if (kappa != ctrl.steps) throw argument_error("z_coefficients: step count mismatch");
    if (props.step_count() != kappa) throw argument_error("z_coefficients: propagator mismatch");
    const int slots = unc.slots();

    const GateOverlap ov = fidelity(props, spec.target);
    if (ov.phase_degenerate)
        throw contract_error("phase-undefined: fidelity trace vanishes, Z coefficients have no phase reference");

    const cxd weight = -std::exp(cxd(0.0, -ov.phase)) / static_cast<double>(spec.dim);
    const Mat target_adj = spec.target.adjoint();

    ZCoefficients zc(kappa, slots);
    // E_k = Phi^(k,0) U_f^dag Phi^(kappa,k+1); the suffix factor M_k = U_f^dag
    // Phi^(kappa,k+1) obeys M_{k-1} = M_k Phi^(k+1,k) walking k downward.
    Mat suffix = target_adj; // M_{kappa-1}
    for (int k = kappa - 1; k >= 0; --k) {
        const Mat ek = matmul(props.forward[k], suffix);
        for (int m = 0; m < slots; ++m) {
            if (!unc.is_active(m)) continue;
            const double a = unc.alpha(m, ctrl, k);
            if (a == 0.0) continue;
            const Mat x = frechet_step(step_h[k], unc.structures[m], a, dt);
            zc.at(k, m) = std::real(weight * trace_prod(ek, x));
        }
        if (k > 0) suffix = matmul(suffix, props.steps[k]);
    }
    return zc;
}

ZCoefficients z_coefficients(const ProblemSpec& spec, const Controller& ctrl,
                             const UncertaintyStructure& unc) {
    return z_coefficients(step_hamiltonians(spec, ctrl), ctrl.dt(), spec, ctrl, unc);
}

double differential_sensitivity(const ZCoefficients& z, const DirectionSequence& dirs) {
    if (dirs.steps != z.steps || dirs.slots != z.slots)
        throw argument_error("differential_sensitivity: shape mismatch");
    double zeta = 0.0;
    for (int k = 0; k < z.steps; ++k)
        for (int m = 0; m < z.slots; ++m) zeta += z.at(k, m) * dirs.at(k, m);
    return zeta;
}

std::vector<double> gamma_totals(const ZCoefficients& z) {
    std::vector<double> g(z.slots, 0.0);
    for (int k = 0; k < z.steps; ++k)
        for (int m = 0; m < z.slots; ++m) g[m] += z.at(k, m);
    return g;
}

VuBound bound_vu(const ZCoefficients& z) {
    VuBound out;
    out.worst = DirectionSequence(z.steps, z.slots);
    out.varsigma.assign(z.steps, 0.0);
    for (int k = 0; k < z.steps; ++k) {
        double sq = 0.0;
        for (int m = 0; m < z.slots; ++m) sq += z.at(k, m) * z.at(k, m);
        const double rho = std::sqrt(sq);
        out.varsigma[k] = rho;
        out.bound += rho;
        if (rho > 0.0)
            for (int m = 0; m < z.slots; ++m) out.worst.at(k, m) = z.at(k, m) / rho;
    }
    return out;
}

double bound_static(const ZCoefficients& z) {
    double sq = 0.0;
    for (double g : gamma_totals(z)) sq += g * g;
    return std::sqrt(sq);
}

LogSensitivity log_sensitivity(const ProblemSpec& spec, const Controller& ctrl,
                               const UncertaintyStructure& unc) {
    const GateOverlap ov = fidelity(propagate(spec, ctrl), spec.target);
    if (ov.error <= 0.0)
        throw contract_error("log-sensitivity undefined at zero error");
    const ZCoefficients z = z_coefficients(spec, ctrl, unc);
    LogSensitivity out;
    out.per_slot = gamma_totals(z); // zeta for the constant basis direction e_mu
    double sq = 0.0;
    for (double& s : out.per_slot) {
        s /= ov.error;
        sq += s * s;
    }
    out.norm = std::sqrt(sq);
    return out;
}

SensitivityReport analyze_sensitivity(const ProblemSpec& spec, const Controller& ctrl,
                                      const UncertaintyStructure& unc) {
    SensitivityReport rep;
    const std::vector<Mat> hs = step_hamiltonians(spec, ctrl);
    const PropagatorSet props = propagate_hamiltonians(hs, ctrl.dt());
    const GateOverlap ov = fidelity(props, spec.target);
    if (ov.error <= 0.0)
        throw contract_error("log-sensitivity undefined at zero error");
    rep.nominal_error = ov.error;
    rep.nominal_fidelity = ov.fidelity;
    rep.Z = z_coefficients(hs, ctrl.dt(), props, spec, ctrl, unc);
    rep.gamma = gamma_totals(rep.Z);
    VuBound vu = bound_vu(rep.Z);
    rep.b_vu = vu.bound;
    rep.varsigma = std::move(vu.varsigma);
    rep.worst_dirs = std::move(vu.worst);
    rep.zeta_worst = differential_sensitivity(rep.Z, rep.worst_dirs);
    rep.b_static = bound_static(rep.Z);
    rep.log_sens.per_slot = rep.gamma;
    double sq = 0.0;
    for (double& s : rep.log_sens.per_slot) {
        s /= ov.error;
        sq += s * s;
    }
    rep.log_sens.norm = std::sqrt(sq);
    return rep;
}

} // namespace qsens
