#include "qsens/dynamics.hpp"

#include <cmath>

#include "qsens/linalg.hpp"

namespace qsens {

void Controller::validate() const {
    if (num_controls < 1 || steps < 1) throw argument_error("controller needs M >= 1 and kappa >= 1");
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw argument_error("controller gate time must be positive");
    if (fields.size() != static_cast<std::size_t>(num_controls) * steps)
        throw argument_error("controller field array has the wrong shape");
    for (double v : fields)
        if (!std::isfinite(v)) throw argument_error("controller fields must be finite");
}

UncertaintyStructure UncertaintyStructure::default_for(const ProblemSpec& spec) {
    std::vector<Mat> raw;
    raw.reserve(spec.controls.size() + 1);
    raw.push_back(spec.drift);
    for (const Mat& h : spec.controls) raw.push_back(h);
    return from_raw(raw);
}

UncertaintyStructure UncertaintyStructure::from_raw(const std::vector<Mat>& raw) {
    UncertaintyStructure unc;
    unc.structures.reserve(raw.size());
    unc.active.reserve(raw.size());
    for (const Mat& m : raw) {
        const double nrm = m.fro_norm();
        if (nrm == 0.0) {
            unc.structures.push_back(m);
            unc.active.push_back(0);
        } else {
            unc.structures.push_back((1.0 / nrm) * m);
            unc.active.push_back(1);
        }
    }
    return unc;
}

void UncertaintyStructure::validate(int dim) const {
    if (structures.size() != active.size())
        throw argument_error("uncertainty structure mask size mismatch");
    for (int m = 0; m < slots(); ++m) {
        if (!is_active(m)) continue;
        const Mat& h = structures[m];
        if (h.dim() != dim) throw argument_error("uncertainty structure dimension mismatch");
        require_hermitian(h, 1e-12, "uncertainty structure");
        if (std::abs(h.fro_norm() - 1.0) > 1e-12)
            throw contract_error("uncertainty structure is not Frobenius-normalized");
    }
}

DirectionSequence DirectionSequence::constant_basis(int kappa, int slots, int mu) {
    if (mu < 0 || mu >= slots) throw argument_error("direction slot out of range");
    DirectionSequence d(kappa, slots);
    for (int k = 0; k < kappa; ++k) d.at(k, mu) = 1.0;
    return d;
}

double DirectionSequence::row_norm_defect() const {
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        double sq = 0.0;
        for (int m = 0; m < slots; ++m) sq += at(k, m) * at(k, m);
        if (sq == 0.0) continue;
        worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
    }
    return worst;
}

std::vector<Mat> step_hamiltonians(const ProblemSpec& spec, const Controller& ctrl) {
    ctrl.validate();
    if (ctrl.num_controls != spec.num_controls())
        throw argument_error("controller rows do not match the problem's controls");
    std::vector<Mat> hs(ctrl.steps, Mat(spec.dim));
    for (int k = 0; k < ctrl.steps; ++k) {
        Mat& h = hs[k];
        h = spec.drift;
        for (int m = 0; m < ctrl.num_controls; ++m) {
            const double fm = ctrl.f(m, k);
            if (fm != 0.0) h.add_scaled(fm, spec.controls[m]);
        }
    }
    return hs;
}

PropagatorSet propagate_hamiltonians(const std::vector<Mat>& step_h, double dt) {
    const int kappa = static_cast<int>(step_h.size());
    if (kappa == 0) throw argument_error("propagate: no steps");
    const int n = step_h[0].dim();

    PropagatorSet p;
    p.steps.reserve(kappa);
    for (const Mat& h : step_h) p.steps.push_back(expm_step(h, dt));

    p.forward.resize(kappa + 1);
    p.forward[0] = Mat::identity(n);
    for (int k = 0; k < kappa; ++k) p.forward[k + 1] = matmul(p.steps[k], p.forward[k]);

    p.backward.resize(kappa + 1);
    p.backward[kappa] = Mat::identity(n);
    for (int k = kappa - 1; k >= 0; --k) p.backward[k] = matmul(p.backward[k + 1], p.steps[k]);
    return p;
}

PropagatorSet propagate(const ProblemSpec& spec, const Controller& ctrl) {
    return propagate_hamiltonians(step_hamiltonians(spec, ctrl), ctrl.dt());
}

Mat total_propagator(const std::vector<Mat>& step_h, double dt) {
    if (step_h.empty()) throw argument_error("total_propagator: no steps");
    Mat u = Mat::identity(step_h[0].dim());
    for (const Mat& h : step_h) u = matmul(expm_step(h, dt), u);
    return u;
}

GateOverlap fidelity(const Mat& total, const Mat& target) {
    if (total.dim() != target.dim()) throw argument_error("fidelity dimension mismatch");
    const cxd tr = trace_prod(target.adjoint(), total);
    const double mag = std::abs(tr);
    GateOverlap out;
    // roundoff can push |tr|/N marginally above 1; the contract is F in [0,1]
    out.fidelity = std::min(mag / total.dim(), 1.0);
    out.error = 1.0 - out.fidelity;
    if (mag == 0.0) {
        out.phase = 0.0;
        out.phase_degenerate = true;
    } else {
        out.phase = std::arg(tr);
    }
    return out;
}

GateOverlap fidelity(const PropagatorSet& props, const Mat& target) {
    return fidelity(props.total(), target);
}

std::vector<Mat> perturbed_hamiltonians(const ProblemSpec& spec, const Controller& ctrl,
                                        const UncertaintyStructure& unc,
                                        const DirectionSequence& dirs, double delta) {
    unc.validate(spec.dim);
    if (dirs.steps != ctrl.steps || dirs.slots != unc.slots())
        throw argument_error("direction sequence shape mismatch");
    std::vector<Mat> hs = step_hamiltonians(spec, ctrl);
    if (delta == 0.0) return hs;
    for (int k = 0; k < ctrl.steps; ++k)
        for (int m = 0; m < unc.slots(); ++m) {
            if (!unc.is_active(m)) continue;
            const double c = delta * dirs.at(k, m) * unc.alpha(m, ctrl, k);
            if (c != 0.0) hs[k].add_scaled(c, unc.structures[m]);
        }
    return hs;
}

double perturbed_error(const ProblemSpec& spec, const Controller& ctrl,
                       const UncertaintyStructure& unc, const DirectionSequence& dirs,
                       double delta) {
    const std::vector<Mat> hs = perturbed_hamiltonians(spec, ctrl, unc, dirs, delta);
    return fidelity(total_propagator(hs, ctrl.dt()), spec.target).error;
}

} // namespace qsens
