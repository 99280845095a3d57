#pragma once

#include <vector>

#include "qsens/controller.hpp"
#include "qsens/problems.hpp"
#include "qsens/uncertainty.hpp"

namespace qsens {

// Step propagators of one controller together with their cumulative products.
// forward[k] = Phi^(k,0) (product of steps 0..k-1, forward[0] = I) and
// backward[k] = Phi^(kappa,k) (product of steps k..kappa-1, backward[kappa] = I),
// so backward[k] * forward[k] is the total propagator for every k. These are
// built once per controller and reused by all sensitivity quantities.
struct PropagatorSet {
    std::vector<Mat> steps;
    std::vector<Mat> forward;
    std::vector<Mat> backward;

    int step_count() const { return static_cast<int>(steps.size()); }
    const Mat& total() const { return forward.back(); }
};

// H^(k) = H0 + sum_m H_m f_m^(k) for every step
std::vector<Mat> step_hamiltonians(const ProblemSpec& spec, const Controller& ctrl);

PropagatorSet propagate_hamiltonians(const std::vector<Mat>& step_h, double dt);

PropagatorSet propagate(const ProblemSpec& spec, const Controller& ctrl);

// total propagator only (left fold), for evaluations that need no prefixes
Mat total_propagator(const std::vector<Mat>& step_h, double dt);

// F = |Tr(U_f^dag Phi)| / N, error = 1 - F, phase = arg of the trace.
// A trace of exactly zero leaves the phase undefined: phase is reported as 0
// with the degenerate flag set instead of propagating NaNs.
struct GateOverlap {
    double fidelity = 0.0;
    double error = 1.0;
    double phase = 0.0;
    bool phase_degenerate = false;
};

GateOverlap fidelity(const Mat& total, const Mat& target);
GateOverlap fidelity(const PropagatorSet& props, const Mat& target);

// Perturbed step Hamiltonians H^(k) + delta * sum_m s_m^(k) alpha_m^(k) Hhat_m.
std::vector<Mat> perturbed_hamiltonians(const ProblemSpec& spec, const Controller& ctrl,
                                        const UncertaintyStructure& unc,
                                        const DirectionSequence& dirs, double delta);

// Fidelity error of the perturbed evolution at strength delta along dirs.
double perturbed_error(const ProblemSpec& spec, const Controller& ctrl,
                       const UncertaintyStructure& unc, const DirectionSequence& dirs,
                       double delta);

} // namespace qsens
