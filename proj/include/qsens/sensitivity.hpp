#pragma once

#include <vector>

#include "qsens/dynamics.hpp"

namespace qsens {

// First-order coefficients of the perturbed fidelity error: the derivative of
// the error in a direction sequence {s^(k)} is sum_k sum_m Z[k][m] s_m^(k).
// Each entry is
//   Z_m^(k) = Re{ -(e^{-i phi}/N) Tr[ Phi^(k,0) U_f^dag Phi^(kappa,k+1) X_m^(k) ] },
// with X_m^(k) the Frechet derivative of step k in direction alpha_m^(k) Hhat_m
// and phi the phase of Tr[U_f^dag Phi^(kappa,0)]. The prefix runs up to t_k and
// the suffix starts at t_{k+1}; this split is pinned by the finite-difference
// identity the tests enforce (the step being differentiated appears only
// through X, never in the flanking products).
struct ZCoefficients {
    int steps = 0;
    int slots = 0;
    std::vector<double> z; // row-major [step][slot]

    ZCoefficients() = default;
    ZCoefficients(int kappa, int m)
        : steps(kappa), slots(m), z(static_cast<std::size_t>(kappa) * m, 0.0) {}

    double& at(int k, int m) { return z[static_cast<std::size_t>(k) * slots + m]; }
    double at(int k, int m) const { return z[static_cast<std::size_t>(k) * slots + m]; }
};

// Z for the nominal system. Throws contract_error("phase-undefined") when the
// nominal fidelity trace vanishes.
ZCoefficients z_coefficients(const ProblemSpec& spec, const Controller& ctrl,
                             const UncertaintyStructure& unc);

// Same, but for explicitly supplied step Hamiltonians (the worst-case search
// re-evaluates Z for perturbed systems; alpha still comes from the nominal
// fields of ctrl).
ZCoefficients z_coefficients(const std::vector<Mat>& step_h, double dt,
                             const ProblemSpec& spec, const Controller& ctrl,
                             const UncertaintyStructure& unc);

// Same again with the propagators of step_h already in hand, so callers that
// evaluated the error first do not pay for a second propagation.
ZCoefficients z_coefficients(const std::vector<Mat>& step_h, double dt,
                             const PropagatorSet& props, const ProblemSpec& spec,
                             const Controller& ctrl, const UncertaintyStructure& unc);

// zeta = sum_k Z^(k) . s^(k)
double differential_sensitivity(const ZCoefficients& z, const DirectionSequence& dirs);

// column sums Gamma_m = sum_k Z[k][m] (the static-direction sensitivities)
std::vector<double> gamma_totals(const ZCoefficients& z);

// Variable-uncertainty bound: varsigma[k] = ||Z^(k)||_2, bound = sum_k varsigma[k],
// achieved by the row directions Z^(k)/varsigma[k] (zero rows get zero directions).
struct VuBound {
    double bound = 0.0;
    DirectionSequence worst;
    std::vector<double> varsigma;
};

VuBound bound_vu(const ZCoefficients& z);

// Static-uncertainty bound ||Gamma||_2: the maximum of Gamma . s over unit
// time-constant directions s.
double bound_static(const ZCoefficients& z);

// Log-sensitivity S_mu = zeta_mu / eps for the constant basis direction e_mu,
// plus the 2-norm over all slots. Throws contract_error at eps = 0.
struct LogSensitivity {
    std::vector<double> per_slot;
    double norm = 0.0;
};

LogSensitivity log_sensitivity(const ProblemSpec& spec, const Controller& ctrl,
                               const UncertaintyStructure& unc);

// Everything the robustness studies need for one controller. Throws on a
// zero nominal error (the log-sensitivity is undefined there) and on a
// phase-degenerate fidelity.
struct SensitivityReport {
    ZCoefficients Z;
    std::vector<double> gamma;
    std::vector<double> varsigma;
    DirectionSequence worst_dirs;
    double zeta_worst = 0.0; // differential sensitivity at worst_dirs (= b_vu)
    double b_vu = 0.0;
    double b_static = 0.0;
    LogSensitivity log_sens;
    double nominal_error = 0.0;
    double nominal_fidelity = 0.0;
};

SensitivityReport analyze_sensitivity(const ProblemSpec& spec, const Controller& ctrl,
                                      const UncertaintyStructure& unc);

} // namespace qsens
