#pragma once

#include <vector>

#include "qsens/controller.hpp"
#include "qsens/matrix.hpp"

namespace qsens {

struct ProblemSpec;

// Structured Hamiltonian uncertainty. Slot 0 carries the drift structure,
// slots 1..M the control structures; every active structure is Hermitian with
// unit Frobenius norm. The per-step scaling alpha is 1 for the drift slot and
// the field amplitude f_m^(k) for control slot m, so a perturbed step reads
//   H^(k) + delta * sum_m s_m^(k) alpha_m^(k) Hhat_m  over the active slots.
struct UncertaintyStructure {
    std::vector<Mat> structures;
    std::vector<char> active;

    int slots() const { return static_cast<int>(structures.size()); }
    bool is_active(int m) const { return active[m] != 0; }

    double alpha(int slot, const Controller& ctrl, int k) const {
        return slot == 0 ? 1.0 : ctrl.f(slot - 1, k);
    }

    // Frobenius-normalized copies of the problem's own drift and control
    // operators, all slots active; zero operators are left inactive.
    static UncertaintyStructure default_for(const ProblemSpec& spec);

    // Wrap raw Hermitian matrices: normalizes each and activates nonzero slots.
    static UncertaintyStructure from_raw(const std::vector<Mat>& raw);

    void validate(int dim) const; // hermiticity + unit norm of active slots
};

// Per-step direction weights s_m^(k) over the slots; meaningful sequences have
// unit Euclidean rows (or all-zero rows for steps that contribute nothing).
struct DirectionSequence {
    int steps = 0;
    int slots = 0;
    std::vector<double> w; // row-major [step][slot]

    DirectionSequence() = default;
    DirectionSequence(int kappa, int m)
        : steps(kappa), slots(m), w(static_cast<std::size_t>(kappa) * m, 0.0) {}

    double& at(int k, int m) { return w[static_cast<std::size_t>(k) * slots + m]; }
    double at(int k, int m) const { return w[static_cast<std::size_t>(k) * slots + m]; }

    // constant direction e_mu in every step
    static DirectionSequence constant_basis(int kappa, int slots, int mu);

    // largest deviation of any nonzero row norm from 1
    double row_norm_defect() const;
};

} // namespace qsens
