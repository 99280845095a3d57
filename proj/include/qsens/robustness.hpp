#pragma once

#include <utility>
#include <vector>

#include "qsens/sensitivity.hpp"

namespace qsens {

// Outcome of the directed worst-case search. delta_bar = n_bar * step is the
// largest probed strength whose perturbed error stayed below the threshold;
// trace holds every evaluated (delta_n, perturbed error) pair. When the search
// stops on max_iterations, delta_bar is only a lower bound.
struct DeltaSearchResult {
    double delta_bar = 0.0;
    long n_bar = 0;
    double step = 0.0;
    double threshold = 0.0;
    std::vector<std::pair<double, double>> trace;
    enum class Termination { crossed, max_iterations } terminated = Termination::crossed;
};

// Step-size rule: largest d on the geometric ladder 10^{-1}, 10^{-1.25}, ...
// such that one worst-direction step of size d changes the error by less than
// a tenth in relative terms; floored at 1e-6. at_floor marks the case where
// even the floor violates the rule (the returned value is then the floor).
struct StepSizeResult {
    double value = 0.0;
    bool at_floor = false;
};

StepSizeResult choose_step_size(const ProblemSpec& spec, const Controller& ctrl,
                                const UncertaintyStructure& unc);

// Directed greedy search for the largest delta with perturbed error below
// epsilon. Starting from the bound-achieving worst directions of the nominal
// system, the perturbed Hamiltonian accumulates one step of size d per
// iteration, recomputing the worst directions from the *perturbed* system each
// time, and stops at the first crossing. The resulting perturbation path is
// polygonal, not a fixed ray.
DeltaSearchResult find_delta_bar(const ProblemSpec& spec, const Controller& ctrl,
                                 const UncertaintyStructure& unc, double epsilon,
                                 double step, long max_iter);

} // namespace qsens
