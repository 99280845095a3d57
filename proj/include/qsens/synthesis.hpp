#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsens/dynamics.hpp"

namespace qsens {

enum class InitStrategy { uniform, normal, zeros };

std::string to_string(InitStrategy s);
InitStrategy init_strategy_from_string(const std::string& s);

struct SynthesisConfig {
    InitStrategy init = InitStrategy::normal;
    std::uint64_t seed = 1;
    int max_iters = 5000;
    double grad_tol = 1e-9;          // max-norm of the error gradient
    double fidelity_filter = 1e-2;   // keep controllers with eps below this
};

// d eps / d f_m^(k), flat in the Controller::fields layout. Uses the same
// prefix/suffix/Frechet machinery as the Z coefficients with the unnormalized
// control operator as the direction. Throws on a phase-degenerate fidelity.
std::vector<double> gradient_error(const ProblemSpec& spec, const Controller& ctrl);

struct OptimizeResult {
    Controller controller;
    double error = 1.0;
    double fidelity = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> error_history; // accepted iterates, non-increasing
};

// BFGS minimization of the fidelity error over the M x kappa field array with
// a strong-Wolfe line search (sufficient decrease + curvature). Deterministic
// for a fixed config.seed.
OptimizeResult optimize(const ProblemSpec& spec, double t_f, int kappa,
                        const SynthesisConfig& config);

struct SynthesizedController {
    Controller controller;
    double error = 1.0;
    double fidelity = 0.0;
    std::uint64_t seed = 0;       // this restart's derived seed
    InitStrategy init = InitStrategy::normal;
    int restart_index = 0;
    int iterations = 0;
    bool converged = false;
};

// count independent restarts seeded from (config.seed, restart index); keeps
// the ones passing the fidelity filter, ordered by restart index. Restarts run
// in parallel; results do not depend on scheduling.
std::vector<SynthesizedController> batch_synthesize(const ProblemSpec& spec, double t_f,
                                                    int kappa, int count,
                                                    const SynthesisConfig& config);

} // namespace qsens
