#pragma once

#include <vector>

#include "qsens/errors.hpp"

namespace qsens {

// Piecewise-constant control pulse: M field amplitudes held constant on each
// of kappa uniform intervals of length dt() = t_f / kappa. Amplitudes are in
// units of the coupling J, times in 1/J (hbar = 1 throughout).
struct Controller {
    int num_controls = 0; // M
    int steps = 0;        // kappa
    double t_f = 0.0;
    std::vector<double> fields; // row-major M x kappa

    Controller() = default;
    Controller(int m, int kappa, double tf)
        : num_controls(m), steps(kappa), t_f(tf),
          fields(static_cast<std::size_t>(m) * kappa, 0.0) {}

    double dt() const { return t_f / steps; }

    double& f(int m, int k) { return fields[static_cast<std::size_t>(m) * steps + k]; }
    double f(int m, int k) const { return fields[static_cast<std::size_t>(m) * steps + k]; }

    void validate() const;
};

} // namespace qsens
