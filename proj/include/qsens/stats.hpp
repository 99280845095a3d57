#pragma once

#include <vector>

#include "qsens/errors.hpp"

namespace qsens {

enum class Tail { negative, positive };

struct CorrelationResult {
    int n = 0;
    double coefficient = 0.0; // r or tau
    double statistic = 0.0;   // t (Pearson) or z (Kendall)
    double p_value = 1.0;     // one-tailed in the requested direction
    Tail tail = Tail::negative;
    bool significant = false; // at the 0.05 level
};

// One-tailed Pearson test. The statistic is r sqrt((n-2)/(1-r^2)) referred to
// Student-t with n-2 degrees of freedom.
CorrelationResult pearson_test(const std::vector<double>& x, const std::vector<double>& y,
                               Tail tail);

// Same test starting from an already-known coefficient.
CorrelationResult pearson_from_r(double r, int n, Tail tail);

// One-tailed Kendall tau-b test with the tie-adjusted normal approximation
// for the statistic (exact pair counting, no continuity correction).
CorrelationResult kendall_test(const std::vector<double>& x, const std::vector<double>& y,
                               Tail tail);

// ---- special functions (exposed for tests) ----

double normal_cdf(double z);
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double dof);

} // namespace qsens
