#include "qsens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsens {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

namespace {

// continued fraction for the incomplete beta (Lentz)
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

void require_samples(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw argument_error("correlation: sample size mismatch");
    if (x.size() < 3) throw argument_error("insufficient sample: need at least 3 points");
    for (double v : x)
        if (!std::isfinite(v)) throw argument_error("correlation: non-finite value in x");
    for (double v : y)
        if (!std::isfinite(v)) throw argument_error("correlation: non-finite value in y");
}

double one_tailed_p(double cdf_at_stat, Tail tail) {
    const double p = (tail == Tail::negative) ? cdf_at_stat : 1.0 - cdf_at_stat;
    return std::clamp(p, 0.0, 1.0);
}

// pairs within tied groups: sum over groups of t*(t-1)/2 and the higher
// moments the tie-adjusted variance needs
struct TieCounts {
    double pairs = 0.0;   // sum t(t-1)/2
    double v_adj = 0.0;   // sum t(t-1)(2t+5)
    double triples = 0.0; // sum t(t-1)(t-2)
};

TieCounts tie_counts(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    TieCounts out;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        out.pairs += t * (t - 1.0) / 2.0;
        out.v_adj += t * (t - 1.0) * (2.0 * t + 5.0);
        out.triples += t * (t - 1.0) * (t - 2.0);
        i = j;
    }
    return out;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (std::isinf(t)) return t < 0.0 ? 0.0 : 1.0;
    const double x = dof / (dof + t * t);
    const double half_tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, x);
    return t <= 0.0 ? half_tail : 1.0 - half_tail;
}

CorrelationResult pearson_from_r(double r, int n, Tail tail) {
    if (n < 3) throw argument_error("insufficient sample: need at least 3 points");
    if (!(r >= -1.0 && r <= 1.0)) throw argument_error("pearson coefficient out of range");
    CorrelationResult res;
    res.n = n;
    res.coefficient = r;
    res.tail = tail;
    if (std::abs(r) >= 1.0) {
        res.statistic = std::copysign(std::numeric_limits<double>::infinity(), r);
        res.p_value = ((r > 0.0) == (tail == Tail::positive)) ? 0.0 : 1.0;
    } else {
        res.statistic = r * std::sqrt((n - 2) / (1.0 - r * r));
        res.p_value = one_tailed_p(student_t_cdf(res.statistic, n - 2), tail);
    }
    res.significant = res.p_value < 0.05;
    return res;
}

CorrelationResult pearson_test(const std::vector<double>& x, const std::vector<double>& y,
                               Tail tail) {
    require_samples(x, y);
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw argument_error("degenerate sample: zero variance");
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return pearson_from_r(r, n, tail);
}

CorrelationResult kendall_test(const std::vector<double>& x, const std::vector<double>& y,
                               Tail tail) {
    require_samples(x, y);
    const int n = static_cast<int>(x.size());

    long long concordant = 0, discordant = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            const double prod = dx * dy;
            if (prod > 0.0) ++concordant;
            else if (prod < 0.0) ++discordant;
        }

    const TieCounts tx = tie_counts(x);
    const TieCounts ty = tie_counts(y);
    const double n0 = 0.5 * n * (n - 1.0);
    const double denom_x = n0 - tx.pairs;
    const double denom_y = n0 - ty.pairs;
    if (denom_x <= 0.0 || denom_y <= 0.0)
        throw argument_error("degenerate sample: all values tied");

    const double s = static_cast<double>(concordant - discordant);
    const double tau = s / std::sqrt(denom_x * denom_y);

    // tie-adjusted variance of S
    const double nn = n;
    const double v0 = nn * (nn - 1.0) * (2.0 * nn + 5.0);
    double var = (v0 - tx.v_adj - ty.v_adj) / 18.0;
    var += tx.pairs * ty.pairs * 2.0 / (nn * (nn - 1.0));
    var += tx.triples * ty.triples / (9.0 * nn * (nn - 1.0) * (nn - 2.0));

    CorrelationResult res;
    res.n = n;
    res.coefficient = tau;
    res.tail = tail;
    res.statistic = (var > 0.0) ? s / std::sqrt(var) : 0.0;
    res.p_value = one_tailed_p(normal_cdf(res.statistic), tail);
    res.significant = res.p_value < 0.05;
    return res;
}

} // namespace qsens
