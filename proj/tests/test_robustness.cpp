#include <doctest.h>

#include <cmath>

#include "qsens/linalg.hpp"
#include "qsens/robustness.hpp"
#include "support/oracles.hpp"

using namespace qsens;

namespace {

constexpr double kPi = 3.14159265358979323846;

// single-qubit toy with a monotone perturbed error: pi pulse onto -i sx,
// slightly detuned so the nominal error is small but nonzero, with the
// uncertainty collinear with the control axis
struct MonotoneToy {
    ProblemSpec spec;
    Controller ctrl;
    UncertaintyStructure unc;
};

MonotoneToy make_monotone_toy(double detune = 0.02) {
    MonotoneToy toy;
    toy.spec = testing::toy_single_qubit(
        Mat(2), expm_step(0.5 * pauli(Axis::x), kPi)); // target = -i sx
    toy.ctrl = Controller(1, 4, 1.0);
    for (int k = 0; k < 4; ++k) toy.ctrl.f(0, k) = kPi + detune;
    toy.unc = UncertaintyStructure::from_raw({pauli(Axis::x), Mat(2)});
    return toy;
}

} // namespace

TEST_CASE("choose_step_size returns the ladder maximum for an insensitive direction") {
    const ProblemSpec spec = make_problem(1);
    Rng rng(51);
    const Controller ctrl = testing::random_controller(4, 6, 2.0, rng);

    // identity structure only adds a global phase, so the error never moves
    std::vector<Mat> raw(5, Mat(4));
    raw[0] = Mat::identity(4);
    const UncertaintyStructure unc = UncertaintyStructure::from_raw(raw);

    const StepSizeResult r = choose_step_size(spec, ctrl, unc);
    CHECK(r.value == doctest::Approx(0.1));
    CHECK(!r.at_floor);
}

TEST_CASE("choose_step_size tracks the Taylor estimate on the toy") {
    const MonotoneToy toy = make_monotone_toy(0.05);
    const double eps = fidelity(propagate(toy.spec, toy.ctrl), toy.spec.target).error;
    const double b_vu = bound_vu(z_coefficients(toy.spec, toy.ctrl, toy.unc)).bound;
    REQUIRE(eps > 0.0);
    REQUIRE(b_vu > 0.0);

    const StepSizeResult r = choose_step_size(toy.spec, toy.ctrl, toy.unc);
    CHECK(!r.at_floor);

    // rule approximates d ~ eps / (10 b_vu); allow two ladder rungs of slack
    const double estimate = eps / (10.0 * b_vu);
    CHECK(std::abs(std::log10(r.value) - std::log10(estimate)) < 0.55);

    // the returned rung satisfies the rule and the next rung up violates it
    auto relative_change = [&](double d) {
        const DirectionSequence dirs =
            bound_vu(z_coefficients(toy.spec, toy.ctrl, toy.unc)).worst;
        return std::abs(perturbed_error(toy.spec, toy.ctrl, toy.unc, dirs, d) - eps) /
               std::max(eps, 1e-12);
    };
    CHECK(relative_change(r.value) < 0.1);
    if (r.value < 0.0999) CHECK(relative_change(r.value * std::pow(10.0, 0.25)) >= 0.1);
}

TEST_CASE("choose_step_size hits the floor for a controller at the optimum") {
    // near-exact pi pulse: eps ~ 1e-17, so every rung violates the relative rule
    const MonotoneToy toy = make_monotone_toy(1e-8);
    const StepSizeResult r = choose_step_size(toy.spec, toy.ctrl, toy.unc);
    CHECK(r.value == doctest::Approx(1e-6));
    CHECK(r.at_floor);
}

TEST_CASE("find_delta_bar trivial and error cases") {
    const MonotoneToy toy = make_monotone_toy();
    const double eps = fidelity(propagate(toy.spec, toy.ctrl), toy.spec.target).error;

    // threshold below the nominal error: immediately violating
    const DeltaSearchResult r = find_delta_bar(toy.spec, toy.ctrl, toy.unc, eps * 0.5, 0.01, 100);
    CHECK(r.delta_bar == 0.0);
    CHECK(r.n_bar == 0);
    CHECK(r.terminated == DeltaSearchResult::Termination::crossed);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].second >= r.threshold);

    CHECK_THROWS_AS(find_delta_bar(toy.spec, toy.ctrl, toy.unc, 0.1, 0.0, 100), argument_error);
    CHECK_THROWS_AS(find_delta_bar(toy.spec, toy.ctrl, toy.unc, 0.1, 0.01, 0), argument_error);
}

TEST_CASE("find_delta_bar agrees with a dense scan along the same path") {
    const MonotoneToy toy = make_monotone_toy();
    const double epsilon = 0.2;
    const double d = 5e-3;

    const DeltaSearchResult r = find_delta_bar(toy.spec, toy.ctrl, toy.unc, epsilon, d, 100000);
    REQUIRE(r.terminated == DeltaSearchResult::Termination::crossed);

    // single active slot: the worst direction is the sign of the Z row, and on
    // this toy the polygonal path is a fixed ray. Verify that, then scan it.
    const DirectionSequence dirs = bound_vu(z_coefficients(toy.spec, toy.ctrl, toy.unc)).worst;
    for (const auto& [delta, err] : r.trace) {
        const double on_ray = perturbed_error(toy.spec, toy.ctrl, toy.unc, dirs, delta);
        REQUIRE(err == doctest::Approx(on_ray).epsilon(1e-9));
    }

    const int points = 10000;
    const double span = r.delta_bar + 2.0 * d;
    double crossing = span;
    for (int i = 1; i <= points; ++i) {
        const double delta = span * i / points;
        if (perturbed_error(toy.spec, toy.ctrl, toy.unc, dirs, delta) >= epsilon) {
            crossing = delta;
            break;
        }
    }
    CHECK(std::abs(r.delta_bar - crossing) <= d + span / points);
}

TEST_CASE("find_delta_bar postconditions on the trace") {
    const MonotoneToy toy = make_monotone_toy();
    const double epsilon = 0.15;
    const double d = 0.01;
    const DeltaSearchResult r = find_delta_bar(toy.spec, toy.ctrl, toy.unc, epsilon, d, 10000);

    REQUIRE(r.terminated == DeltaSearchResult::Termination::crossed);
    CHECK(r.trace.size() == static_cast<std::size_t>(r.n_bar) + 1);
    CHECK(r.delta_bar == doctest::Approx(r.n_bar * d));
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        CHECK(r.trace[i].first == doctest::Approx((i + 1) * d).epsilon(1e-12));
        if (i + 1 < r.trace.size()) CHECK(r.trace[i].second < epsilon);
    }
    CHECK(r.trace.back().second >= epsilon);
}

TEST_CASE("halving the step never raises delta_bar by more than the coarse step") {
    const MonotoneToy toy = make_monotone_toy();
    const double epsilon = 0.15;
    const DeltaSearchResult coarse = find_delta_bar(toy.spec, toy.ctrl, toy.unc, epsilon, 0.01, 10000);
    const DeltaSearchResult fine = find_delta_bar(toy.spec, toy.ctrl, toy.unc, epsilon, 0.005, 10000);
    CHECK(fine.delta_bar <= coarse.delta_bar + 0.01 + 1e-12);
}

TEST_CASE("find_delta_bar reports a capped search") {
    const MonotoneToy toy = make_monotone_toy();
    const DeltaSearchResult r = find_delta_bar(toy.spec, toy.ctrl, toy.unc, 0.5, 1e-4, 5);
    CHECK(r.terminated == DeltaSearchResult::Termination::max_iterations);
    CHECK(r.n_bar == 5);
    CHECK(r.delta_bar == doctest::Approx(5e-4));
    CHECK(r.trace.size() == 5);
}

TEST_CASE("larger vu bound means faster first-step error growth") {
    // same problem instance, two controllers whose bounds are separated by
    // construction (the toy's sensitivity grows with the detuning)
    const MonotoneToy mild = make_monotone_toy(0.01);
    const MonotoneToy strong = make_monotone_toy(0.15);

    const double b_mild = bound_vu(z_coefficients(mild.spec, mild.ctrl, mild.unc)).bound;
    const double b_strong = bound_vu(z_coefficients(strong.spec, strong.ctrl, strong.unc)).bound;
    REQUIRE(b_strong > 2.0 * b_mild);

    const double d = 1e-5; // small enough for the linear term to dominate
    auto growth = [&](const MonotoneToy& toy) {
        const double eps0 = fidelity(propagate(toy.spec, toy.ctrl), toy.spec.target).error;
        const DirectionSequence dirs = bound_vu(z_coefficients(toy.spec, toy.ctrl, toy.unc)).worst;
        return perturbed_error(toy.spec, toy.ctrl, toy.unc, dirs, d) - eps0;
    };
    CHECK(growth(strong) > growth(mild));
}
