#include <doctest.h>

#include <cmath>

#include "qsens/problems.hpp"
#include "support/oracles.hpp"

using namespace qsens;

TEST_CASE("build_drift two-qubit fixtures") {
    const Mat zz = build_drift(2, CouplingKind::ising_zz);
    // (1/2) sz x sz = diag(0.5, -0.5, -0.5, 0.5)
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double want = (i == j) ? ((i == 0 || i == 3) ? 0.5 : -0.5) : 0.0;
            CHECK(zz(i, j) == cxd{want, 0.0});
        }

    const Mat xxx = build_drift(2, CouplingKind::heisenberg_xxx);
    CHECK(hermitian_defect(xxx) == 0.0);
    CHECK(std::abs(xxx.trace()) < 1e-14);
    Mat want = 0.5 * (matmul(pauli_embed(Axis::x, 1, 2), pauli_embed(Axis::x, 2, 2)) +
                      matmul(pauli_embed(Axis::y, 1, 2), pauli_embed(Axis::y, 2, 2)) +
                      matmul(pauli_embed(Axis::z, 1, 2), pauli_embed(Axis::z, 2, 2)));
    CHECK(max_abs_diff(xxx, want) < 1e-15);

    // Stark shift subtracts (1/2)(3 szI + 4 Isz) on two qubits
    const Mat stark = build_drift(2, CouplingKind::ising_zz_stark);
    Mat shift = zz;
    shift.add_scaled(-1.5, pauli_embed(Axis::z, 1, 2));
    shift.add_scaled(-2.0, pauli_embed(Axis::z, 2, 2));
    CHECK(max_abs_diff(stark, shift) == 0.0);

    CHECK_THROWS_AS(build_drift(1, CouplingKind::ising_zz), argument_error);
}

TEST_CASE("drift operators are Hermitian and traceless for all kinds") {
    for (auto kind :
         {CouplingKind::ising_zz, CouplingKind::heisenberg_xxx, CouplingKind::ising_zz_stark})
        for (int q = 2; q <= 4; ++q) {
            const Mat h = build_drift(q, kind);
            CHECK(hermitian_defect(h) < 1e-12);
            CHECK(std::abs(h.trace()) < 1e-12);
        }
}

TEST_CASE("two-qubit XXX drift commutes with swap") {
    const Mat h = build_drift(2, CouplingKind::heisenberg_xxx);
    Mat swap(4);
    swap(0, 0) = 1.0;
    swap(1, 2) = 1.0;
    swap(2, 1) = 1.0;
    swap(3, 3) = 1.0;
    CHECK(max_abs_diff(matmul(h, swap), matmul(swap, h)) < 1e-12);
}

TEST_CASE("build_controls layouts") {
    const auto ind = build_controls(2, ControlTopology::individual_qubit);
    REQUIRE(ind.size() == 4);
    CHECK(max_abs_diff(ind[0], 0.5 * kron(pauli(Axis::x), Mat::identity(2))) == 0.0);
    CHECK(max_abs_diff(ind[1], 0.5 * kron(pauli(Axis::y), Mat::identity(2))) == 0.0);
    CHECK(max_abs_diff(ind[2], 0.5 * kron(Mat::identity(2), pauli(Axis::x))) == 0.0);

    const auto first = build_controls(3, ControlTopology::first_qubit_only);
    REQUIRE(first.size() == 2);
    CHECK(max_abs_diff(first[0], 0.5 * pauli_embed(Axis::x, 1, 3)) == 0.0);
    CHECK(max_abs_diff(first[1], 0.5 * pauli_embed(Axis::y, 1, 3)) == 0.0);

    // global sums, verified against an explicit tensor-sum construction
    const auto glob = build_controls(5, ControlTopology::global_simultaneous);
    REQUIRE(glob.size() == 2);
    Mat sum_x(32), sum_y(32);
    for (int l = 1; l <= 5; ++l) {
        sum_x += pauli_embed(Axis::x, l, 5);
        sum_y += pauli_embed(Axis::y, l, 5);
    }
    CHECK(max_abs_diff(glob[0], 0.5 * sum_x) == 0.0);
    CHECK(max_abs_diff(glob[1], 0.5 * sum_y) == 0.0);
    CHECK(glob[0].fro_norm() == doctest::Approx(0.5 * std::sqrt(5.0 * 32.0)).epsilon(1e-14));
}

TEST_CASE("target gates") {
    // QFT(2) is the Hadamard
    const Mat h2 = build_target_qft(2);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(h2(0, 0) - cxd{r, 0.0}) < 1e-15);
    CHECK(std::abs(h2(0, 1) - cxd{r, 0.0}) < 1e-15);
    CHECK(std::abs(h2(1, 0) - cxd{r, 0.0}) < 1e-15);
    CHECK(std::abs(h2(1, 1) - cxd{-r, 0.0}) < 1e-15);
    CHECK(max_abs_diff(matmul(h2, h2), Mat::identity(2)) < 1e-15);

    // QFT(4) row j=1 is (1/2)[1, i, -1, -i]
    const Mat q4 = build_target_qft(4);
    CHECK(std::abs(q4(1, 0) - cxd{0.5, 0.0}) < 1e-15);
    CHECK(std::abs(q4(1, 1) - cxd{0.0, 0.5}) < 1e-15);
    CHECK(std::abs(q4(1, 2) - cxd{-0.5, 0.0}) < 1e-15);
    CHECK(std::abs(q4(1, 3) - cxd{0.0, -0.5}) < 1e-15);
    CHECK(unitarity_defect(q4) < 1e-15);

    const Mat cnot = build_target_cnot();
    CHECK(unitarity_defect(cnot) == 0.0);
    CHECK(max_abs_diff(matmul(cnot, cnot), Mat::identity(4)) == 0.0); // self-inverse
    CHECK(cnot(2, 3) == cxd{1.0, 0.0});                               // |10> <-> |11>
    CHECK(cnot(3, 2) == cxd{1.0, 0.0});
    CHECK(cnot(0, 0) == cxd{1.0, 0.0});
}

TEST_CASE("problem registry matches the benchmark table") {
    const auto& reg = problem_registry();
    REQUIRE(reg.size() == 9);

    struct Row {
        int id;
        CouplingKind coupling;
        int qubits;
        ControlTopology topo;
        TargetGate target;
        std::vector<double> tf;
        std::vector<int> kappa;
    };
    const std::vector<Row> want = {
        {1, CouplingKind::ising_zz, 2, ControlTopology::individual_qubit, TargetGate::cnot,
         {2, 3, 4}, {40, 64, 128}},
        {2, CouplingKind::ising_zz, 3, ControlTopology::individual_qubit, TargetGate::qft,
         {7, 8}, {40, 64}},
        {3, CouplingKind::ising_zz, 4, ControlTopology::individual_qubit, TargetGate::qft,
         {12, 15, 20}, {40, 64}},
        {4, CouplingKind::ising_zz, 5, ControlTopology::individual_qubit, TargetGate::qft,
         {12, 15, 25}, {64, 128}},
        {5, CouplingKind::heisenberg_xxx, 3, ControlTopology::individual_qubit, TargetGate::qft,
         {7, 8}, {40, 64}},
        {6, CouplingKind::heisenberg_xxx, 3, ControlTopology::individual_qubit,
         TargetGate::random_unitary, {7, 8}, {40, 64}},
        {7, CouplingKind::ising_zz_stark, 5, ControlTopology::global_simultaneous,
         TargetGate::qft, {125, 150}, {1000}},
        {8, CouplingKind::heisenberg_xxx, 3, ControlTopology::first_qubit_only, TargetGate::qft,
         {10, 15}, {32, 64}},
        {9, CouplingKind::heisenberg_xxx, 3, ControlTopology::first_qubit_only,
         TargetGate::random_unitary, {10, 15}, {32, 64}},
    };
    for (const Row& row : want) {
        const ProblemInfo& info = problem_info(row.id);
        CHECK(info.coupling == row.coupling);
        CHECK(info.qubits == row.qubits);
        CHECK(info.topology == row.topo);
        CHECK(info.target == row.target);
        CHECK(info.tf_options == row.tf);
        CHECK(info.kappa_options == row.kappa);
    }
    CHECK_THROWS_AS(problem_info(0), argument_error);
    CHECK_THROWS_AS(problem_info(10), argument_error);
}

TEST_CASE("make_problem materializes consistent specs") {
    for (int id = 1; id <= 9; ++id) {
        const ProblemSpec spec = make_problem(id);
        CHECK(spec.dim == (1 << spec.qubits));
        CHECK(hermitian_defect(spec.drift) < 1e-12);
        for (const Mat& c : spec.controls) CHECK(hermitian_defect(c) < 1e-12);
        CHECK(unitarity_defect(spec.target) < 1e-12);
        const auto& info = problem_info(id);
        const int want_m = info.topology == ControlTopology::individual_qubit ? 2 * spec.qubits : 2;
        CHECK(spec.num_controls() == want_m);
    }

    // problems 6 and 9 share the same random target
    CHECK(max_abs_diff(make_problem(6).target, make_problem(9).target) == 0.0);
}

TEST_CASE("admissibility checks") {
    const ProblemInfo& p1 = problem_info(1);
    CHECK(admissible_tf(p1, 3.0));
    CHECK(!admissible_tf(p1, 5.0));
    CHECK(admissible_kappa(p1, 64));
    CHECK(!admissible_kappa(p1, 65));
}
