#include "qsens/problems.hpp"

#include <cmath>

namespace qsens {

Mat build_drift(int qubits, CouplingKind kind) {
    if (qubits < 2) throw argument_error("build_drift: need at least two qubits");
    double ax = 0.0, bz = 1.0;
    if (kind == CouplingKind::heisenberg_xxx) ax = 1.0;

    const int n = 1 << qubits;
    Mat h(n);
    for (int l = 1; l < qubits; ++l) {
        if (ax != 0.0) {
            h.add_scaled(0.5 * ax, matmul(pauli_embed(Axis::x, l, qubits), pauli_embed(Axis::x, l + 1, qubits)));
            h.add_scaled(0.5 * ax, matmul(pauli_embed(Axis::y, l, qubits), pauli_embed(Axis::y, l + 1, qubits)));
        }
        h.add_scaled(0.5 * bz, matmul(pauli_embed(Axis::z, l, qubits), pauli_embed(Axis::z, l + 1, qubits)));
    }
    if (kind == CouplingKind::ising_zz_stark) {
        for (int l = 1; l <= qubits; ++l)
            h.add_scaled(-0.5 * (l + 2), pauli_embed(Axis::z, l, qubits));
    }
    return h;
}

std::vector<Mat> build_controls(int qubits, ControlTopology topo) {
    if (qubits < 1) throw argument_error("build_controls: need at least one qubit");
    std::vector<Mat> out;
    switch (topo) {
    case ControlTopology::individual_qubit:
        out.reserve(2 * qubits);
        for (int l = 1; l <= qubits; ++l) {
            out.push_back(0.5 * pauli_embed(Axis::x, l, qubits));
            out.push_back(0.5 * pauli_embed(Axis::y, l, qubits));
        }
        break;
    case ControlTopology::global_simultaneous: {
        Mat hx(1 << qubits), hy(1 << qubits);
        for (int l = 1; l <= qubits; ++l) {
            hx.add_scaled(0.5, pauli_embed(Axis::x, l, qubits));
            hy.add_scaled(0.5, pauli_embed(Axis::y, l, qubits));
        }
        out.push_back(std::move(hx));
        out.push_back(std::move(hy));
        break;
    }
    case ControlTopology::first_qubit_only:
        out.push_back(0.5 * pauli_embed(Axis::x, 1, qubits));
        out.push_back(0.5 * pauli_embed(Axis::y, 1, qubits));
        break;
    }
    return out;
}

Mat build_target_cnot() {
    Mat u(4);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    u(2, 3) = 1.0;
    u(3, 2) = 1.0;
    return u;
}

Mat build_target_qft(int dim) {
    if (dim < 1) throw argument_error("build_target_qft: dimension must be positive");
    Mat u(dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    const double w = 2.0 * 3.14159265358979323846 / dim;
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
            // w^{jk} evaluated with the exponent reduced mod N to keep phases exact-ish
            const long long e = static_cast<long long>(j) * k % dim;
            u(j, k) = scale * cxd(std::cos(w * e), std::sin(w * e));
        }
    return u;
}

Mat build_target_random(int dim, std::uint64_t seed) { return haar_unitary(dim, seed); }

const std::vector<ProblemInfo>& problem_registry() {
    static const std::vector<ProblemInfo> rows = {
        {1, "Ising ZZ 2-qubits, individual qubit addressability, CNOT",
         CouplingKind::ising_zz, 2, ControlTopology::individual_qubit, TargetGate::cnot,
         {2, 3, 4}, {40, 64, 128}},
        {2, "Ising ZZ 3-qubits, individual qubit addressability, QFT",
         CouplingKind::ising_zz, 3, ControlTopology::individual_qubit, TargetGate::qft,
         {7, 8}, {40, 64}},
        {3, "Ising ZZ 4-qubits, individual qubit addressability, QFT",
         CouplingKind::ising_zz, 4, ControlTopology::individual_qubit, TargetGate::qft,
         {12, 15, 20}, {40, 64}},
        {4, "Ising ZZ 5-qubits, individual qubit addressability, QFT",
         CouplingKind::ising_zz, 5, ControlTopology::individual_qubit, TargetGate::qft,
         {12, 15, 25}, {64, 128}},
        {5, "Heisenberg XXX 3-qubits, individual qubit addressability, QFT",
         CouplingKind::heisenberg_xxx, 3, ControlTopology::individual_qubit, TargetGate::qft,
         {7, 8}, {40, 64}},
        {6, "Heisenberg XXX 3-qubits, individual qubit addressability, random unitary",
         CouplingKind::heisenberg_xxx, 3, ControlTopology::individual_qubit, TargetGate::random_unitary,
         {7, 8}, {40, 64}},
        {7, "Ising ZZ 5-qubits with Stark shift, simultaneous control on all qubits, QFT",
         CouplingKind::ising_zz_stark, 5, ControlTopology::global_simultaneous, TargetGate::qft,
         {125, 150}, {1000}},
        {8, "Heisenberg XXX 3-qubits, initial qubit control only, QFT",
         CouplingKind::heisenberg_xxx, 3, ControlTopology::first_qubit_only, TargetGate::qft,
         {10, 15}, {32, 64}},
        {9, "Heisenberg XXX 3-qubits, initial qubit control only, random unitary",
         CouplingKind::heisenberg_xxx, 3, ControlTopology::first_qubit_only, TargetGate::random_unitary,
         {10, 15}, {32, 64}},
    };
    return rows;
}

const ProblemInfo& problem_info(int id) {
    const auto& rows = problem_registry();
    if (id < 1 || id > static_cast<int>(rows.size()))
        throw argument_error("unknown problem id " + std::to_string(id));
    return rows[id - 1];
}

ProblemSpec make_problem(int id) {
    const ProblemInfo& info = problem_info(id);
    ProblemSpec spec;
    spec.label = info.id;
    spec.qubits = info.qubits;
    spec.dim = 1 << info.qubits;
    spec.drift = build_drift(info.qubits, info.coupling);
    spec.controls = build_controls(info.qubits, info.topology);
    switch (info.target) {
    case TargetGate::cnot:
        spec.target = build_target_cnot();
        break;
    case TargetGate::qft:
        spec.target = build_target_qft(spec.dim);
        break;
    case TargetGate::random_unitary:
        // problems 6 and 9 share this matrix by construction
        spec.target = build_target_random(spec.dim, kRandomTargetSeed);
        break;
    }
    return spec;
}

bool admissible_tf(const ProblemInfo& info, double tf) {
    for (double t : info.tf_options)
        if (t == tf) return true;
    return false;
}

bool admissible_kappa(const ProblemInfo& info, int kappa) {
    for (int k : info.kappa_options)
        if (k == kappa) return true;
    return false;
}

} // namespace qsens
