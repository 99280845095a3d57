#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsens/linalg.hpp"
#include "qsens/matrix.hpp"

namespace qsens {

// Nearest-neighbour coupling of the qubit register. The pair (alpha, beta)
// weights the xx+yy and zz terms; the Stark variant adds the position-
// dependent on-site shift -(1/2) sum_l (l+2) sigma_z^(l).
enum class CouplingKind { ising_zz, heisenberg_xxx, ising_zz_stark };

// Which qubits the external fields address.
enum class ControlTopology { individual_qubit, global_simultaneous, first_qubit_only };

enum class TargetGate { cnot, qft, random_unitary };

// One gate-synthesis problem instance: drift, control set, target.
struct ProblemSpec {
    int label = 0;
    int qubits = 0;
    int dim = 0; // 2^qubits
    Mat drift;
    std::vector<Mat> controls;
    Mat target;

    int num_controls() const { return static_cast<int>(controls.size()); }
};

// Seed for the Haar-random target shared by problems 6 and 9. The value is an
// arbitrary fixed constant; what matters is that both problems use the same
// matrix and that runs reproduce it.
inline constexpr std::uint64_t kRandomTargetSeed = 271828;

// (1/2) sum_{l<Q} (alpha xx + alpha yy + beta zz) with (alpha, beta) per kind;
// the Stark kind subtracts (1/2) sum_l (l+2) sigma_z^(l). Requires Q >= 2.
Mat build_drift(int qubits, CouplingKind kind);

// individual_qubit: [sx^(1)/2, sy^(1)/2, ..., sx^(Q)/2, sy^(Q)/2]
// global_simultaneous: [(1/2) sum_l sx^(l), (1/2) sum_l sy^(l)]
// first_qubit_only: [sx^(1)/2, sy^(1)/2]
std::vector<Mat> build_controls(int qubits, ControlTopology topo);

// CNOT with qubit 1 as control and qubit 2 as target (basis |q1 q2>).
Mat build_target_cnot();

// QFT_{jk} = w^{jk} / sqrt(N), w = exp(2 pi i / N), j,k = 0..N-1.
Mat build_target_qft(int dim);

Mat build_target_random(int dim, std::uint64_t seed);

// One catalog row: enough to build the ProblemSpec on demand plus the
// admissible gate times and step counts.
struct ProblemInfo {
    int id;
    std::string description;
    CouplingKind coupling;
    int qubits;
    ControlTopology topology;
    TargetGate target;
    std::vector<double> tf_options;
    std::vector<int> kappa_options;
};

// The nine benchmark problems, ids 1..9.
const std::vector<ProblemInfo>& problem_registry();

const ProblemInfo& problem_info(int id); // throws argument_error for unknown id

// Materialize drift/controls/target for a catalog entry.
ProblemSpec make_problem(int id);

bool admissible_tf(const ProblemInfo& info, double tf);
bool admissible_kappa(const ProblemInfo& info, int kappa);

} // namespace qsens
