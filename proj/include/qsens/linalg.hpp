#pragma once

#include <cstdint>
#include <vector>

#include "qsens/matrix.hpp"

namespace qsens {

// ---- Hermitian eigendecomposition ------------------------------------------

// A = vectors * diag(values) * vectors^dag, eigenvalues ascending.
struct EigH {
    std::vector<double> values;
    Mat vectors;
};

// Cyclic complex Jacobi. Quadratically convergent and gives machine-precision
// orthogonality, which the unitarity contracts downstream rely on.
EigH eig_hermitian(const Mat& a);

// ---- Matrix exponentials ----------------------------------------------------

// exp(A) for a general complex matrix: Pade-13 with scaling and squaring.
Mat expm(const Mat& a);

// exp(-i H dt) through the eigendecomposition of Hermitian H.
// Throws contract_error when H fails the 1e-12 Hermiticity check.
Mat expm_step(const Mat& h, double dt);

// Directional (Frechet) derivative of the step propagator:
//   X = -i * scale * \int_0^dt exp(-iH(dt-s)) Hhat exp(-iHs) ds,
// i.e. d/dd exp(-i(H + d*scale*Hhat)dt) at d = 0. Computed by exponentiating
// the block-triangular matrix [[-iH dt, -i scale Hhat dt], [0, -iH dt]] and
// reading the top-right block, which is exact up to the expm itself.
Mat frechet_step(const Mat& h, const Mat& hhat, double scale, double dt);

// ---- Constructions ----------------------------------------------------------

enum class Axis { x, y, z };

Mat pauli(Axis axis); // 2x2 sigma_{x,y,z}

// Q-fold tensor product of I_2 with sigma_axis in the given position
// (site is 1-based, site 1 = leftmost factor / most significant bit).
Mat pauli_embed(Axis axis, int site, int qubits);

// Haar-distributed random unitary: complex Ginibre sample, Householder QR,
// then the R-diagonal phase correction that makes the factorization unique.
// Deterministic for a fixed seed (see Rng for the stream guarantees).
Mat haar_unitary(int n, std::uint64_t seed);

// ---- Solves ------------------------------------------------------------------

// X with A X = B via LU with partial pivoting (used inside expm).
Mat lu_solve(Mat a, Mat b);

} // namespace qsens
