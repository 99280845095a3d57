#include "qsens/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsens/rng.hpp"

namespace qsens {

namespace {

constexpr cxd kI{0.0, 1.0};

double off_diagonal_sq(const Mat& a) {
    double s = 0.0;
    const int n = a.dim();
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return 2.0 * s;
}

} // namespace

EigH eig_hermitian(const Mat& a0) {
    require_hermitian(a0, 1e-12, "eig_hermitian");
    const int n = a0.dim();
    Mat a = a0;
    Mat v = Mat::identity(n);

    // One rotation J in the (p,q) plane: with alpha = a_pq = |alpha| w and
    // tau = (a_pp - a_qq)/(2 |alpha|), t = sgn(tau)/(|tau| + sqrt(tau^2+1))
    // solves t^2 + 2 tau t - 1 = 0, and sigma = t c w zeroes the (p,q) entry.
    const double fro = a.fro_norm();
    const double stop = std::max(1e-300, 1e-30 * fro * fro);
    for (int sweep = 0; sweep < 60 && off_diagonal_sq(a) > stop; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cxd alpha = a(p, q);
                const double aa = std::abs(alpha);
                if (aa <= 1e-300) continue;
                const cxd w = alpha / aa;
                const double tau = (std::real(a(p, p)) - std::real(a(q, q))) / (2.0 * aa);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const cxd sigma = t * c * w;
                const cxd sbar = std::conj(sigma);
                // columns p,q of A and V:  col_p' = c col_p + sbar col_q, col_q' = -sigma col_p + c col_q
                for (int i = 0; i < n; ++i) {
                    const cxd aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + sbar * aiq;
                    a(i, q) = -sigma * aip + c * aiq;
                    const cxd vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + sbar * viq;
                    v(i, q) = -sigma * vip + c * viq;
                }
                // rows p,q of A:  row_p' = c row_p + sigma row_q, row_q' = -sbar row_p + c row_q
                for (int j = 0; j < n; ++j) {
                    const cxd apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + sigma * aqj;
                    a(q, j) = -sbar * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = std::real(a(p, p));
                a(q, q) = std::real(a(q, q));
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return std::real(a(i, i)) < std::real(a(j, j)); });

    EigH out;
    out.values.resize(n);
    out.vectors = Mat(n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = std::real(a(order[j], order[j]));
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// ---- LU ----------------------------------------------------------------------

Mat lu_solve(Mat a, Mat b) {
    const int n = a.dim();
    if (b.dim() != n) throw argument_error("lu_solve dimension mismatch");
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int pk = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = std::abs(a(i, k));
            if (m > best) {
                best = m;
                pk = i;
            }
        }
        if (best == 0.0) throw contract_error("lu_solve: singular matrix");
        piv[k] = pk;
        if (pk != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pk, j));
        const cxd inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cxd l = a(i, k) * inv;
            a(i, k) = l;
            for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    // forward/back substitution on the columns of b
    for (int k = 0; k < n; ++k)
        if (piv[k] != k)
            for (int j = 0; j < n; ++j) std::swap(b(k, j), b(piv[k], j));
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) {
            const cxd l = a(i, k);
            if (l == cxd{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) b(i, j) -= l * b(k, j);
        }
    for (int k = n - 1; k >= 0; --k) {
        const cxd inv = 1.0 / a(k, k);
        for (int j = 0; j < n; ++j) b(k, j) *= inv;
        for (int i = 0; i < k; ++i) {
            const cxd u = a(i, k);
            if (u == cxd{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) b(i, j) -= u * b(k, j);
        }
    }
    return b;
}

// ---- expm --------------------------------------------------------------------

Mat expm(const Mat& a0) {
    // Pade order 13 with scaling and squaring (Higham 2005).
    static const double kB[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                  1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                  670442572800.0,      33522128640.0,       1323241920.0,
                                  40840800.0,          960960.0,            16380.0,
                                  182.0,               1.0};
    constexpr double kTheta13 = 5.371920351148152;

    const int n = a0.dim();
    Mat a = a0;
    const double nrm = a.one_norm();
    int s = 0;
    if (nrm > kTheta13) {
        s = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
        a *= std::ldexp(1.0, -s);
    }

    const Mat id = Mat::identity(n);
    const Mat a2 = matmul(a, a);
    const Mat a4 = matmul(a2, a2);
    const Mat a6 = matmul(a2, a4);

    Mat w = kB[13] * a6 + kB[11] * a4 + kB[9] * a2;
    w = matmul(a6, w);
    w += kB[7] * a6 + kB[5] * a4 + kB[3] * a2 + kB[1] * id;
    const Mat u = matmul(a, w);

    Mat z = kB[12] * a6 + kB[10] * a4 + kB[8] * a2;
    z = matmul(a6, z);
    z += kB[6] * a6 + kB[4] * a4 + kB[2] * a2 + kB[0] * id;

    Mat r = lu_solve(z - u, z + u);
    for (int i = 0; i < s; ++i) r = matmul(r, r);
    return r;
}

Mat expm_step(const Mat& h, double dt) {
    require_hermitian(h, 1e-12, "expm_step");
    if (!std::isfinite(dt)) throw argument_error("expm_step: dt must be finite");
    const EigH eig = eig_hermitian(h);
    const int n = h.dim();
    // V e^{-i lambda dt} V^dag
    Mat scaled = eig.vectors;
    for (int j = 0; j < n; ++j) {
        const cxd phase = std::exp(-kI * eig.values[j] * dt);
        for (int i = 0; i < n; ++i) scaled(i, j) *= phase;
    }
    return matmul(scaled, eig.vectors.adjoint());
}

Mat frechet_step(const Mat& h, const Mat& hhat, double scale, double dt) {
    require_hermitian(h, 1e-12, "frechet_step");
    require_hermitian(hhat, 1e-12, "frechet_step direction");
    const int n = h.dim();
    if (hhat.dim() != n) throw argument_error("frechet_step dimension mismatch");
    if (scale == 0.0) return Mat(n);

    Mat block(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cxd d = -kI * dt * h(i, j);
            block(i, j) = d;
            block(n + i, n + j) = d;
            block(i, n + j) = -kI * dt * scale * hhat(i, j);
        }
    const Mat e = expm(block);
    Mat x(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = e(i, n + j);
    return x;
}

// ---- Pauli operators -----------------------------------------------------------

Mat pauli(Axis axis) {
    Mat s(2);
    switch (axis) {
    case Axis::x:
        s(0, 1) = 1.0;
        s(1, 0) = 1.0;
        break;
    case Axis::y:
        s(0, 1) = -kI;
        s(1, 0) = kI;
        break;
    case Axis::z:
        s(0, 0) = 1.0;
        s(1, 1) = -1.0;
        break;
    }
    return s;
}

Mat pauli_embed(Axis axis, int site, int qubits) {
    if (qubits < 1) throw argument_error("pauli_embed: qubit count must be positive");
    if (site < 1 || site > qubits) throw argument_error("pauli_embed: site out of range");
    const Mat s = pauli(axis);
    Mat out = (site == 1) ? s : Mat::identity(1 << (site - 1));
    if (site != 1) out = kron(out, s);
    const int right = qubits - site;
    if (right > 0) out = kron(out, Mat::identity(1 << right));
    return out;
}

// ---- Haar sampling --------------------------------------------------------------

Mat haar_unitary(int n, std::uint64_t seed) {
    if (n < 1) throw argument_error("haar_unitary: dimension must be positive");
    Rng rng(seed);
    Mat g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = cxd(rng.gaussian(), rng.gaussian()) * 0.7071067811865475244;

    // Householder QR, accumulating Q explicitly.
    Mat r = g;
    Mat q = Mat::identity(n);
    std::vector<cxd> v(n);
    for (int k = 0; k < n - 1; ++k) {
        double colnorm = 0.0;
        for (int i = k; i < n; ++i) colnorm += std::norm(r(i, k));
        colnorm = std::sqrt(colnorm);
        if (colnorm == 0.0) continue;
        const cxd x0 = r(k, k);
        const cxd phase = (std::abs(x0) == 0.0) ? cxd{1.0, 0.0} : x0 / std::abs(x0);
        for (int i = k; i < n; ++i) v[i] = r(i, k);
        v[k] += phase * colnorm;
        double vsq = 0.0;
        for (int i = k; i < n; ++i) vsq += std::norm(v[i]);
        if (vsq == 0.0) continue;
        const double tau = 2.0 / vsq;
        // r <- (I - tau v v^dag) r ; q <- q (I - tau v v^dag)
        for (int j = k; j < n; ++j) {
            cxd dot = 0.0;
            for (int i = k; i < n; ++i) dot += std::conj(v[i]) * r(i, j);
            dot *= tau;
            for (int i = k; i < n; ++i) r(i, j) -= dot * v[i];
        }
        for (int i = 0; i < n; ++i) {
            cxd dot = 0.0;
            for (int j = k; j < n; ++j) dot += q(i, j) * v[j];
            dot *= tau;
            for (int j = k; j < n; ++j) q(i, j) -= dot * std::conj(v[j]);
        }
    }

    // phase normalization Lambda = diag(r_jj / |r_jj|) makes the sample Haar
    for (int j = 0; j < n; ++j) {
        const cxd rjj = r(j, j);
        const cxd lam = (std::abs(rjj) == 0.0) ? cxd{1.0, 0.0} : rjj / std::abs(rjj);
        for (int i = 0; i < n; ++i) q(i, j) *= lam;
    }
    return q;
}

} // namespace qsens
