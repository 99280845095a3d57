#include "qsens/matrix.hpp"

#include <cmath>
#include <string>

#include "qsens/kernels.hpp"

namespace qsens {

Mat Mat::identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    if (o.n_ != n_) throw argument_error("matrix dimension mismatch in +=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (o.n_ != n_) throw argument_error("matrix dimension mismatch in -=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Mat& Mat::operator*=(cxd s) {
    for (auto& v : a_) v *= s;
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (auto& v : a_) v *= s;
    return *this;
}

Mat& Mat::add_scaled(double alpha, const Mat& x) {
    if (x.n_ != n_) throw argument_error("matrix dimension mismatch in add_scaled");
    kernels::daxpy(alpha, reinterpret_cast<const double*>(x.a_.data()),
                   reinterpret_cast<double*>(a_.data()), 2 * a_.size());
    return *this;
}

Mat Mat::adjoint() const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

cxd Mat::trace() const {
    cxd t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Mat::fro_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double Mat::one_norm() const {
    double best = 0.0;
    for (int j = 0; j < n_; ++j) {
        double col = 0.0;
        for (int i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
        if (col > best) best = col;
    }
    return best;
}

double Mat::max_abs() const {
    double best = 0.0;
    for (const auto& v : a_) best = std::max(best, std::abs(v));
    return best;
}

bool Mat::all_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(cxd s, Mat a) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat matmul(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw argument_error("matrix dimension mismatch in matmul");
    Mat c(a.dim());
    kernels::cgemm(a.data(), b.data(), c.data(), a.dim());
    return c;
}

Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }

cxd trace_prod(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw argument_error("matrix dimension mismatch in trace_prod");
    const int n = a.dim();
    cxd t = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    return t;
}

Mat kron(const Mat& a, const Mat& b) {
    const int na = a.dim(), nb = b.dim();
    Mat r(na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            const cxd aij = a(i, j);
            if (aij == cxd{0.0, 0.0}) continue;
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l) r(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return r;
}

double hermitian_defect(const Mat& a) {
    double worst = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst;
}

double unitarity_defect(const Mat& u) {
    Mat g = matmul(u.adjoint(), u);
    const int n = g.dim();
    for (int i = 0; i < n; ++i) g(i, i) -= 1.0;
    return g.max_abs();
}

double max_abs_diff(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) throw argument_error("matrix dimension mismatch in max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

void require_hermitian(const Mat& a, double tol, const char* what) {
    const double d = hermitian_defect(a);
    if (!(d < tol))
        throw contract_error(std::string(what) + ": operator is not Hermitian (defect " +
                             std::to_string(d) + ")");
}

} // namespace qsens
