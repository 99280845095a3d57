#pragma once

#include <complex>
#include <vector>

#include "qsens/errors.hpp"

namespace qsens {

using cxd = std::complex<double>;

// Dense square complex matrix, row-major. This is the working type for every
// operator in the library (Hamiltonians, propagators, targets); dimensions
// stay small (N <= 256), so everything is O(N^3)-friendly and by value.
class Mat {
public:
    Mat() = default;
    explicit Mat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

    static Mat identity(int n);

    int dim() const { return n_; }
    bool empty() const { return n_ == 0; }

    cxd& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const cxd& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    cxd* data() { return a_.data(); }
    const cxd* data() const { return a_.data(); }
    std::size_t size() const { return a_.size(); }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(cxd s);
    Mat& operator*=(double s);

    // this += alpha * x  (real alpha; runs on the daxpy kernel)
    Mat& add_scaled(double alpha, const Mat& x);

    Mat adjoint() const;
    cxd trace() const;
    double fro_norm() const;
    double one_norm() const;  // max column sum of |a_ij|
    double max_abs() const;
    bool all_finite() const;

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    int n_ = 0;
    std::vector<cxd> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(cxd s, Mat a);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b); // kernel-dispatched product

Mat matmul(const Mat& a, const Mat& b);

// Tr[A B] without forming the product
cxd trace_prod(const Mat& a, const Mat& b);

Mat kron(const Mat& a, const Mat& b);

// max |A - A^dag| and max |U^dag U - I|
double hermitian_defect(const Mat& a);
double unitarity_defect(const Mat& u);

double max_abs_diff(const Mat& a, const Mat& b);

// throws contract_error when the defect exceeds tol
void require_hermitian(const Mat& a, double tol, const char* what);

} // namespace qsens
