#pragma once

// Reference constructions used only by tests. They build operators with an
// explicit Kronecker product and diagonalize with LAPACK's zheev, sharing no
// code with the library paths they check.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat destroy(int n) {
    Mat a = Mat::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) a(k, k + 1) = std::sqrt(double(k + 1));
    return a;
}

// TLS basis (g, e).
inline Mat sx() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat sy() { Mat m(2, 2); m << 0, cplx(0, 1), cplx(0, -1), 0; return m; }
inline Mat sz() { Mat m(2, 2); m << -1, 0, 0, 1; return m; }
inline Mat sp() { Mat m(2, 2); m << 0, 0, 1, 0; return m; }
inline Mat sm() { Mat m(2, 2); m << 0, 1, 0, 0; return m; }

inline Mat dipole_qrm(int n, double eta, double wc = 1.0, double w0 = 1.0) {
    const Mat a = destroy(n);
    const Mat i2 = Mat::Identity(2, 2);
    const Mat in = Mat::Identity(n, n);
    return wc * kron(i2, a.adjoint() * a) + 0.5 * w0 * kron(sz(), in) +
           cplx(0, eta * w0) * kron(sx(), a.adjoint() - a);
}

/// Ascending eigenvalues of a Hermitian matrix via LAPACKE_zheev.
inline std::vector<double> eigvalsh(Mat m) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    std::vector<double> w(n);
    const lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'U', n, reinterpret_cast<lapack_complex_double*>(m.data()),
                                          n, w.data());
    if (info != 0) throw std::runtime_error("zheev failed");
    return w;
}

}  // namespace oracle
