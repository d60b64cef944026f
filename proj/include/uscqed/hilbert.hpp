#pragma once

#include <complex>

#include <Eigen/Dense>

namespace uscqed {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I{0.0, 1.0};

/// Truncated single-mode Fock space tensored with a two-level system.
///
/// Basis ordering: the TLS index is the slow index and the Fock index the fast
/// one, |s, n> -> s * n_fock + n, with s = 0 the ground state |g> and s = 1
/// the excited state |e>. Every operator in the library uses this layout.
struct SpaceDescriptor {
    int n_fock = 2;

    int dim() const noexcept { return 2 * n_fock; }
    int index(int tls, int n) const noexcept { return tls * n_fock + n; }

    friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;
};

SpaceDescriptor fock_space(int n_fock);

/// Dense complex operator on the composite space.
///
/// The Hermitian flag is advisory; validate() checks it against the entries.
class OperatorMatrix {
public:
    static constexpr double kHermitianTolerance = 1e-12;

    OperatorMatrix(SpaceDescriptor space, Matrix entries, bool hermitian = false);

    const SpaceDescriptor& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return entries_; }
    bool hermitian() const noexcept { return hermitian_; }
    int dim() const noexcept { return space_.dim(); }

    /// max |M - M^dagger| over all entries.
    double hermiticity_defect() const;
    /// Throws InvalidArgument if flagged Hermitian but the defect is >= 1e-12.
    void validate() const;

    OperatorMatrix adjoint() const;

    OperatorMatrix& operator+=(const OperatorMatrix& rhs);
    OperatorMatrix& operator-=(const OperatorMatrix& rhs);
    OperatorMatrix& operator*=(cplx scalar);

    friend OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs += rhs; }
    friend OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs -= rhs; }
    friend OperatorMatrix operator*(OperatorMatrix lhs, cplx s) { return lhs *= s; }
    friend OperatorMatrix operator*(cplx s, OperatorMatrix rhs) { return rhs *= s; }
    friend OperatorMatrix operator*(double s, OperatorMatrix rhs) { return rhs *= cplx(s, 0.0); }
    /// Operator product (never flagged Hermitian).
    friend OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

private:
    SpaceDescriptor space_;
    Matrix entries_;
    bool hermitian_;
};

enum class Pauli { x, y, z, plus, minus };

OperatorMatrix identity(const SpaceDescriptor& space);
OperatorMatrix annihilation(const SpaceDescriptor& space);
OperatorMatrix creation(const SpaceDescriptor& space);
OperatorMatrix number(const SpaceDescriptor& space);
OperatorMatrix pauli(const SpaceDescriptor& space, Pauli which);
/// Excitation-number parity exp(i pi (a^dagger a + sigma^+ sigma^-)).
OperatorMatrix parity(const SpaceDescriptor& space);

/// 2x2 matrix of a TLS operator in the (|g>, |e>) basis.
Eigen::Matrix2cd tls_matrix(Pauli which);

/// Photon operator B (n_fock x n_fock) -> 1_tls (x) B.
OperatorMatrix embed_photon(const SpaceDescriptor& space, const Matrix& photon_op, bool hermitian = false);
/// TLS operator A (2x2) -> A (x) 1_fock.
OperatorMatrix embed_tls(const SpaceDescriptor& space, const Eigen::Matrix2cd& tls_op, bool hermitian = false);
/// Reads B back out of an operator of the form 1_tls (x) B.
Matrix extract_photon(const OperatorMatrix& op);
/// Reads A back out of an operator of the form A (x) 1_fock.
Eigen::Matrix2cd extract_tls(const OperatorMatrix& op);

/// f(H) for Hermitian H via eigen-decomposition.
template <typename F>
Matrix hermitian_function(const Matrix& hermitian, F&& f);

/// Max entrywise |A - B|.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace uscqed

#include <Eigen/Eigenvalues>

#include "uscqed/errors.hpp"

namespace uscqed {

template <typename F>
Matrix hermitian_function(const Matrix& hermitian, F&& f) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw EigensolverFailure("hermitian_function: eigen-decomposition did not converge");
    }
    const Matrix& v = solver.eigenvectors();
    const RealVector& w = solver.eigenvalues();
    Vector fw(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        fw(i) = cplx(f(w(i)));
    }
    return v * fw.asDiagonal() * v.adjoint();
}

}  // namespace uscqed
