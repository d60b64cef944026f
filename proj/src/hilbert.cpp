#include "uscqed/hilbert.hpp"

#include <cmath>
#include <string>

namespace uscqed {

SpaceDescriptor fock_space(int n_fock) {
    if (n_fock < 2) {
        throw InvalidArgument("fock_space: n_fock must be >= 2, got " + std::to_string(n_fock));
    }
    return SpaceDescriptor{n_fock};
}

OperatorMatrix::OperatorMatrix(SpaceDescriptor space, Matrix entries, bool hermitian)
    : space_(space), entries_(std::move(entries)), hermitian_(hermitian) {
    if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim()) {
        throw DimensionMismatch("OperatorMatrix: expected " + std::to_string(space_.dim()) + "x" +
                                std::to_string(space_.dim()) + ", got " + std::to_string(entries_.rows()) +
                                "x" + std::to_string(entries_.cols()));
    }
}

double OperatorMatrix::hermiticity_defect() const { return max_abs_diff(entries_, entries_.adjoint()); }

void OperatorMatrix::validate() const {
    if (!hermitian_) return;
    const double defect = hermiticity_defect();
    if (defect >= kHermitianTolerance) {
        throw InvalidArgument("OperatorMatrix flagged Hermitian has defect " + std::to_string(defect));
    }
}

OperatorMatrix OperatorMatrix::adjoint() const { return {space_, entries_.adjoint(), hermitian_}; }

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
    if (!(rhs.space_ == space_)) throw DimensionMismatch("OperatorMatrix +=: spaces differ");
    entries_ += rhs.entries_;
    hermitian_ = hermitian_ && rhs.hermitian_;
    return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
    if (!(rhs.space_ == space_)) throw DimensionMismatch("OperatorMatrix -=: spaces differ");
    entries_ -= rhs.entries_;
    hermitian_ = hermitian_ && rhs.hermitian_;
    return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx scalar) {
    entries_ *= scalar;
    hermitian_ = hermitian_ && scalar.imag() == 0.0;
    return *this;
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    if (!(lhs.space_ == rhs.space_)) throw DimensionMismatch("OperatorMatrix *: spaces differ");
    return {lhs.space_, lhs.entries_ * rhs.entries_, false};
}

Eigen::Matrix2cd tls_matrix(Pauli which) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (which) {
        case Pauli::x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case Pauli::y:
            // sigma_y = -i|e><g| + i|g><e| with (g, e) ordering
            m(0, 1) = I;
            m(1, 0) = -I;
            break;
        case Pauli::z:
            m(0, 0) = -1.0;
            m(1, 1) = 1.0;
            break;
        case Pauli::plus:
            m(1, 0) = 1.0;
            break;
        case Pauli::minus:
            m(0, 1) = 1.0;
            break;
    }
    return m;
}

OperatorMatrix embed_photon(const SpaceDescriptor& space, const Matrix& photon_op, bool hermitian) {
    const int n = space.n_fock;
    if (photon_op.rows() != n || photon_op.cols() != n) {
        throw DimensionMismatch("embed_photon: operator is not n_fock x n_fock");
    }
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    m.topLeftCorner(n, n) = photon_op;
    m.bottomRightCorner(n, n) = photon_op;
    return {space, std::move(m), hermitian};
}

OperatorMatrix embed_tls(const SpaceDescriptor& space, const Eigen::Matrix2cd& tls_op, bool hermitian) {
    const int n = space.n_fock;
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) {
            if (tls_op(s, t) == cplx(0.0)) continue;
            m.block(s * n, t * n, n, n).diagonal().setConstant(tls_op(s, t));
        }
    }
    return {space, std::move(m), hermitian};
}

Matrix extract_photon(const OperatorMatrix& op) {
    const int n = op.space().n_fock;
    return op.matrix().topLeftCorner(n, n);
}

Eigen::Matrix2cd extract_tls(const OperatorMatrix& op) {
    const int n = op.space().n_fock;
    Eigen::Matrix2cd out;
    for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) out(s, t) = op.matrix()(s * n, t * n);
    }
    return out;
}

OperatorMatrix identity(const SpaceDescriptor& space) {
    return {space, Matrix::Identity(space.dim(), space.dim()), true};
}

OperatorMatrix annihilation(const SpaceDescriptor& space) {
    const int n = space.n_fock;
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return embed_photon(space, a);
}

OperatorMatrix creation(const SpaceDescriptor& space) { return annihilation(space).adjoint(); }

OperatorMatrix number(const SpaceDescriptor& space) {
    const int n = space.n_fock;
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
    return embed_photon(space, m, true);
}

OperatorMatrix pauli(const SpaceDescriptor& space, Pauli which) {
    const bool herm = which == Pauli::x || which == Pauli::y || which == Pauli::z;
    return embed_tls(space, tls_matrix(which), herm);
}

OperatorMatrix parity(const SpaceDescriptor& space) {
    Matrix m = Matrix::Zero(space.dim(), space.dim());
    for (int s = 0; s < 2; ++s) {
        for (int k = 0; k < space.n_fock; ++k) {
            m(space.index(s, k), space.index(s, k)) = ((s + k) % 2 == 0) ? 1.0 : -1.0;
        }
    }
    return {space, std::move(m), true};
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("max_abs_diff: shapes differ");
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace uscqed
