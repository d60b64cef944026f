#include "uscqed/dressing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace uscqed {

namespace {

void fix_phase(Eigen::Ref<Vector> v) {
    const RealVector mag = v.cwiseAbs();
    const double peak = mag.maxCoeff();
    Eigen::Index idx = 0;
    while (mag(idx) < peak * (1.0 - 1e-8)) ++idx;
    const cplx c = v(idx);
    v *= std::conj(c) / std::abs(c);
    v(idx) = cplx(v(idx).real(), 0.0);
}

// Rotates the columns of `block` (an orthonormal basis of a degenerate
// eigenspace) into a canonical orthonormal basis that depends only on the
// spanned subspace.
void canonicalize_cluster(Eigen::Ref<Matrix> block) {
    const Eigen::Index m = block.cols();
    const Eigen::Index n = block.rows();
    Matrix r = block.transpose();  // m x n, rows span the subspace
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < n && row < m; ++col) {
        Eigen::Index best = row;
        double best_mag = 0.0;
        for (Eigen::Index i = row; i < m; ++i) {
            if (std::abs(r(i, col)) > best_mag) {
                best_mag = std::abs(r(i, col));
                best = i;
            }
        }
        if (best_mag < 1e-6) continue;
        r.row(row).swap(r.row(best));
        r.row(row) /= r(row, col);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i != row) r.row(i) -= r(i, col) * r.row(row);
        }
        ++row;
    }
    if (row < m) return;  // rank-deficient to this tolerance; keep solver output
    Matrix q = r.transpose();
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        q.col(j).normalize();
    }
    block = q;
}

}  // namespace

DressedBasis diagonalize(const OperatorMatrix& H, int n_keep) {
    const int dim = H.dim();
    if (n_keep < 1 || n_keep > dim) {
        throw InvalidArgument("diagonalize: n_keep must be in [1, " + std::to_string(dim) + "], got " +
                              std::to_string(n_keep));
    }
    const double defect = H.hermiticity_defect();
    if (defect >= OperatorMatrix::kHermitianTolerance * std::max(1.0, H.matrix().cwiseAbs().maxCoeff())) {
        throw InvalidArgument("diagonalize: Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(H.matrix());
    if (solver.info() != Eigen::Success) {
        throw EigensolverFailure("diagonalize: self-adjoint eigensolver did not converge");
    }

    DressedBasis out;
    out.space = H.space();
    out.n_keep = n_keep;
    out.states = solver.eigenvectors();
    RealVector e = solver.eigenvalues();

    for (int start = 0; start < dim;) {
        int end = start + 1;
        while (end < dim && e(end) - e(end - 1) < kDegeneracyTolerance) ++end;
        if (end - start > 1) canonicalize_cluster(out.states.middleCols(start, end - start));
        start = end;
    }
    for (int j = 0; j < dim; ++j) fix_phase(out.states.col(j));

    out.ground_energy = e(0);
    out.energies = e.array() - e(0);
    return out;
}

JumpOperator JumpOperator::conjugate() const {
    return {matrix.adjoint(), direction == JumpDirection::lowering ? JumpDirection::raising : JumpDirection::lowering};
}

Matrix dressed_matrix_elements(const DressedBasis& basis, const OperatorMatrix& pi) {
    if (!(pi.space() == basis.space)) {
        throw DimensionMismatch("dressed_matrix_elements: operator and basis live on different spaces");
    }
    const Matrix v = basis.kept_states();
    Matrix c = v.adjoint() * pi.matrix() * v;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        for (Eigen::Index k = 0; k < c.cols(); ++k) {
            if (j == k || std::abs(c(j, k)) < kParityCleanup) c(j, k) = 0.0;
        }
    }
    return c;
}

JumpOperator jump_operator(const DressedBasis& basis, const OperatorMatrix& pi) {
    const Matrix c = dressed_matrix_elements(basis, pi);
    return {c.triangularView<Eigen::StrictlyUpper>().toDenseMatrix(), JumpDirection::lowering};
}

std::vector<FrequencyComponent> frequency_resolved_jumps(const DressedBasis& basis, const OperatorMatrix& pi) {
    const Matrix c = dressed_matrix_elements(basis, pi);
    const int n = basis.n_keep;
    std::vector<std::tuple<double, int, int>> transitions;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            if (c(j, k) != cplx(0.0)) transitions.emplace_back(basis.energies(k) - basis.energies(j), j, k);
        }
    }
    std::sort(transitions.begin(), transitions.end());

    std::vector<FrequencyComponent> out;
    double bin_start = 0.0;
    for (const auto& [w, j, k] : transitions) {
        if (out.empty() || w - bin_start > kFrequencyBinTolerance) {
            out.push_back({w, Matrix::Zero(n, n)});
            bin_start = w;
        }
        out.back().xplus(j, k) = c(j, k);
    }
    return out;
}

RealMatrix transition_strengths(const DressedBasis& basis, const OperatorMatrix& pi) {
    const Matrix c = dressed_matrix_elements(basis, pi);
    RealMatrix out = RealMatrix::Zero(c.rows(), c.cols());
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        for (Eigen::Index k = j + 1; k < c.cols(); ++k) {
            out(j, k) = 0.5 * std::norm(c(j, k));
            out(k, j) = out(j, k);
        }
    }
    return out;
}

OperatorMatrix to_full_space(const DressedBasis& basis, const Matrix& dressed) {
    if (dressed.rows() != basis.n_keep || dressed.cols() != basis.n_keep) {
        throw DimensionMismatch("to_full_space: operator is not n_keep x n_keep");
    }
    const Matrix v = basis.kept_states();
    return {basis.space, v * dressed * v.adjoint(), false};
}

std::vector<int> track_states(const DressedBasis& previous, const DressedBasis& current) {
    if (!(previous.space == current.space)) throw DimensionMismatch("track_states: spaces differ");
    const int n = std::min(previous.n_keep, current.n_keep);
    const RealMatrix overlap = (previous.states.leftCols(n).adjoint() * current.states.leftCols(n)).cwiseAbs();
    std::vector<std::tuple<double, int, int>> pairs;
    pairs.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) pairs.emplace_back(-overlap(i, j), i, j);
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    for (const auto& [neg, i, j] : pairs) {
        if (perm[i] >= 0 || used[j]) continue;
        perm[i] = j;
        used[j] = true;
    }
    return perm;
}

}  // namespace uscqed
