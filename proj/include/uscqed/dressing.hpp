#pragma once

#include <vector>

#include "uscqed/hilbert.hpp"

namespace uscqed {

/// Eigen-decomposition of a system Hamiltonian, ground energy shifted to 0.
///
/// All source_dim eigenpairs are stored; the first n_keep form the working
/// basis for dynamics.
struct DressedBasis {
    RealVector energies;  // ascending, energies(0) == 0
    Matrix states;        // columns are eigenvectors in the full space
    double ground_energy = 0.0;
    int n_keep = 0;
    SpaceDescriptor space;

    int source_dim() const noexcept { return static_cast<int>(states.rows()); }
    RealVector kept_energies() const { return energies.head(n_keep); }
    Matrix kept_states() const { return states.leftCols(n_keep); }
};

inline constexpr double kDegeneracyTolerance = 1e-9;
inline constexpr double kParityCleanup = 1e-12;
inline constexpr double kFrequencyBinTolerance = 1e-9;

/// Throws InvalidArgument for non-Hermitian input or n_keep outside [1, dim],
/// EigensolverFailure if the solver does not converge.
///
/// Phase: the largest-magnitude component of each eigenvector is real and
/// positive (first index wins among near-equal magnitudes). Exactly
/// degenerate clusters are rotated to a canonical basis (reduced row echelon
/// form on the pivot entries), so the uncoupled limit yields bare states.
DressedBasis diagonalize(const OperatorMatrix& H, int n_keep);

enum class JumpDirection { lowering, raising };

/// Dressed-basis jump operator (n_keep x n_keep).
struct JumpOperator {
    Matrix matrix;
    JumpDirection direction = JumpDirection::lowering;

    JumpOperator conjugate() const;
    int dim() const noexcept { return static_cast<int>(matrix.rows()); }
};

/// <j|Pi|k> for the kept states, with the parity cleanup applied: entries
/// below 1e-12 in modulus and the whole diagonal are set to zero.
Matrix dressed_matrix_elements(const DressedBasis& basis, const OperatorMatrix& pi);

/// x^+ = sum_{j<k} C_jk |j><k|.
JumpOperator jump_operator(const DressedBasis& basis, const OperatorMatrix& pi);

struct FrequencyComponent {
    double omega;  // omega_k - omega_j > 0
    Matrix xplus;
};

/// Partition of x^+ by transition frequency, ascending in omega. Transitions
/// closer than 1e-9 share one bin.
std::vector<FrequencyComponent> frequency_resolved_jumps(const DressedBasis& basis, const OperatorMatrix& pi);

/// |P_jk|^2 = |C_jk|^2 / 2, symmetric, zero diagonal.
RealMatrix transition_strengths(const DressedBasis& basis, const OperatorMatrix& pi);

/// Dressed-basis operator (n_keep x n_keep) mapped back to the full space.
OperatorMatrix to_full_space(const DressedBasis& basis, const Matrix& dressed);

/// perm[i] = index of the state in `current` that continues state i of
/// `previous`, matched greedily by descending overlap |<prev_i|cur_j>|.
/// Only the first n states are matched, n = min of the two n_keep values.
std::vector<int> track_states(const DressedBasis& previous, const DressedBasis& current);

}  // namespace uscqed
