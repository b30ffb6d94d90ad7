#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "qmetro/types.hpp"

namespace qm {

// Largest tensor-product dimension accepted by default (71^2 fits).
inline constexpr Index kDefaultMaxDim = 8192;

// Truncated tensor-product space of `modes` bosonic modes (or qubits, with
// cutoff 2). Basis index: the first mode is the most significant digit,
// so for two modes |n1, n2> sits at n1 * cutoff + n2.
struct ModeSpace {
    int cutoff = 2;
    int modes = 1;

    ModeSpace() = default;
    ModeSpace(int cutoff, int modes = 1, Index max_dim = kDefaultMaxDim);

    Index dim() const;
    Index index(const std::vector<int>& occupation) const;
    std::vector<int> occupation(Index i) const;
    int total_quanta(Index i) const;
    bool operator==(const ModeSpace& o) const { return cutoff == o.cutoff && modes == o.modes; }
};

enum class Axis { x, y, z };

// a^dagger on a single truncated mode: <n+1|a^dagger|n> = sqrt(n+1).
template <typename Scalar = cplx>
Mat<Scalar> creation_matrix(int cutoff) {
    Mat<Scalar> c = Mat<Scalar>::Zero(cutoff, cutoff);
    for (int n = 0; n + 1 < cutoff; ++n) c(n + 1, n) = Scalar(std::sqrt(double(n + 1)));
    return c;
}

template <typename A, typename B>
Mat<typename A::Scalar> kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    Mat<typename A::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix identity(Index n);
CMatrix pauli(Axis axis);

// Lift a single-mode operator onto `mode` of the space.
CMatrix embed(const ModeSpace& space, int mode, const CMatrix& local);

CMatrix creation(const ModeSpace& space, int mode);
CMatrix annihilation(const ModeSpace& space, int mode);
CMatrix number(const ModeSpace& space, int mode);

// Jordan-Schwinger angular momentum on exactly two modes.
CMatrix jordan_schwinger(const ModeSpace& space, Axis axis);

using CSparse = Eigen::SparseMatrix<cplx>;

// exp(-i pi/2 J_x)
CMatrix beam_splitter(const ModeSpace& space);
// Same operator built block by block over total photon number, never dense.
CSparse beam_splitter_sparse(const ModeSpace& space);
// exp(-i theta J_z)
CMatrix phase_shift_diff(const ModeSpace& space, double theta);
// exp(alpha a^dagger - conj(alpha) a) on one mode
CMatrix displacement(const ModeSpace& space, int mode, cplx alpha);
// exp((conj(zeta) a^2 - zeta a^dagger^2) / 2) on one mode
CMatrix squeeze(const ModeSpace& space, int mode, cplx zeta);

// General matrix exponential. Decouples the matrix into the connected
// components of its sparsity graph and runs scaling-and-squaring Pade on
// each block.
CMatrix expm(const CMatrix& a);
// exp(-i t H) for Hermitian H through its eigendecomposition, block by block.
CMatrix expm_hermitian(const CMatrix& h, double t);

// Index sets of the connected components of the symmetric sparsity pattern.
std::vector<std::vector<Index>> connected_blocks(const CMatrix& a, double zero_tol = 0.0);

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // columns
};

bool is_hermitian(const CMatrix& a, double tol = 1e-10);
double max_abs(const CMatrix& a);
EigenSystem hermitian_eig(const CMatrix& a, double tol = 1e-10);

// max|U^dagger U - I| over basis states whose total quanta <= cutoff - 1 - margin.
double unitarity_defect(const CMatrix& u, const ModeSpace& space, int margin = 2);

}  // namespace qm
