#include "qmetro/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace qm {

ModeSpace::ModeSpace(int cutoff_, int modes_, Index max_dim) : cutoff(cutoff_), modes(modes_) {
    if (cutoff < 2) throw std::invalid_argument("ModeSpace: cutoff must be >= 2");
    if (modes < 1) throw std::invalid_argument("ModeSpace: modes must be >= 1");
    double d = std::pow(double(cutoff), double(modes));
    if (d > double(max_dim))
        throw std::invalid_argument("ModeSpace: dimension " + std::to_string(Index(d)) +
                                    " exceeds the memory budget " + std::to_string(max_dim));
}

Index ModeSpace::dim() const {
    Index d = 1;
    for (int m = 0; m < modes; ++m) d *= cutoff;
    return d;
}

Index ModeSpace::index(const std::vector<int>& occ) const {
    if (int(occ.size()) != modes) throw std::invalid_argument("ModeSpace::index: wrong mode count");
    Index i = 0;
    for (int n : occ) {
        if (n < 0 || n >= cutoff) throw std::out_of_range("ModeSpace::index: occupation out of range");
        i = i * cutoff + n;
    }
    return i;
}

std::vector<int> ModeSpace::occupation(Index i) const {
    std::vector<int> occ(modes);
    for (int m = modes - 1; m >= 0; --m) {
        occ[m] = int(i % cutoff);
        i /= cutoff;
    }
    return occ;
}

int ModeSpace::total_quanta(Index i) const {
    int s = 0;
    for (int n : occupation(i)) s += n;
    return s;
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix pauli(Axis axis) {
    CMatrix s(2, 2);
    const cplx I(0, 1);
    switch (axis) {
        case Axis::x: s << 0, 1, 1, 0; break;
        case Axis::y: s << 0, -I, I, 0; break;
        case Axis::z: s << 1, 0, 0, -1; break;
    }
    return s;
}

CMatrix embed(const ModeSpace& space, int mode, const CMatrix& local) {
    if (mode < 0 || mode >= space.modes) throw std::out_of_range("mode index out of range");
    if (local.rows() != space.cutoff || local.cols() != space.cutoff)
        throw std::invalid_argument("embed: local operator has the wrong size");
    Index before = 1, after = 1;
    for (int m = 0; m < mode; ++m) before *= space.cutoff;
    for (int m = mode + 1; m < space.modes; ++m) after *= space.cutoff;
    CMatrix out = kron(identity(before), kron(local, identity(after)));
    return out;
}

CMatrix creation(const ModeSpace& space, int mode) {
    return embed(space, mode, creation_matrix(space.cutoff));
}

CMatrix annihilation(const ModeSpace& space, int mode) {
    return embed(space, mode, creation_matrix(space.cutoff).adjoint());
}

CMatrix number(const ModeSpace& space, int mode) {
    CMatrix n = CMatrix::Zero(space.cutoff, space.cutoff);
    for (int k = 0; k < space.cutoff; ++k) n(k, k) = double(k);
    return embed(space, mode, n);
}

CMatrix jordan_schwinger(const ModeSpace& space, Axis axis) {
    if (space.modes != 2) throw std::invalid_argument("jordan_schwinger: needs exactly two modes");
    const CMatrix c = creation_matrix(space.cutoff);
    const CMatrix a = c.adjoint();
    const cplx I(0, 1);
    switch (axis) {
        case Axis::x: return 0.5 * (kron(c, a) + kron(a, c));
        case Axis::y: return 0.5 * I * (kron(a, c) - kron(c, a));
        case Axis::z: {
            const CMatrix n = c * a;
            return 0.5 * (kron(n, identity(space.cutoff)) - kron(identity(space.cutoff), n));
        }
    }
    return {};
}

CMatrix beam_splitter(const ModeSpace& space) { return CMatrix(beam_splitter_sparse(space)); }

CSparse beam_splitter_sparse(const ModeSpace& space) {
    if (space.modes != 2) throw std::invalid_argument("beam_splitter: needs exactly two modes");
    const int dc = space.cutoff;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int total = 0; total <= 2 * (dc - 1); ++total) {
        std::vector<Index> idx;
        std::vector<int> n1;
        for (int k = std::max(0, total - dc + 1); k <= std::min(total, dc - 1); ++k) {
            idx.push_back(Index(k) * dc + (total - k));
            n1.push_back(k);
        }
        const Index m = Index(idx.size());
        // J_x inside the block; |k, N-k> couples to |k+1, N-k-1>
        CMatrix jx = CMatrix::Zero(m, m);
        for (Index i = 0; i + 1 < m; ++i) {
            const double v = 0.5 * std::sqrt(double(n1[i] + 1) * double(total - n1[i]));
            jx(i + 1, i) = v;
            jx(i, i + 1) = v;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(jx);
        CVector ph = (es.eigenvalues().cast<cplx>() * cplx(0, -0.5 * kPi)).array().exp();
        const CMatrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        for (Index j = 0; j < m; ++j)
            for (Index i = 0; i < m; ++i)
                if (std::abs(u(i, j)) > 1e-300) trip.emplace_back(idx[i], idx[j], u(i, j));
    }
    CSparse out(space.dim(), space.dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

CMatrix phase_shift_diff(const ModeSpace& space, double theta) {
    // J_z is diagonal in the number basis.
    const CMatrix jz = jordan_schwinger(space, Axis::z);
    CMatrix u = CMatrix::Zero(jz.rows(), jz.cols());
    for (Index i = 0; i < jz.rows(); ++i) u(i, i) = std::exp(cplx(0, -theta * jz(i, i).real()));
    return u;
}

CMatrix displacement(const ModeSpace& space, int mode, cplx alpha) {
    const CMatrix c = creation_matrix(space.cutoff);
    const CMatrix gen = alpha * c - std::conj(alpha) * c.adjoint();
    return embed(space, mode, expm(gen));
}

CMatrix squeeze(const ModeSpace& space, int mode, cplx zeta) {
    const CMatrix c = creation_matrix(space.cutoff);
    const CMatrix a = c.adjoint();
    const CMatrix gen = 0.5 * (std::conj(zeta) * a * a - zeta * c * c);
    return embed(space, mode, expm(gen));
}

std::vector<std::vector<Index>> connected_blocks(const CMatrix& a, double zero_tol) {
    const Index n = a.rows();
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), Index(0));
    auto find = [&](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (i != j && std::abs(a(i, j)) > zero_tol) {
                Index ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
    std::vector<std::vector<Index>> blocks;
    std::vector<Index> slot(n, -1);
    for (Index i = 0; i < n; ++i) {
        Index r = find(i);
        if (slot[r] < 0) {
            slot[r] = Index(blocks.size());
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(i);
    }
    return blocks;
}

namespace {

CMatrix gather(const CMatrix& a, const std::vector<Index>& idx) {
    const Index m = Index(idx.size());
    CMatrix b(m, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) b(i, j) = a(idx[i], idx[j]);
    return b;
}

void scatter(CMatrix& out, const CMatrix& b, const std::vector<Index>& idx) {
    const Index m = Index(idx.size());
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) out(idx[i], idx[j]) = b(i, j);
}

}  // namespace

CMatrix expm(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
    CMatrix out = CMatrix::Zero(a.rows(), a.cols());
    for (const auto& idx : connected_blocks(a)) {
        if (idx.size() == 1) {
            out(idx[0], idx[0]) = std::exp(a(idx[0], idx[0]));
            continue;
        }
        CMatrix b = gather(a, idx);
        CMatrix e = b.exp();
        scatter(out, e, idx);
    }
    return out;
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
    if (!is_hermitian(h)) throw std::invalid_argument("expm_hermitian: generator is not Hermitian");
    CMatrix out = CMatrix::Zero(h.rows(), h.cols());
    for (const auto& idx : connected_blocks(h)) {
        if (idx.size() == 1) {
            out(idx[0], idx[0]) = std::exp(cplx(0, -t * h(idx[0], idx[0]).real()));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(gather(h, idx));
        CVector ph = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
        CMatrix e = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        scatter(out, e, idx);
    }
    return out;
}

double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) <= tol;
}

EigenSystem hermitian_eig(const CMatrix& a, double tol) {
    if (!is_hermitian(a, tol * std::max(1.0, max_abs(a))))
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver", "did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

double unitarity_defect(const CMatrix& u, const ModeSpace& space, int margin) {
    std::vector<Index> safe;
    for (Index i = 0; i < space.dim(); ++i)
        if (space.total_quanta(i) <= space.cutoff - 1 - margin) safe.push_back(i);
    double worst = 0.0;
    for (Index j : safe)
        for (Index i : safe) {
            cplx v = u.col(i).dot(u.col(j)) - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(v));
        }
    return worst;
}

}  // namespace qm
