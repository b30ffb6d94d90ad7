#include "qmetro/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "qmetro/bounds.hpp"
#include "qmetro/quadrature.hpp"

namespace qm {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double sinc_derivative(double x) {
    if (std::abs(x) < 1e-3) return -x / 3.0 + x * x * x / 30.0;
    return (x * std::cos(x) - std::sin(x)) / (x * x);
}

// Orthonormal basis of the sector projections of the probe components and
// the probe itself in that basis.
struct Reduction {
    CMatrix basis;
    RMatrix lambdas;
    CMatrix rho0;
};

Reduction reduce(const ProbeState& probe, const Generator& gen) {
    if (gen.dim() != probe.space.dim()) throw std::invalid_argument("prior moments: generator dimension mismatch");
    const SectorDecomposition sec = spectral_sectors(gen);
    const auto [w, v] = probe.components();
    const Index comps = w.size(), n = probe.space.dim();
    std::vector<CMatrix> parts;  // per component: dim x sectors
    for (Index c = 0; c < comps; ++c) parts.push_back(std::sqrt(w(c)) * sec.components(v.col(c)));

    std::vector<CVector> cols;
    std::vector<Index> owner;
    for (Index s = 0; s < sec.sectors(); ++s) {
        CMatrix m(n, comps);
        for (Index c = 0; c < comps; ++c) m.col(c) = parts[size_t(c)].col(s);
        if (comps == 1) {
            const double nm = m.col(0).norm();
            if (nm > 1e-14) {
                cols.push_back(m.col(0) / nm);
                owner.push_back(s);
            }
            continue;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m.adjoint() * m);
        const double top = es.eigenvalues().maxCoeff();
        for (Index k = 0; k < comps; ++k) {
            const double ev = es.eigenvalues()(k);
            if (ev > 1e-28 && ev > 1e-24 * top) {
                cols.push_back(m * es.eigenvectors().col(k) / std::sqrt(ev));
                owner.push_back(s);
            }
        }
    }
    Reduction r;
    const Index rank = Index(cols.size());
    r.basis.resize(n, rank);
    r.lambdas.resize(gen.size(), rank);
    for (Index j = 0; j < rank; ++j) {
        r.basis.col(j) = cols[size_t(j)];
        r.lambdas.col(j) = sec.eigenvalues.col(owner[size_t(j)]);
    }
    CMatrix proj(rank, comps);
    for (Index c = 0; c < comps; ++c) proj.col(c) = std::sqrt(w(c)) * (r.basis.adjoint() * v.col(c));
    r.rho0 = proj * proj.adjoint();
    return r;
}

// Fill rho and rho_bar from per-axis averages of exp(-i omega theta_k) and
// theta_k exp(-i omega theta_k).
using AxisAverage = std::function<std::pair<cplx, cplx>(Index axis, double omega)>;

PriorMoments assemble(const ProbeState& probe, const Reduction& red, const AxisAverage& avg) {
    const Index r = red.basis.cols(), d = red.lambdas.rows();
    PriorMoments out;
    out.space = probe.space;
    out.basis = red.basis;
    out.lambdas = red.lambdas;
    out.rho = CMatrix::Zero(r, r);
    out.rho_bar.assign(size_t(d), CMatrix::Zero(r, r));
    std::vector<std::map<long long, std::pair<cplx, cplx>>> cache(static_cast<size_t>(d));
    std::vector<std::pair<cplx, cplx>> f(static_cast<size_t>(d));
    for (Index j = 0; j < r; ++j)
        for (Index i = 0; i < r; ++i) {
            for (Index k = 0; k < d; ++k) {
                const double om = red.lambdas(k, i) - red.lambdas(k, j);
                const long long key = std::llround(om * 1e9);
                auto it = cache[size_t(k)].find(key);
                if (it == cache[size_t(k)].end()) it = cache[size_t(k)].emplace(key, avg(k, om)).first;
                f[size_t(k)] = it->second;
            }
            cplx all = 1.0;
            for (Index k = 0; k < d; ++k) all *= f[size_t(k)].first;
            out.rho(i, j) = red.rho0(i, j) * all;
            for (Index k = 0; k < d; ++k) {
                cplx term = f[size_t(k)].second;
                for (Index l = 0; l < d; ++l)
                    if (l != k) term *= f[size_t(l)].first;
                out.rho_bar[size_t(k)](i, j) = red.rho0(i, j) * term;
            }
        }
    return out;
}

}  // namespace

cplx flat_fourier(double omega, double mean, double width) {
    return std::polar(1.0, -omega * mean) * sinc(0.5 * omega * width);
}

cplx flat_fourier_first(double omega, double mean, double width) {
    const cplx ph = std::polar(1.0, -omega * mean);
    return mean * ph * sinc(0.5 * omega * width) + cplx(0, 1) * ph * (0.5 * width) * sinc_derivative(0.5 * omega * width);
}

PriorMoments prior_moments_interferometer(const ProbeState& probe, const FlatPrior& prior) {
    if (!probe.is_pure() || probe.space.modes != 2)
        throw std::invalid_argument("prior_moments_interferometer: needs a two-mode pure probe");
    if (prior.dims() != 1) throw std::invalid_argument("prior_moments_interferometer: one parameter only");
    const Reduction red = reduce(probe, interferometer_generator(probe.space));
    const double mean = prior.means(0), width = prior.widths(0);
    return assemble(probe, red, [&](Index, double om) {
        return std::make_pair(flat_fourier(om, mean, width), flat_fourier_first(om, mean, width));
    });
}

PriorMoments prior_moments_generic(const ProbeState& probe, const Generator& gen, const FlatPrior& prior, int nodes) {
    if (prior.dims() != gen.size()) throw std::invalid_argument("prior_moments_generic: parameter count mismatch");
    if (nodes < 2) throw std::invalid_argument("prior_moments_generic: too few nodes");
    const Reduction red = reduce(probe, gen);
    auto quad = [&](Index k, double om, int n) {
        const auto [x, w] = gauss_legendre(n, prior.lower(k), prior.upper(k));
        cplx a = 0.0, b = 0.0;
        for (Index i = 0; i < x.size(); ++i) {
            const cplx e = std::polar(w(i) / prior.widths(k), -om * x(i));
            a += e;
            b += x(i) * e;
        }
        return std::make_pair(a, b);
    };
    return assemble(probe, red, [&](Index k, double om) {
        int n = nodes;
        auto cur = quad(k, om, n);
        for (int attempt = 0; attempt < 5; ++attempt) {
            auto next = quad(k, om, 2 * n);
            const double diff = std::max(std::abs(next.first - cur.first), std::abs(next.second - cur.second));
            if (diff <= 1e-6) return cur;
            cur = next;
            n *= 2;
        }
        throw NumericalError("quadrature", "prior moments did not converge when doubling the nodes");
    });
}

RVector QuantumEstimator::estimates(Index k) const { return hermitian_eig(S[size_t(k)], 1e-8).values; }

QuantumEstimator solve_estimator(const PriorMoments& m, double support_threshold) {
    const EigenSystem es = hermitian_eig(m.rho, 1e-8);
    std::vector<Index> keep;
    for (Index i = 0; i < es.values.size(); ++i)
        if (es.values(i) > support_threshold) keep.push_back(i);
    const Index q = Index(keep.size());
    if (q == 0) throw NumericalError("support", "prior-averaged state has empty support");
    CMatrix v(m.rho.rows(), q);
    RVector p(q);
    for (Index j = 0; j < q; ++j) {
        v.col(j) = es.vectors.col(keep[size_t(j)]);
        p(j) = es.values(keep[size_t(j)]);
    }
    QuantumEstimator est;
    est.basis = m.basis * v;
    est.support_weights = p;
    for (const auto& rb : m.rho_bar) {
        const CMatrix b = v.adjoint() * rb * v;
        if (max_abs(b - b.adjoint()) > 1e-5)
            throw NumericalError("spectrum", "estimator has a complex spectrum; the cutoff is probably too small");
        CMatrix s(q, q);
        for (Index j = 0; j < q; ++j)
            for (Index i = 0; i < q; ++i) s(i, j) = 2.0 * b(i, j) / (p(i) + p(j));
        s = 0.5 * (s + s.adjoint()).eval();
        const CMatrix res = s * p.asDiagonal() + p.asDiagonal() * s - 2.0 * b;
        est.sylvester_residual = std::max(est.sylvester_residual, max_abs(res));
        est.S.push_back(s);
    }
    return est;
}

double single_shot_bound(const QuantumEstimator& est, const FlatPrior& prior, const RVector& w) {
    if (w.size() != est.parameters() || prior.dims() != est.parameters())
        throw std::invalid_argument("single_shot_bound: parameter count mismatch");
    if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("single_shot_bound: weights must be nonnegative with unit sum");
    double total = 0.0;
    for (Index k = 0; k < w.size(); ++k) {
        const CMatrix& s = est.S[size_t(k)];
        const double trs2 = (est.support_weights.cast<cplx>().asDiagonal() * s * s).trace().real();
        total += w(k) * (prior.second_moment(k) - trs2);
    }
    if (total < -1e-8) throw NumericalError("bound", "negative single-shot bound");
    return total;
}

double single_shot_bound(const QuantumEstimator& est, const FlatPrior& prior) {
    return single_shot_bound(est, prior, RVector::Constant(est.parameters(), 1.0 / double(est.parameters())));
}

double commutation_check(const QuantumEstimator& est) {
    double worst = 0.0;
    for (size_t i = 0; i < est.S.size(); ++i)
        for (size_t j = i + 1; j < est.S.size(); ++j)
            worst = std::max(worst, max_abs(est.S[i] * est.S[j] - est.S[j] * est.S[i]));
    return worst;
}

Pom optimal_pom(const QuantumEstimator& est, const ModeSpace& space, const FlatPrior& prior) {
    const Index q = est.support_weights.size(), d = est.parameters();
    if (d > 1 && commutation_check(est) > 1e-9)
        throw std::invalid_argument("optimal_pom: the estimators do not commute");
    CMatrix h = CMatrix::Zero(q, q);
    for (Index k = 0; k < d; ++k) h += (1.0 + 0.7548776662 * double(k)) * est.S[size_t(k)];
    const EigenSystem es = hermitian_eig(h, 1e-8);
    CMatrix w = es.vectors;
    // split degenerate eigenspaces along rho, so that each outcome is pinned down
    const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    const CMatrix rho = est.support_weights.cast<cplx>().asDiagonal();
    for (Index i = 0; i < q;) {
        Index j = i + 1;
        while (j < q && es.values(j) - es.values(j - 1) < 1e-9 * scale) ++j;
        if (j - i > 1) {
            const CMatrix block = w.middleCols(i, j - i);
            const EigenSystem sub = hermitian_eig(block.adjoint() * rho * block, 1e-8);
            w.middleCols(i, j - i) = block * sub.vectors;
        }
        i = j;
    }
    RMatrix labels(q + 1, d);
    for (Index k = 0; k < d; ++k) {
        const CMatrix sk = w.adjoint() * est.S[size_t(k)] * w;
        for (Index m = 0; m < q; ++m) labels(m, k) = sk(m, m).real();
        labels(q, k) = prior.means(k);
    }
    return explicit_pom(space, est.basis * w, labels, true, "optimal");
}

double noon_collective_bound(int mu, const FlatPrior& prior, int n) {
    if (mu < 1) throw std::invalid_argument("noon_collective_bound: mu must be positive");
    if (mu > 10) throw std::invalid_argument("noon_collective_bound: mu > 10 exceeds the memory guard");
    if (prior.dims() != 1) throw std::invalid_argument("noon_collective_bound: one parameter only");
    // every copy lives on span{|n,0>, |0,n>}, a qubit with J_z = +-n/2
    ProbeState copies;
    copies.space = ModeSpace(2, mu);
    const Index dim = copies.space.dim();
    copies.psi = CVector::Constant(dim, std::pow(2.0, -0.5 * mu));
    copies.kind = "noon_copies";
    RVector jz(dim);
    for (Index i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int o : copies.space.occupation(i)) s += o == 0 ? 0.5 * n : -0.5 * n;
        jz(i) = s;
    }
    const Generator gen = Generator::from_diagonals({jz});
    const PriorMoments m = prior_moments_generic(copies, gen, prior);
    return single_shot_bound(solve_estimator(m), prior);
}

double high_prior_approx_bound(const ProbeState& probe, const Generator& gen, const FlatPrior& prior) {
    if (prior.dims() != 1) throw std::invalid_argument("high_prior_approx_bound: one parameter only");
    const double var = prior.variance(0);
    return var * (1.0 - var * qfi(probe, gen));
}

double classical_single_shot_bound(const ProbeState& probe, const Generator& gen, const Pom& pom,
                                   const FlatPrior& prior, int nodes) {
    if (prior.dims() != 1) throw std::invalid_argument("classical_single_shot_bound: one parameter only");
    const auto [x, w] = gauss_legendre(nodes, prior.lower(0), prior.upper(0));
    const RMatrix p = likelihood_table(probe, gen, pom, x);
    const RVector wp = w / prior.widths(0);
    const RVector a = p * wp;
    const RVector b = p * wp.cwiseProduct(x);
    double gain = 0.0;
    for (Index m = 0; m < a.size(); ++m)
        if (a(m) > 1e-300) gain += b(m) * b(m) / a(m);
    return prior.second_moment(0) - gain;
}

}  // namespace qm
