#include "qmetro/probes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace qm {

namespace {

CVector vacuum(int cutoff) {
    CVector v = CVector::Zero(cutoff);
    v(0) = 1.0;
    return v;
}

CVector fock(int cutoff, int n) {
    CVector v = CVector::Zero(cutoff);
    v(n) = 1.0;
    return v;
}

CMatrix single_displacement(int cutoff, cplx alpha) {
    return displacement(ModeSpace(cutoff, 1), 0, alpha);
}

CMatrix single_squeeze(int cutoff, cplx zeta) { return squeeze(ModeSpace(cutoff, 1), 0, zeta); }

// Even cat (D(a)+D(-a))|0>, unnormalized, from the coherent amplitudes.
CVector even_cat(double alpha, int cutoff) {
    CVector v = CVector::Zero(cutoff);
    double amp = std::exp(-0.5 * alpha * alpha);
    for (int n = 0; n < cutoff; ++n) {
        if (n > 0) amp *= alpha / std::sqrt(double(n));
        if (n % 2 == 0) v(n) = 2.0 * amp;
    }
    return v;
}

CVector squeezed_cat_mode(const CMatrix& s, double alpha) {
    CVector v = s * even_cat(alpha, int(s.rows()));
    return v / v.norm();
}

CVector squeezed_cat_mode(double r, double alpha, int cutoff) {
    return squeezed_cat_mode(single_squeeze(cutoff, r), alpha);
}

struct ModeMoments {
    double mean = 0.0;
    double var = 0.0;
};

ModeMoments mode_moments(const CVector& v) {
    double m1 = 0.0, m2 = 0.0;
    for (Index n = 0; n < v.size(); ++n) {
        const double p = std::norm(v(n));
        m1 += p * double(n);
        m2 += p * double(n) * double(n);
    }
    return {m1, m2 - m1 * m1};
}

RVector populations(const ProbeState& probe) {
    if (probe.is_pure()) return probe.psi.cwiseAbs2();
    return probe.rho.diagonal().real();
}

ProbeState finish_pure(ProbeState p) {
    p.psi /= p.psi.norm();
    p.nbar = mean_quanta(p);
    return p;
}

}  // namespace

CMatrix ProbeState::density() const {
    if (!is_pure()) return rho;
    return psi * psi.adjoint();
}

std::pair<RVector, CMatrix> ProbeState::components(double tol) const {
    if (is_pure()) {
        RVector w(1);
        w(0) = 1.0;
        return {w, psi};
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
    std::vector<Index> keep;
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > tol) keep.push_back(i);
    RVector w(Index(keep.size()));
    CMatrix v(rho.rows(), Index(keep.size()));
    for (Index k = 0; k < Index(keep.size()); ++k) {
        w(k) = es.eigenvalues()(keep[k]);
        v.col(k) = es.eigenvectors().col(keep[k]);
    }
    return {w, v};
}

Generator Generator::from_diagonals(std::vector<RVector> diagonals) {
    if (diagonals.empty()) throw std::invalid_argument("Generator: no operators");
    for (const auto& d : diagonals)
        if (d.size() != diagonals.front().size()) throw std::invalid_argument("Generator: size mismatch");
    Generator g;
    g.diagonals = std::move(diagonals);
    return g;
}

Generator Generator::from_operators(std::vector<CMatrix> ops, double tol) {
    if (ops.empty()) throw std::invalid_argument("Generator: no operators");
    bool diagonal = true;
    for (const auto& k : ops) {
        if (!is_hermitian(k, 1e-10)) throw std::invalid_argument("Generator: operator is not Hermitian");
        if (k.rows() != ops.front().rows()) throw std::invalid_argument("Generator: size mismatch");
        CMatrix off = k;
        off.diagonal().setZero();
        if (max_abs(off) > tol) diagonal = false;
    }
    if (!diagonal) {
        for (size_t i = 0; i < ops.size(); ++i)
            for (size_t j = i + 1; j < ops.size(); ++j)
                if (max_abs(ops[i] * ops[j] - ops[j] * ops[i]) > 1e-9)
                    throw std::invalid_argument("Generator: operators do not commute");
        Generator g;
        g.ops = std::move(ops);
        return g;
    }
    std::vector<RVector> d;
    for (const auto& k : ops) d.push_back(k.diagonal().real());
    return from_diagonals(std::move(d));
}

Index Generator::dim() const {
    if (is_diagonal()) return diagonals.empty() ? 0 : diagonals.front().size();
    return ops.front().rows();
}

CMatrix Generator::op(Index k) const {
    if (!is_diagonal()) return ops.at(size_t(k));
    return diagonals.at(size_t(k)).cast<cplx>().asDiagonal();
}

SectorDecomposition spectral_sectors(const Generator& gen, double tol) {
    const Index n = gen.dim(), d = gen.size();
    SectorDecomposition out;
    RMatrix lam(d, n);
    if (gen.is_diagonal()) {
        for (Index k = 0; k < d; ++k) lam.row(k) = gen.diagonals[size_t(k)].transpose();
    } else {
        // a generic combination separates the joint eigenspaces
        CMatrix h = CMatrix::Zero(n, n);
        for (Index k = 0; k < d; ++k) h += (1.0 + 0.6180339887 * double(k + 1)) * gen.ops[size_t(k)];
        out.basis = hermitian_eig(h).vectors;
        for (Index k = 0; k < d; ++k)
            lam.row(k) = (out.basis.adjoint() * gen.ops[size_t(k)] * out.basis).diagonal().real().transpose();
    }
    std::vector<Index> order(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) order[size_t(i)] = i;
    auto less = [&](Index a, Index b) {
        for (Index k = 0; k < d; ++k) {
            if (lam(k, a) < lam(k, b) - tol) return true;
            if (lam(k, a) > lam(k, b) + tol) return false;
        }
        return false;
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<Index> heads;
    for (Index i : order) {
        if (heads.empty() || less(heads.back(), i)) {
            heads.push_back(i);
            out.members.emplace_back();
        }
        out.members.back().push_back(i);
    }
    out.eigenvalues.resize(d, Index(heads.size()));
    for (Index s = 0; s < Index(heads.size()); ++s) out.eigenvalues.col(s) = lam.col(heads[size_t(s)]);
    return out;
}

CMatrix SectorDecomposition::components(const CVector& v) const {
    const Index n = v.size();
    CMatrix out = CMatrix::Zero(n, sectors());
    if (basis.size() == 0) {
        for (Index s = 0; s < sectors(); ++s)
            for (Index i : members[size_t(s)]) out(i, s) = v(i);
        return out;
    }
    const CVector w = basis.adjoint() * v;
    for (Index s = 0; s < sectors(); ++s)
        for (Index i : members[size_t(s)]) out.col(s) += w(i) * basis.col(i);
    return out;
}

ProbeKind parse_probe_kind(const std::string& name) {
    static const std::map<std::string, ProbeKind> names = {
        {"coherent", ProbeKind::coherent},       {"noon", ProbeKind::noon},
        {"tsv", ProbeKind::tsv},                 {"ses", ProbeKind::ses},
        {"tsc_optimal", ProbeKind::tsc_optimal}, {"tsc_intermediate", ProbeKind::tsc_intermediate},
    };
    auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown probe kind '" + name + "'");
    return it->second;
}

std::string to_string(ProbeKind kind) {
    switch (kind) {
        case ProbeKind::coherent: return "coherent";
        case ProbeKind::noon: return "noon";
        case ProbeKind::tsv: return "tsv";
        case ProbeKind::ses: return "ses";
        case ProbeKind::tsc_optimal: return "tsc_optimal";
        case ProbeKind::tsc_intermediate: return "tsc_intermediate";
    }
    return "?";
}

const std::vector<ProbeKind>& optical_probe_kinds() {
    static const std::vector<ProbeKind> all = {ProbeKind::tsv, ProbeKind::tsc_intermediate,
                                               ProbeKind::tsc_optimal, ProbeKind::ses,
                                               ProbeKind::noon, ProbeKind::coherent};
    return all;
}

int canonical_cutoff(ProbeKind kind, double nbar) {
    switch (kind) {
        case ProbeKind::coherent:
            return nbar <= 2.0 ? 21 : int(std::ceil(nbar + 12.0 * std::sqrt(nbar) + 10.0));
        case ProbeKind::noon: return int(std::lround(nbar)) + 1;
        case ProbeKind::tsv: return 51;
        case ProbeKind::ses: return 71;
        case ProbeKind::tsc_optimal:
        case ProbeKind::tsc_intermediate: return 51;
    }
    return 0;
}

ProbeState make_tsc(double r, double alpha, int cutoff) {
    const CVector m = squeezed_cat_mode(r, alpha, cutoff);
    ProbeState p;
    p.space = ModeSpace(cutoff, 2);
    p.psi = kron(m, m);
    p.kind = "tsc";
    p = finish_pure(p);
    p.leakage = top_level_leakage(p);
    return p;
}

double tsc_alpha_for_nbar(double r, double nbar, double alpha0, int cutoff) {
    const CMatrix s = single_squeeze(cutoff, r);
    auto f = [&](double a) { return 2.0 * mode_moments(squeezed_cat_mode(s, a)).mean - nbar; };
    // The mean photon number is not monotone in alpha, so scan for the sign
    // change closest to alpha0 and polish it there.
    const double step = 0.005;
    double lo = 0, hi = 0, flo = 1, fhi = 1, best = 1e300;
    double a0 = std::max(step, alpha0 - 0.5), f0 = f(a0);
    for (double a1 = a0 + step; a1 <= alpha0 + 0.5; a1 += step) {
        const double f1 = f(a1);
        if (f0 * f1 <= 0.0 && std::abs(0.5 * (a0 + a1) - alpha0) < best) {
            best = std::abs(0.5 * (a0 + a1) - alpha0);
            lo = a0, hi = a1, flo = f0, fhi = f1;
        }
        a0 = a1, f0 = f1;
    }
    if (flo * fhi > 0.0) throw NumericalError("tsc", "could not bracket alpha for the requested nbar");
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(a - b) < 1e-14; };
    auto res = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (res.first + res.second);
}

namespace {

double tsc_fisher(double r, double nbar, double alpha0, int cutoff, double* alpha_out = nullptr) {
    const double a = tsc_alpha_for_nbar(r, nbar, alpha0, cutoff);
    if (alpha_out) *alpha_out = a;
    return 2.0 * mode_moments(squeezed_cat_mode(r, a, cutoff)).var;
}

}  // namespace

TscParameters tsc_optimize(double nbar, int cutoff) {
    auto neg = [&](double r) { return -tsc_fisher(r, nbar, 0.96, cutoff); };
    auto res = boost::math::tools::brent_find_minima(neg, 1.15, 1.28, 40);
    TscParameters p;
    p.r = res.first;
    tsc_fisher(p.r, nbar, 0.96, cutoff, &p.alpha);
    return p;
}

TscParameters tsc_for_fisher(double fq, double nbar, int cutoff) {
    const TscParameters best = tsc_optimize(nbar, cutoff);
    auto f = [&](double r) { return tsc_fisher(r, nbar, 1.09, cutoff) - fq; };
    double hi = best.r, fhi = f(hi), lo = hi, flo = fhi;
    // walk down the lower-r branch until the Fisher information drops below fq
    while (flo > 0.0) {
        hi = lo, fhi = flo;
        lo -= 0.01;
        if (lo < 0.5) throw NumericalError("tsc", "requested Fisher information not reachable");
        flo = f(lo);
    }
    if (fhi < 0.0) throw NumericalError("tsc", "requested Fisher information exceeds the maximum");
    boost::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(a - b) < 1e-13; };
    auto res = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    TscParameters p;
    p.r = 0.5 * (res.first + res.second);
    tsc_fisher(p.r, nbar, 1.09, cutoff, &p.alpha);
    return p;
}

ProbeState make_probe(ProbeKind kind, double nbar) {
    if (!(nbar > 0.0)) throw std::invalid_argument("make_probe: nbar must be positive");
    const bool canonical_only = kind == ProbeKind::ses || kind == ProbeKind::tsc_optimal ||
                                kind == ProbeKind::tsc_intermediate;
    if (canonical_only && std::abs(nbar - 2.0) > 1e-12)
        throw std::invalid_argument("make_probe: " + to_string(kind) + " is defined for nbar = 2 only");
    const int dc = canonical_cutoff(kind, nbar);
    ProbeState p;
    p.kind = to_string(kind);
    p.space = ModeSpace(dc, 2);
    switch (kind) {
        case ProbeKind::coherent: {
            CVector in = kron(CVector(single_displacement(dc, std::sqrt(nbar)) * vacuum(dc)), vacuum(dc));
            p.psi = beam_splitter_sparse(p.space) * in;
            break;
        }
        case ProbeKind::noon: {
            const double n = std::round(nbar);
            if (std::abs(n - nbar) > 1e-12 || n < 1)
                throw std::invalid_argument("make_probe: NOON needs a positive integer nbar");
            const int N = int(n);
            p.psi = kron(fock(dc, N), vacuum(dc)) + kron(vacuum(dc), fock(dc, N));
            break;
        }
        case ProbeKind::tsv: {
            const CVector m = single_squeeze(dc, std::asinh(std::sqrt(nbar / 2.0))) * vacuum(dc);
            p.psi = kron(m, m);
            break;
        }
        case ProbeKind::ses: {
            const CVector m = single_squeeze(dc, std::log(2.0 + std::sqrt(3.0))) * vacuum(dc);
            p.psi = kron(m, vacuum(dc)) + kron(vacuum(dc), m);
            break;
        }
        case ProbeKind::tsc_optimal: {
            const double r = 1.2145;
            const double a = tsc_alpha_for_nbar(r, nbar, 0.960149, dc);
            const CVector m = squeezed_cat_mode(r, a, dc);
            p.psi = kron(m, m);
            break;
        }
        case ProbeKind::tsc_intermediate: {
            const TscParameters t = tsc_for_fisher(22.0, nbar, dc);
            const CVector m = squeezed_cat_mode(t.r, t.alpha, dc);
            p.psi = kron(m, m);
            break;
        }
    }
    p = finish_pure(p);
    p.leakage = kind == ProbeKind::noon ? 0.0 : top_level_leakage(p);
    if (p.leakage > kLeakageGate)
        throw NumericalError("cutoff", "probe " + p.kind + " leaks " + std::to_string(p.leakage) +
                                           " onto the top Fock level");
    // SES loses about 4e-5 photons to truncation at cutoff 71; p.nbar keeps
    // the truncated value, this only guards against a wrong construction.
    if (std::abs(p.nbar - nbar) > kResourceTolerance * nbar)
        throw NumericalError("resources", "probe " + p.kind + " has mean quanta " + std::to_string(p.nbar));
    return p;
}

Generator interferometer_generator(const ModeSpace& space) {
    if (space.modes != 2) throw std::invalid_argument("interferometer_generator: needs two modes");
    RVector jz(space.dim());
    for (Index i = 0; i < space.dim(); ++i) {
        const auto occ = space.occupation(i);
        jz(i) = 0.5 * (occ[0] - occ[1]);
    }
    return Generator::from_diagonals({jz});
}

Generator number_generators(const ModeSpace& space, const std::vector<int>& modes) {
    std::vector<RVector> d;
    for (int m : modes) {
        if (m < 0 || m >= space.modes) throw std::out_of_range("number_generators: mode out of range");
        RVector n(space.dim());
        for (Index i = 0; i < space.dim(); ++i) n(i) = space.occupation(i)[m];
        d.push_back(n);
    }
    return Generator::from_diagonals(std::move(d));
}

Generator qubit_network_generators(int d) {
    if (d < 1) throw std::invalid_argument("qubit_network_generators: d must be positive");
    ModeSpace space(2, d);
    std::vector<RVector> out;
    for (int k = 0; k < d; ++k) {
        RVector z(space.dim());
        for (Index i = 0; i < space.dim(); ++i) z(i) = space.occupation(i)[k] == 0 ? 0.5 : -0.5;
        out.push_back(z);
    }
    return Generator::from_diagonals(std::move(out));
}

double expectation(const ProbeState& probe, const CMatrix& op) {
    if (probe.is_pure()) return probe.psi.dot(op * probe.psi).real();
    return (probe.rho * op).trace().real();
}

double mean_quanta(const ProbeState& probe) {
    const RVector pop = populations(probe);
    double s = 0.0;
    for (Index i = 0; i < pop.size(); ++i) s += pop(i) * probe.space.total_quanta(i);
    return s;
}

double top_level_leakage(const ProbeState& probe) {
    const RVector pop = populations(probe);
    double worst = 0.0;
    for (int m = 0; m < probe.space.modes; ++m) {
        double s = 0.0;
        for (Index i = 0; i < pop.size(); ++i)
            if (probe.space.occupation(i)[m] == probe.space.cutoff - 1) s += pop(i);
        worst = std::max(worst, s);
    }
    return worst;
}

Correlations correlations(const ProbeState& probe) {
    if (probe.space.modes != 2) throw std::invalid_argument("correlations: needs a two-mode probe");
    const RVector pop = populations(probe);
    const int dc = probe.space.cutoff;
    double n1 = 0, n2 = 0, n11 = 0, n22 = 0, n12 = 0;
    for (Index i = 0; i < pop.size(); ++i) {
        const double a = double(i / dc), b = double(i % dc);
        n1 += pop(i) * a;
        n2 += pop(i) * b;
        n11 += pop(i) * a * a;
        n22 += pop(i) * b * b;
        n12 += pop(i) * a * b;
    }
    if (std::abs(n1 - n2) > 1e-6) throw std::invalid_argument("correlations: probe is not path-symmetric");
    const double nbar = n1 + n2;
    const double var1 = n11 - n1 * n1;
    Correlations c;
    c.Q = (4.0 * n11 - nbar * (nbar + 2.0)) / (2.0 * nbar);
    c.J = (n12 - nbar * nbar / 4.0) / var1;
    const double jz_var = 0.25 * (n11 + n22 - 2.0 * n12) - 0.25 * (n1 - n2) * (n1 - n2);
    const double lhs = 4.0 * jz_var, rhs = nbar * (1.0 + c.Q) * (1.0 - c.J);
    if (std::abs(lhs - rhs) > 1e-5 * std::max(1.0, std::abs(lhs)))
        throw NumericalError("correlations", "4 Var(J_z) differs from nbar(1+Q)(1-J)");
    return c;
}

CMatrix encoding_unitary(const Generator& gen, const RVector& theta) {
    if (theta.size() != gen.size()) throw std::invalid_argument("encode: parameter count mismatch");
    if (gen.is_diagonal()) {
        RVector s = RVector::Zero(gen.dim());
        for (Index k = 0; k < gen.size(); ++k) s += theta(k) * gen.diagonals[size_t(k)];
        return (s.cast<cplx>() * cplx(0, -1)).array().exp().matrix().asDiagonal();
    }
    CMatrix h = CMatrix::Zero(gen.dim(), gen.dim());
    for (Index k = 0; k < gen.size(); ++k) h += theta(k) * gen.ops[size_t(k)];
    return expm_hermitian(h, 1.0);
}

ProbeState encode(const ProbeState& probe, const Generator& gen, const RVector& theta) {
    if (gen.dim() != probe.space.dim()) throw std::invalid_argument("encode: generator dimension mismatch");
    if (theta.size() != gen.size()) throw std::invalid_argument("encode: parameter count mismatch");
    ProbeState out = probe;
    if (gen.is_diagonal()) {
        RVector s = RVector::Zero(gen.dim());
        for (Index k = 0; k < gen.size(); ++k) s += theta(k) * gen.diagonals[size_t(k)];
        const CVector ph = (s.cast<cplx>() * cplx(0, -1)).array().exp();
        if (probe.is_pure()) out.psi = ph.asDiagonal() * probe.psi;
        else out.rho = ph.asDiagonal() * probe.rho * ph.conjugate().asDiagonal();
        return out;
    }
    const CMatrix u = encoding_unitary(gen, theta);
    if (probe.is_pure()) out.psi = u * probe.psi;
    else out.rho = u * probe.rho * u.adjoint();
    return out;
}

ProbeState make_two_photon_state(const std::vector<cplx>& c) {
    if (c.size() != 3) throw std::invalid_argument("make_two_photon_state: needs c_0, c_1, c_2");
    ProbeState p;
    p.space = ModeSpace(3, 2);
    p.psi = CVector::Zero(9);
    for (int k = 0; k <= 2; ++k) p.psi(p.space.index({k, 2 - k})) = c[k];
    p.kind = "two_photon";
    return finish_pure(p);
}

ProbeState lossy_encode(const ProbeState& probe, double eta, double phi) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("lossy_encode: eta must lie in (0, 1]");
    if (probe.space.modes != 2) throw std::invalid_argument("lossy_encode: needs a two-mode probe");
    const ModeSpace& sp = probe.space;
    const int dc = sp.cutoff;
    const CMatrix rho0 = probe.density();
    const CMatrix a = annihilation(sp, 0);
    // eta^{N_1/2} is diagonal
    CVector damp(sp.dim());
    for (Index i = 0; i < sp.dim(); ++i) damp(i) = std::pow(eta, 0.5 * sp.occupation(i)[0]);
    CMatrix rho = CMatrix::Zero(sp.dim(), sp.dim());
    CMatrix al = identity(sp.dim());
    double fact = 1.0;
    for (int l = 0; l < dc; ++l) {
        if (l > 0) {
            al = al * a;
            fact *= double(l);
        }
        const CMatrix k = std::pow(1.0 - eta, 0.5 * l) / std::sqrt(fact) * (damp.asDiagonal() * al);
        rho += k * rho0 * k.adjoint();
    }
    CVector ph(sp.dim());
    for (Index i = 0; i < sp.dim(); ++i) ph(i) = std::exp(cplx(0, -phi * sp.occupation(i)[0]));
    ProbeState out;
    out.space = sp;
    out.rho = ph.asDiagonal() * rho * ph.conjugate().asDiagonal();
    out.kind = probe.kind + "_lossy";
    out.nbar = mean_quanta(out);
    return out;
}

ProbeState make_qubit_network(double gamma, int d) {
    if (d < 2) throw std::invalid_argument("make_qubit_network: d must be >= 2");
    ProbeState p;
    p.space = ModeSpace(2, d);
    const Index dim = p.space.dim();
    p.psi = CVector::Constant(dim, gamma);
    p.psi(0) += 1.0 - gamma;
    p.psi(dim - 1) += 1.0 - gamma;
    p.kind = "qubit_gamma";
    return finish_pure(p);
}

double qubit_network_correlation(double gamma, int d) {
    return (1.0 - gamma * gamma) / (1.0 + (std::pow(2.0, d - 1) - 1.0) * gamma * gamma);
}

ProbeState make_imaging_global(int d, int nbar, double alpha) {
    if (d < 1) throw std::invalid_argument("make_imaging_global: d must be positive");
    if (nbar < 1) throw std::invalid_argument("make_imaging_global: nbar must be a positive integer");
    ProbeState p;
    p.space = ModeSpace(nbar + 1, d + 1);
    p.psi = CVector::Zero(p.space.dim());
    for (int j = 0; j <= d; ++j) {
        std::vector<int> occ(d + 1, 0);
        occ[j] = nbar;
        p.psi(p.space.index(occ)) = j == 0 ? alpha : 1.0;
    }
    p.kind = "imaging_global";
    return finish_pure(p);
}

ProbeState make_imaging_local(int d, double nbar, int big_n) {
    if (big_n < 1) throw std::invalid_argument("make_imaging_local: N must be positive");
    const double q = nbar / (big_n * (d + 1.0));
    if (!(nbar > 0.0) || q > 1.0) throw std::invalid_argument("make_imaging_local: invalid nbar");
    CVector m = CVector::Zero(big_n + 1);
    m(0) = std::sqrt(1.0 - q);
    m(big_n) = std::sqrt(q);
    CVector v = m;
    for (int j = 0; j < d; ++j) v = kron(v, m);
    ProbeState p;
    p.space = ModeSpace(big_n + 1, d + 1);
    p.psi = v;
    p.kind = "imaging_local";
    return finish_pure(p);
}

}  // namespace qm
