#include "qmetro/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "qmetro/quadrature.hpp"

namespace qm {

namespace {

void require_pure(const ProbeState& probe, const char* who) {
    if (!probe.is_pure())
        throw std::invalid_argument(std::string(who) + ": mixed probe, use qfi_mixed instead");
}

// <K_i K_j> - <K_i><K_j> for a pure state.
RMatrix covariance(const ProbeState& probe, const Generator& gen) {
    const Index d = gen.size();
    RMatrix c(d, d);
    if (gen.is_diagonal()) {
        const RVector pop = probe.psi.cwiseAbs2();
        RVector mean(d);
        for (Index i = 0; i < d; ++i) mean(i) = pop.dot(gen.diagonals[size_t(i)]);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                c(i, j) = pop.dot(gen.diagonals[size_t(i)].cwiseProduct(gen.diagonals[size_t(j)])) - mean(i) * mean(j);
        return c;
    }
    std::vector<CVector> kv;
    for (Index i = 0; i < d; ++i) kv.push_back(gen.ops[size_t(i)] * probe.psi);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            c(i, j) = kv[size_t(i)].dot(kv[size_t(j)]).real() - probe.psi.dot(kv[size_t(i)]).real() *
                                                               probe.psi.dot(kv[size_t(j)]).real();
    return c;
}

}  // namespace

double qfi(const ProbeState& probe, const Generator& gen) {
    require_pure(probe, "qfi");
    if (gen.size() != 1) throw std::invalid_argument("qfi: single generator expected");
    return 4.0 * covariance(probe, gen)(0, 0);
}

RMatrix qfim(const ProbeState& probe, const Generator& gen) {
    require_pure(probe, "qfim");
    return 4.0 * covariance(probe, gen);
}

double qfi_mixed(const ProbeState& probe, const Generator& gen) {
    if (gen.size() != 1) throw std::invalid_argument("qfi_mixed: single generator expected");
    const EigenSystem es = hermitian_eig(probe.density(), 1e-9);
    const CMatrix k = es.vectors.adjoint() * gen.op(0) * es.vectors;
    double f = 0.0;
    for (Index i = 0; i < k.rows(); ++i)
        for (Index j = 0; j < k.cols(); ++j) {
            const double s = es.values(i) + es.values(j);
            if (s > 1e-12) {
                const double dp = es.values(i) - es.values(j);
                f += 2.0 * dp * dp / s * std::norm(k(i, j));
            }
        }
    return f;
}

std::vector<double> lossy_optimal_amplitudes(double eta) {
    const ModeSpace space(3, 2);
    const Generator n1 = number_generators(space, {0});
    auto amps = [](double a, double b) {
        return std::vector<double>{std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b)};
    };
    auto fisher = [&](double a, double b) {
        const auto c = amps(a, b);
        const ProbeState p = make_two_photon_state({c[0], c[1], c[2]});
        return qfi_mixed(lossy_encode(p, eta, 0.0), n1);
    };
    // grid scan on the positive octant, then shrink the window around the best point
    double ba = 0.0, bb = 0.0, best = -1.0, span = 0.5 * kPi;
    double lo_a = 0.0, lo_b = 0.0;
    for (int round = 0; round < 8; ++round) {
        const int n = 24;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const double a = std::clamp(lo_a + span * i / n, 0.0, 0.5 * kPi);
                const double b = std::clamp(lo_b + span * j / n, 0.0, 0.5 * kPi);
                const double f = fisher(a, b);
                if (f > best) best = f, ba = a, bb = b;
            }
        span *= 0.25;
        lo_a = ba - 0.5 * span;
        lo_b = bb - 0.5 * span;
    }
    return amps(ba, bb);
}

RVector classical_fisher(const RMatrix& table, const RVector& grid) {
    const Index n = grid.size();
    if (table.cols() != n) throw std::invalid_argument("classical_fisher: table and grid disagree");
    if (n < 5) throw std::invalid_argument("classical_fisher: at least five grid points");
    const double h = (grid(n - 1) - grid(0)) / double(n - 1);
    auto at = [&](Index j, Index step) {
        double f = 0.0;
        for (Index m = 0; m < table.rows(); ++m) {
            const double p = table(m, j);
            if (p < 1e-12) continue;
            const double dp = (table(m, j + step) - table(m, j - step)) / (2.0 * step * h);
            f += dp * dp / p;
        }
        return f;
    };
    RVector out(n);
    for (Index j = 0; j < n; ++j) {
        const Index jj = std::clamp<Index>(j, 1, n - 2);
        out(j) = at(jj, 1);
        if (j >= 2 && j < n - 2) {
            const double coarse = at(j, 2);
            if (std::abs(coarse - out(j)) > 0.01 * std::max(std::abs(out(j)), 1e-12))
                throw NumericalError("fisher", "grid too coarse for the finite-difference derivative");
        }
    }
    return out;
}

std::vector<RMatrix> classical_fisher(const ProbeState& probe, const Generator& gen, const Pom& pom,
                                      const RMatrix& thetas, double h) {
    const LikelihoodModel model = likelihood_model(probe, gen, pom);
    const Index d = thetas.rows(), n = thetas.cols();
    auto fisher = [&](const RVector& t, double step) {
        const RVector p0 = model.evaluate(RMatrix(t)).col(0);
        RMatrix grad(p0.size(), d);
        for (Index k = 0; k < d; ++k) {
            RMatrix pts(d, 2);
            pts.col(0) = t;
            pts.col(1) = t;
            pts(k, 0) += step;
            pts(k, 1) -= step;
            const RMatrix p = model.evaluate(pts);
            grad.col(k) = (p.col(0) - p.col(1)) / (2.0 * step);
        }
        RMatrix f = RMatrix::Zero(d, d);
        std::vector<Index> zeros;
        for (Index m = 0; m < p0.size(); ++m) {
            if (p0(m) >= 1e-12) f += grad.row(m).transpose() * grad.row(m) / p0(m);
            else zeros.push_back(m);
        }
        if (zeros.empty()) return f;
        // Where p vanishes quadratically, (dp)^2 / p tends to twice its Hessian.
        for (Index k = 0; k < d; ++k)
            for (Index l = k; l < d; ++l) {
                RMatrix pts(d, 4);
                pts.colwise() = t;
                pts(k, 0) += step, pts(l, 0) += step;
                pts(k, 1) += step, pts(l, 1) -= step;
                pts(k, 2) -= step, pts(l, 2) += step;
                pts(k, 3) -= step, pts(l, 3) -= step;
                const RMatrix p = model.evaluate(pts);
                for (Index m : zeros) {
                    const double hkl = (p(m, 0) - p(m, 1) - p(m, 2) + p(m, 3)) / (4.0 * step * step);
                    f(k, l) += 2.0 * hkl;
                    if (l != k) f(l, k) += 2.0 * hkl;
                }
            }
        return f;
    };
    std::vector<RMatrix> out;
    for (Index j = 0; j < n; ++j) {
        const RVector t = thetas.col(j);
        RMatrix f = fisher(t, h);
        const RMatrix g = fisher(t, 0.5 * h);
        if ((f - g).cwiseAbs().maxCoeff() > 0.01 * std::max(f.cwiseAbs().maxCoeff(), 1e-12))
            throw NumericalError("fisher", "finite-difference step is unstable");
        out.push_back(g);
    }
    return out;
}

RVector qcrb_curve(double fq, int mu_max) {
    if (!(fq > 0.0)) throw NumericalError("singular_fisher", "the parameter cannot be estimated with finite precision");
    RVector out(mu_max);
    for (int mu = 1; mu <= mu_max; ++mu) out(mu - 1) = 1.0 / (mu * fq);
    return out;
}

RVector qcrb_curve(const RMatrix& fq, const RMatrix& weights, int mu_max) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (fq + fq.transpose()));
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(top, 1.0))
        throw NumericalError("singular_fisher", "one or more parameters cannot be estimated with finite precision");
    const double tr = (weights * es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose())
                          .trace();
    RVector out(mu_max);
    for (int mu = 1; mu <= mu_max; ++mu) out(mu - 1) = tr / mu;
    return out;
}

std::optional<int> saturation_mu(const std::vector<int>& mu, const RVector& mse, const RVector& crb, double eps) {
    const Index n = Index(mu.size());
    if (mse.size() != n || crb.size() != n) throw std::invalid_argument("saturation_mu: curves differ in length");
    std::optional<int> found;
    for (Index i = n - 1; i >= 0; --i) {
        if (std::abs(mse(i) - crb(i)) / mse(i) > eps) break;
        found = mu[size_t(i)];
    }
    return found;
}

FidelityProfile fidelity_profile(const ProbeState& probe, const Generator& gen, double width, Index points) {
    require_pure(probe, "fidelity_profile");
    if (gen.size() != 1) throw std::invalid_argument("fidelity_profile: single generator expected");
    FidelityProfile f;
    f.theta = linspace(0.0, width, points);
    const SectorDecomposition sec = spectral_sectors(gen);
    const CMatrix parts = sec.components(probe.psi);
    RVector weight(sec.sectors());
    for (Index s = 0; s < sec.sectors(); ++s) weight(s) = parts.col(s).squaredNorm();
    f.amplitude.resize(points);
    f.amplitude_double.resize(points);
    for (Index j = 0; j < points; ++j) {
        cplx a = 0.0, b = 0.0;
        for (Index s = 0; s < sec.sectors(); ++s) {
            a += weight(s) * std::polar(1.0, -sec.eigenvalues(0, s) * f.theta(j));
            b += weight(s) * std::polar(1.0, -2.0 * sec.eigenvalues(0, s) * f.theta(j));
        }
        f.amplitude(j) = a;
        f.amplitude_double(j) = b;
    }
    return f;
}

RVector qzzb(const FidelityProfile& f, double width, int mu_max) {
    const RVector fid = f.values();
    RVector out(mu_max);
    RVector integrand(fid.size());
    for (int mu = 1; mu <= mu_max; ++mu) {
        for (Index j = 0; j < fid.size(); ++j) {
            const double t = f.theta(j);
            const double fm = std::pow(std::min(fid(j), 1.0), mu);
            integrand(j) = 0.5 * t * (1.0 - t / width) * (1.0 - std::sqrt(1.0 - fm));
        }
        out(mu - 1) = trapz(f.theta, integrand);
    }
    return out;
}

double qwwb_at(const FidelityProfile& f, double width, int mu) {
    double best = -1.0;
    for (Index j = 0; j < f.theta.size(); ++j) {
        const double t = f.theta(j);
        const double fid = std::norm(f.amplitude(j));
        const double fm = std::pow(fid, mu);
        const cplx z = std::pow(f.amplitude(j) * f.amplitude(j) * std::conj(f.amplitude_double(j)), mu);
        const double den = 2.0 * fm - 2.0 * (1.0 - 2.0 * t / width) * z.real();
        if (std::abs(den) < 1e-12) continue;
        const double num = t * t * (1.0 - t / width) * (1.0 - t / width) * fm * fm;
        best = std::max(best, num / den);
    }
    if (best < 0.0) throw NumericalError("qwwb", "every grid point was skipped");
    return best;
}

RVector qwwb(const FidelityProfile& f, double width, int mu_max) {
    RVector out(mu_max);
    for (int mu = 1; mu <= mu_max; ++mu) out(mu - 1) = qwwb_at(f, width, mu);
    return out;
}

}  // namespace qm
