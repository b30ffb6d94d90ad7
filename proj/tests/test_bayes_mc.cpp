#include "doctest.h"
#include "qmetro/bayes_mc.hpp"
#include "qmetro/estimation.hpp"
#include "qmetro/quadrature.hpp"

#include <cmath>
#include <functional>

using namespace qm;

namespace {

McConfig small_config(Index grid, Index outer, Index samples, int mu_max) {
    McConfig c;
    c.grid_points = grid;
    c.outer_steps = outer;
    c.mc_samples = samples;
    c.mu_max = mu_max;
    c.seed = 7;
    c.threads = 1;
    return c;
}

// Calls visit(counts, multinomial probability) for every way of spreading mu
// trials over the outcomes with probabilities q.
void for_each_count(const RVector& q, int mu, const std::function<void(const std::vector<int>&, double)>& visit) {
    std::vector<int> counts(size_t(q.size()), 0);
    std::function<void(Index, int, double)> rec = [&](Index k, int left, double logw) {
        if (k == q.size() - 1) {
            counts[size_t(k)] = left;
            if (left > 0 && q(k) <= 0.0) return;
            visit(counts, std::exp(logw + (left > 0 ? left * std::log(q(k)) : 0.0) - std::lgamma(left + 1.0)));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            if (c > 0 && q(k) <= 0.0) break;
            counts[size_t(k)] = c;
            rec(k + 1, left - c, logw + (c > 0 ? c * std::log(q(k)) : 0.0) - std::lgamma(c + 1.0));
        }
    };
    rec(0, mu, std::lgamma(mu + 1.0));
}

RVector trapezoid(Index n, double h) {
    RVector w = RVector::Constant(n, h);
    w(0) = w(n - 1) = 0.5 * h;
    return w;
}

// Exact average posterior variance over outcome strings on the engine's
// grid, with true values at the cell midpoints.
double exact_1d(const ProbeState& p, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                const McConfig& c, int mu) {
    const RVector grid = linspace(prior.lower(0), prior.upper(0), c.grid_points);
    const RVector tw = trapezoid(grid.size(), grid(1) - grid(0));
    const RMatrix lik = likelihood_table(p, gen, pom, grid);
    double total = 0.0;
    for (Index j = 0; j < c.outer_steps; ++j) {
        const double truth = prior.lower(0) + (j + 0.5) * prior.widths(0) / double(c.outer_steps);
        const RVector q = likelihood_table(p, gen, pom, RVector(RVector::Constant(1, truth))).col(0);
        for_each_count(q, mu, [&](const std::vector<int>& n, double w) {
            RVector post = RVector::Ones(grid.size());
            for (Index m = 0; m < q.size(); ++m)
                if (n[size_t(m)] > 0) post.array() *= lik.row(m).transpose().array().pow(n[size_t(m)]);
            post /= tw.dot(post);
            const double mean = (tw.array() * grid.array() * post.array()).sum();
            total += w * (tw.array() * (grid.array() - mean).square() * post.array()).sum() / double(c.outer_steps);
        });
    }
    return total;
}

}  // namespace

TEST_CASE("one-parameter engine agrees with exact enumeration") {
    const ProbeState p = make_probe(ProbeKind::noon);
    const Generator gen = interferometer_generator(p.space);
    const Pom pom = catalog_pom(PomName::counting_even, p.space);
    const FlatPrior prior(0.0, kPi / 2);
    const McConfig c = small_config(200, 20, 800, 5);
    const MseCurve curve = mse_curve_1d(p, gen, pom, prior, c);
    for (int mu : {1, 3, 5}) {
        const double exact = exact_1d(p, gen, pom, prior, c, mu);
        CAPTURE(mu);
        CAPTURE(exact);
        CHECK(std::abs(curve.errors(mu - 1) - exact) <= 4 * curve.sigma(mu - 1) + 1e-6);
    }
    CHECK(curve.underflows == 0);
}

TEST_CASE("two-parameter engine agrees with exact enumeration") {
    const ProbeState p = make_qubit_network(1.0, 2);
    const Generator gen = qubit_network_generators(2);
    const Pom pom = catalog_pom(PomName::qubit_local, p.space);
    const FlatPrior prior(RVector::Zero(2), RVector::Constant(2, kPi / 2));
    const FunctionWeights fw{RMatrix::Identity(2, 2), RVector::Constant(2, 0.5)};
    McConfig c = small_config(41, 9, 300, 2);
    const MseCurve curve = mse_curve_2d(p, gen, pom, prior, fw, c);

    const Index n = c.grid_points, k = c.outer_steps;
    const RVector g = linspace(prior.lower(0), prior.upper(0), n), o = linspace(prior.lower(0), prior.upper(0), k);
    const double h = g(1) - g(0);
    const RVector t = trapezoid(n, h);
    RMatrix pts(2, n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) pts.col(i * n + j) << g(i), g(j);
    const RMatrix lik = likelihood_table(p, gen, pom, pts);
    RVector ow(k);
    for (Index a = 0; a < k; ++a) {
        RVector e = RVector::Zero(k);
        e(a) = 1.0;
        ow(a) = simpson(o, e);
    }
    for (int mu : {1, 2}) {
        double total = 0.0;
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b) {
                const Index ia = Index(std::ceil((o(a) - g(0)) / h - 1e-9));
                const Index ib = Index(std::ceil((o(b) - g(0)) / h - 1e-9));
                const RVector q = lik.col(ia * n + ib);
                for_each_count(q, mu, [&](const std::vector<int>& cnt, double w) {
                    double z = 0, m1 = 0, m2 = 0, s11 = 0, s22 = 0;
                    RMatrix post(n, n);
                    for (Index i = 0; i < n; ++i)
                        for (Index j = 0; j < n; ++j) {
                            double v = t(i) * t(j);
                            for (Index m = 0; m < q.size(); ++m) v *= std::pow(lik(m, i * n + j), cnt[size_t(m)]);
                            post(i, j) = v;
                            z += v;
                            m1 += v * g(i);
                            m2 += v * g(j);
                        }
                    m1 /= z;
                    m2 /= z;
                    for (Index i = 0; i < n; ++i)
                        for (Index j = 0; j < n; ++j) {
                            s11 += post(i, j) * (g(i) - m1) * (g(i) - m1) / z;
                            s22 += post(i, j) * (g(j) - m2) * (g(j) - m2) / z;
                        }
                    total += ow(a) * ow(b) * prior.density() * w * 0.5 * (s11 + s22);
                });
            }
        CAPTURE(mu);
        CAPTURE(total);
        CHECK(std::abs(curve.errors(mu - 1) - total) <= 4 * curve.sigma(mu - 1) + 1e-6);
    }
}

TEST_CASE("deterministic and independent of the thread count") {
    const ProbeState p = make_probe(ProbeKind::coherent);
    const Generator gen = interferometer_generator(p.space);
    const Pom pom = catalog_pom(PomName::counting_odd, p.space);
    const FlatPrior prior(0.0, kPi / 2);
    McConfig c = small_config(120, 12, 50, 6);
    const MseCurve a = mse_curve_1d(p, gen, pom, prior, c);
    const MseCurve b = mse_curve_1d(p, gen, pom, prior, c);
    c.threads = 3;
    const MseCurve d = mse_curve_1d(p, gen, pom, prior, c);
    CHECK(a.errors == b.errors);
    CHECK(a.sigma == b.sigma);
    CHECK((a.errors - d.errors).cwiseAbs().maxCoeff() <= 1e-12);
    c.seed = 8;
    CHECK(mse_curve_1d(p, gen, pom, prior, c).errors != a.errors);

    CHECK(task_seed(1, 2, 3) == task_seed(1, 2, 3));
    CHECK(task_seed(1, 2, 3) != task_seed(1, 3, 2));
    CHECK(task_seed(1, 2, 3) != task_seed(2, 2, 3));
}

TEST_CASE("uninformative generator leaves the prior untouched") {
    const ProbeState p = make_probe(ProbeKind::coherent);
    const Generator none = Generator::from_diagonals({RVector::Zero(p.space.dim())});
    const Pom pom = catalog_pom(PomName::counting_odd, p.space);
    const double w = 1.3;
    const FlatPrior prior(0.4, w);
    const McConfig c = small_config(1250, 5, 2, 3);
    const MseCurve e = mse_curve_1d(p, none, pom, prior, c);
    const MseCurve t = taylor_error_curve(p, none, pom, prior, c);
    for (Index i = 0; i < 3; ++i) {
        CHECK(e.errors(i) == doctest::Approx(w * w / 12).epsilon(1e-5));
        CHECK(t.errors(i) == doctest::Approx(std::pow(w, 4) / 960).epsilon(1e-5));
        CHECK(e.sigma(i) <= 1e-15);
    }
}

TEST_CASE("single trial reproduces the noon value and the single-shot bound") {
    const ProbeState p = make_probe(ProbeKind::noon);
    const Generator gen = interferometer_generator(p.space);
    const FlatPrior prior(0.0, kPi / 2);
    const McConfig c = small_config(1250, 125, 300, 1);
    const MseCurve curve = mse_curve_1d(p, gen, catalog_pom(PomName::counting_even, p.space), prior, c);
    CHECK(std::abs(curve.errors(0) - 0.104) <= 2e-3);
    const double bound = single_shot_bound(solve_estimator(prior_moments_interferometer(p, prior)), prior);
    CHECK(std::abs(curve.errors(0) - bound) <= 3 * curve.sigma(0) + 1e-5);
}

TEST_CASE("errors decrease and stay below the prior variance") {
    const ProbeState p = make_probe(ProbeKind::coherent);
    const Generator gen = interferometer_generator(p.space);
    const Pom pom = catalog_pom(PomName::undo_count_coherent, p.space);
    const FlatPrior prior(0.0, kPi / 2);
    const McConfig c = small_config(500, 50, 300, 10);
    const MseCurve curve = mse_curve_1d(p, gen, pom, prior, c);
    for (Index i = 0; i < curve.errors.size(); ++i) {
        CHECK(curve.errors(i) >= 0.0);
        CHECK(curve.errors(i) <= prior.variance(0) + 3 * curve.sigma(i));
        if (i > 0) CHECK(curve.errors(i) <= curve.errors(i - 1) + 3 * (curve.sigma(i) + curve.sigma(i - 1)));
    }
    CHECK(std::abs(curve.errors(9) - 3.74e-2) <= 8e-4 + 3 * curve.sigma(9));

    const MseCurve t = taylor_error_curve(p, gen, pom, prior, c);
    CHECK((t.errors.array() >= 0.0).all());
}

TEST_CASE("precision self-check shrinks with the sample count") {
    const ProbeState p = make_probe(ProbeKind::coherent);
    const Generator gen = interferometer_generator(p.space);
    const Pom pom = catalog_pom(PomName::counting_odd, p.space);
    const FlatPrior prior(0.3, kPi / 2);
    std::vector<double> sig;
    for (Index samples : {50, 200, 800}) {
        McConfig c = small_config(250, 25, samples, 4);
        const SelfCheck sc = precision_self_check(p, gen, pom, prior, c);
        CHECK(sc.exact == doctest::Approx(0.09 + kPi * kPi / 48));
        for (Index i = 0; i < sc.defect.size(); ++i) CHECK(sc.defect(i) <= 4 * sc.sigma(i) + 2e-4);
        sig.push_back(sc.sigma.maxCoeff());
    }
    CHECK(sig[1] / sig[0] == doctest::Approx(0.5).epsilon(0.3));
    CHECK(sig[2] / sig[1] == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("configuration validation") {
    McConfig c;
    CHECK_NOTHROW(c.validate(1));
    c.outer_steps = 2;
    CHECK_THROWS(c.validate(1));
    c.outer_steps = 126;
    CHECK_THROWS(c.validate(1));
    CHECK_NOTHROW(McConfig::defaults_2d().validate(2));
    c = McConfig{};
    c.mu_max = 0;
    CHECK_THROWS(c.validate(1));
    c.mu_max = 10;
    c.mu_eval = {3, 1, 3, 10};
    CHECK(c.report_points() == std::vector<int>{1, 3, 10});
    c.mu_eval = {11};
    CHECK_THROWS(c.report_points());

    const ProbeState p = make_qubit_network(1.0, 2);
    const FlatPrior prior(RVector::Zero(2), RVector::Constant(2, 1.0));
    CHECK_THROWS(mse_curve_1d(p, qubit_network_generators(2), catalog_pom(PomName::qubit_local, p.space), prior,
                              McConfig{}));
}
