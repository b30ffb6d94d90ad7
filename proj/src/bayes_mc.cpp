#include "qmetro/bayes_mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "qmetro/quadrature.hpp"

namespace qm {

namespace {

constexpr double kUnderflow = 1e-16;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Scores a normalised posterior (density values on the grid).
using Score = std::function<double(const RVector&)>;

struct Problem {
    RMatrix lik;                   // grid points x outcomes
    RVector tw;                    // quadrature weights of the posterior grid
    std::vector<RVector> cdf;      // per true value, cumulative outcome probabilities
    RVector outer_weights;         // prior-weighted outer quadrature weights
};

struct Accumulated {
    RVector mean;   // per report point
    RVector sigma;  // standard error of the weighted sum
    long long underflows = 0;
};

Accumulated run(const Problem& pb, const Score& score, const McConfig& cfg) {
    const std::vector<int> report = cfg.report_points();
    const Index outer = Index(pb.cdf.size()), nr = Index(report.size()), n = cfg.mc_samples;
    RMatrix mean = RMatrix::Zero(outer, nr), var = RMatrix::Zero(outer, nr);
    std::atomic<long long> underflows{0};
    std::atomic<Index> next{0};

    auto worker = [&]() {
        RVector p(pb.lik.rows());
        for (Index k = next++; k < outer; k = next++) {
            const RVector& cdf = pb.cdf[size_t(k)];
            const double total = cdf(cdf.size() - 1);
            // Welford per report point keeps the variance stable.
            RVector wm = RVector::Zero(nr), ws = RVector::Zero(nr);
            for (Index s = 0; s < n; ++s) {
                std::mt19937_64 rng(task_seed(cfg.seed, std::uint64_t(k), std::uint64_t(s)));
                p.setOnes();
                bool zeroed = false;
                Index r = 0;
                for (int t = 1; t <= report.back(); ++t) {
                    if (!zeroed) {
                        const double u = uniform01(rng()) * total;
                        const Index m = Index(std::upper_bound(cdf.data(), cdf.data() + cdf.size(), u) - cdf.data());
                        p.array() *= pb.lik.col(std::min(m, cdf.size() - 1)).array();
                        const double norm = pb.tw.dot(p);
                        if (norm <= kUnderflow) {
                            p.setZero();
                            zeroed = true;
                            ++underflows;
                        } else {
                            p /= norm;
                        }
                    }
                    if (t == report[size_t(r)]) {
                        const double v = zeroed ? 0.0 : score(p);
                        const double delta = v - wm(r);
                        wm(r) += delta / double(s + 1);
                        ws(r) += delta * (v - wm(r));
                        ++r;
                    }
                }
            }
            mean.row(k) = wm.transpose();
            var.row(k) = (ws / double(std::max<Index>(n - 1, 1))).transpose();
        }
    };

    int threads = cfg.threads > 0 ? cfg.threads : int(std::max(1u, std::thread::hardware_concurrency()));
    threads = int(std::min<Index>(threads, outer));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduction in fixed outer order, independent of scheduling.
    Accumulated out;
    out.mean = RVector::Zero(nr);
    out.sigma = RVector::Zero(nr);
    for (Index k = 0; k < outer; ++k) {
        const double w = pb.outer_weights(k);
        out.mean += w * mean.row(k).transpose();
        out.sigma += w * w * var.row(k).transpose();
    }
    out.sigma = (out.sigma / double(n)).cwiseSqrt();
    out.underflows = underflows;
    return out;
}

std::vector<RVector> cumulative(const RMatrix& table) {
    std::vector<RVector> cdf;
    for (Index j = 0; j < table.cols(); ++j) {
        RVector c(table.rows());
        std::partial_sum(table.col(j).data(), table.col(j).data() + table.rows(), c.data());
        cdf.push_back(c);
    }
    return cdf;
}

RVector trapz_weights(Index n, double h) {
    RVector w = RVector::Constant(n, h);
    w(0) = w(n - 1) = 0.5 * h;
    return w;
}

// Weights reproducing simpson(x, y) as w . y.
RVector simpson_weights(const RVector& x) {
    RVector w(x.size()), e = RVector::Zero(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        e(i) = 1.0;
        w(i) = simpson(x, e);
        e(i) = 0.0;
    }
    return w;
}

// One-parameter problem on the prior grid with true values at the centres of
// outer_steps equal cells.
Problem problem_1d(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                   const McConfig& cfg, RVector& grid) {
    if (prior.dims() != 1 || gen.size() != 1) throw std::invalid_argument("bayes_mc: single parameter expected");
    cfg.validate(1);
    const LikelihoodModel model = likelihood_model(probe, gen, pom);
    grid = linspace(prior.lower(0), prior.upper(0), cfg.grid_points);
    Problem pb;
    pb.lik = model.evaluate(RMatrix(grid.transpose())).transpose();
    pb.tw = trapz_weights(grid.size(), grid(1) - grid(0));
    const Index k = cfg.outer_steps;
    const double cell = prior.widths(0) / double(k);
    RMatrix outer(1, k);
    for (Index j = 0; j < k; ++j) outer(0, j) = prior.lower(0) + (double(j) + 0.5) * cell;
    pb.cdf = cumulative(model.evaluate(outer));
    pb.outer_weights = RVector::Constant(k, 1.0 / double(k));
    return pb;
}

MseCurve curve_from(const Accumulated& acc, const McConfig& cfg) {
    MseCurve c;
    c.mu = cfg.report_points();
    c.errors = acc.mean;
    c.sigma = acc.sigma;
    c.config = cfg;
    c.underflows = acc.underflows;
    return c;
}

}  // namespace

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t outer, std::uint64_t sample) {
    return splitmix(splitmix(splitmix(seed) ^ outer) ^ (sample * 0xd1b54a32d192ed03ULL));
}

McConfig McConfig::defaults_2d() {
    McConfig c;
    c.grid_points = 100;
    c.outer_steps = 20;
    c.mc_samples = 200;
    return c;
}

std::vector<int> McConfig::report_points() const {
    if (mu_max < 1) throw std::invalid_argument("mu_max must be at least 1");
    if (mu_eval.empty()) {
        std::vector<int> all(static_cast<size_t>(mu_max));
        std::iota(all.begin(), all.end(), 1);
        return all;
    }
    std::vector<int> pts = mu_eval;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.front() < 1 || pts.back() > mu_max) throw std::invalid_argument("mu_eval outside 1..mu_max");
    return pts;
}

void McConfig::validate(int dims) const {
    if (grid_points < 3) throw std::invalid_argument("grid_points must be at least 3");
    if (mc_samples < 2) throw std::invalid_argument("mc_samples must be at least 2");
    if (outer_steps < 3) throw std::invalid_argument("outer_steps must be at least 3");
    if (dims == 1 && grid_points % outer_steps != 0)
        throw std::invalid_argument("grid_points must be divisible by outer_steps");
    report_points();
}

MseCurve mse_curve_1d(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                      const McConfig& config) {
    RVector grid;
    const Problem pb = problem_1d(probe, gen, pom, prior, config, grid);
    const RVector a1 = pb.tw.cwiseProduct(grid);
    const Score variance = [&](const RVector& p) {
        const double m = a1.dot(p);
        return (pb.tw.array() * (grid.array() - m).square() * p.array()).sum();
    };
    return curve_from(run(pb, variance, config), config);
}

MseCurve taylor_error_curve(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                            const McConfig& config) {
    RVector grid;
    const Problem pb = problem_1d(probe, gen, pom, prior, config, grid);
    const RVector a1 = pb.tw.cwiseProduct(grid);
    const Score fourth = [&](const RVector& p) {
        const double m = a1.dot(p);
        return (pb.tw.array() * (grid.array() - m).square().square() * p.array()).sum() / 12.0;
    };
    return curve_from(run(pb, fourth, config), config);
}

SelfCheck precision_self_check(const ProbeState& probe, const Generator& gen, const Pom& pom,
                               const FlatPrior& prior, const McConfig& config) {
    RVector grid;
    const Problem pb = problem_1d(probe, gen, pom, prior, config, grid);
    const RVector a2 = pb.tw.cwiseProduct(grid.cwiseAbs2());
    const Score second = [&](const RVector& p) { return a2.dot(p); };
    const Accumulated acc = run(pb, second, config);
    SelfCheck sc;
    sc.mu = config.report_points();
    sc.exact = prior.second_moment(0);
    sc.defect = (acc.mean.array() - sc.exact).abs() / sc.exact;
    sc.sigma = acc.sigma / sc.exact;
    return sc;
}

MseCurve mse_curve_2d(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                      const FunctionWeights& weights, const McConfig& config) {
    if (prior.dims() != 2 || gen.size() != 2) throw std::invalid_argument("mse_curve_2d: two parameters expected");
    if (weights.V.rows() != 2 || weights.V.cols() != weights.wf.size())
        throw std::invalid_argument("mse_curve_2d: function weights have the wrong shape");
    config.validate(2);
    const RMatrix G = weights.G();
    const LikelihoodModel model = likelihood_model(probe, gen, pom);
    const Index n = config.grid_points, k = config.outer_steps;
    const RVector g1 = linspace(prior.lower(0), prior.upper(0), n);
    const RVector g2 = linspace(prior.lower(1), prior.upper(1), n);

    // Flattened grid, second parameter fastest.
    RMatrix pts(2, n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) pts.col(i * n + j) << g1(i), g2(j);
    Problem pb;
    const RMatrix table = model.evaluate(pts);
    pb.lik = table.transpose();
    const RVector t1 = trapz_weights(n, g1(1) - g1(0)), t2 = trapz_weights(n, g2(1) - g2(0));
    pb.tw.resize(n * n);
    for (Index i = 0; i < n; ++i) pb.tw.segment(i * n, n) = t1(i) * t2;

    // True values: first grid points at or above a uniform outer grid.
    const RVector o1 = linspace(prior.lower(0), prior.upper(0), k);
    const RVector o2 = linspace(prior.lower(1), prior.upper(1), k);
    auto snap = [n](const RVector& g, double x) {
        const double tol = 1e-12 * std::max(1.0, std::abs(x));
        Index i = 0;
        while (i < n - 1 && g(i) < x - tol) ++i;
        return i;
    };
    const RVector s1 = simpson_weights(o1), s2 = simpson_weights(o2);
    RMatrix truth(table.rows(), k * k);
    pb.outer_weights.resize(k * k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            truth.col(a * k + b) = table.col(snap(g1, o1(a)) * n + snap(g2, o2(b)));
            pb.outer_weights(a * k + b) = s1(a) * s2(b) * prior.density();
        }
    pb.cdf = cumulative(truth);

    RVector x1(n * n), x2(n * n);
    for (Index i = 0; i < n; ++i) {
        x1.segment(i * n, n).setConstant(g1(i));
        x2.segment(i * n, n) = g2;
    }
    const Score weighted = [&](const RVector& p) {
        const RVector w = pb.tw.cwiseProduct(p);
        const double m1 = w.dot(x1), m2 = w.dot(x2);
        const auto d1 = x1.array() - m1, d2 = x2.array() - m2;
        const double c11 = (w.array() * d1.square()).sum();
        const double c22 = (w.array() * d2.square()).sum();
        const double c12 = (w.array() * d1 * d2).sum();
        return G(0, 0) * c11 + G(1, 1) * c22 + 2.0 * G(0, 1) * c12;
    };
    return curve_from(run(pb, weighted, config), config);
}

}  // namespace qm
