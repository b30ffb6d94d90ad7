#include "qmetro/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qmetro/quadrature.hpp"

namespace qm {

FlatPrior::FlatPrior(double mean, double width, Index grid) : means(1), widths(1), grid_points{grid} {
    means(0) = mean;
    widths(0) = width;
    if (!(width > 0.0)) throw std::invalid_argument("FlatPrior: width must be positive");
    if (grid < 3) throw std::invalid_argument("FlatPrior: at least three grid points");
}

FlatPrior::FlatPrior(RVector means_, RVector widths_, Index grid)
    : means(std::move(means_)), widths(std::move(widths_)), grid_points(size_t(means.size()), grid) {
    if (means.size() != widths.size() || means.size() == 0)
        throw std::invalid_argument("FlatPrior: means and widths must have the same positive length");
    if ((widths.array() <= 0.0).any()) throw std::invalid_argument("FlatPrior: widths must be positive");
    if (grid < 3) throw std::invalid_argument("FlatPrior: at least three grid points");
}

RVector FlatPrior::grid(Index k) const { return linspace(lower(k), upper(k), grid_points[size_t(k)]); }

int count_maxima(const RVector& v, Index rows, Index cols, double frac) {
    if (rows * cols != v.size()) throw std::invalid_argument("count_maxima: shape mismatch");
    const double top = v.maxCoeff();
    if (!(top > 0.0)) return 0;
    auto at = [&](Index i, Index j) { return v(i * cols + j); };
    int count = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double x = at(i, j);
            if (x < frac * top) continue;
            bool peak = true;
            for (Index di = -1; di <= 1 && peak; ++di)
                for (Index dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const Index a = i + di, b = j + dj;
                    if (a < 0 || a >= rows || b < 0 || b >= cols) continue;
                    // ties broken towards the earlier index so a plateau counts once
                    const double y = at(a, b);
                    if (y > x || (y == x && a * cols + b < i * cols + j)) {
                        peak = false;
                        break;
                    }
                }
            if (peak) ++count;
        }
    return count;
}

PriorScan prior_scan(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                     const RVector& theta_true, const std::vector<int>& mu_list, std::uint64_t seed) {
    const Index d = prior.dims();
    if (d > 2) throw std::invalid_argument("prior_scan: at most two parameters");
    if (theta_true.size() != d || gen.size() != d) throw std::invalid_argument("prior_scan: parameter count mismatch");
    for (Index k = 0; k < d; ++k)
        if (theta_true(k) < prior.lower(k) || theta_true(k) > prior.upper(k))
            throw std::invalid_argument("prior_scan: true value outside the prior box");
    for (int m : mu_list)
        if (m < 0) throw std::invalid_argument("prior_scan: negative trial count");

    PriorScan out;
    for (Index k = 0; k < d; ++k) out.axes.push_back(prior.grid(k));
    const Index rows = out.axes[0].size(), cols = d == 2 ? out.axes[1].size() : 1;
    RMatrix pts(d, rows * cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            pts(0, i * cols + j) = out.axes[0](i);
            if (d == 2) pts(1, i * cols + j) = out.axes[1](j);
        }
    const LikelihoodModel model = likelihood_model(probe, gen, pom);
    const RMatrix table = model.evaluate(pts);
    const RVector truth = model.evaluate(RMatrix(theta_true)).col(0);
    RVector cdf(truth.size());
    std::partial_sum(truth.data(), truth.data() + truth.size(), cdf.data());

    auto normalize = [&](RVector& post) {
        double norm;
        if (d == 1) {
            norm = trapz(out.axes[0], post);
        } else {
            RVector inner(rows);
            for (Index i = 0; i < rows; ++i) inner(i) = trapz(out.axes[1], RVector(post.segment(i * cols, cols)));
            norm = trapz(out.axes[0], inner);
        }
        if (!(norm >= 1e-16)) throw NumericalError("posterior", "posterior norm underflow");
        post /= norm;
    };

    std::vector<int> order(mu_list.begin(), mu_list.end());
    std::sort(order.begin(), order.end());
    std::mt19937_64 rng(seed);
    RVector post = RVector::Constant(rows * cols, prior.density());
    int done = 0;
    std::vector<RVector> snap;
    for (int target : order) {
        for (; done < target; ++done) {
            const double u = uniform01(rng()) * cdf(cdf.size() - 1);
            const Index m = Index(std::upper_bound(cdf.data(), cdf.data() + cdf.size(), u) - cdf.data());
            post = post.cwiseProduct(RVector(table.row(std::min(m, table.rows() - 1)).transpose()));
            normalize(post);
        }
        snap.push_back(post);
    }
    for (int m : mu_list) {
        const size_t k = size_t(std::lower_bound(order.begin(), order.end(), m) - order.begin());
        out.mu.push_back(m);
        out.posteriors.push_back(snap[k]);
        out.maxima.push_back(count_maxima(snap[k], rows, cols));
    }
    return out;
}

double noon_intrinsic_width(int n) {
    if (n < 1) throw std::invalid_argument("noon_intrinsic_width: N must be positive");
    return n % 2 == 0 ? kPi / n : kPi / (2.0 * n);
}

double worthwhile_repetitions(double prior_variance, double fq) {
    if (!(prior_variance > 0.0) || !(fq > 0.0))
        throw std::invalid_argument("worthwhile_repetitions: inputs must be positive");
    return 1.0 / (prior_variance * fq);
}

double sine_error_prior(double width) {
    if (!(width > 0.0)) throw std::invalid_argument("sine_error_prior: width must be positive");
    return 2.0 * (1.0 - 2.0 / width * std::sin(0.5 * width));
}

}  // namespace qm
