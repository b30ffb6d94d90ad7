#pragma once

#include <cstdint>
#include <vector>

#include "qmetro/measurements.hpp"

namespace qm {

// Uniform density on the box prod_k [mean_k - W_k/2, mean_k + W_k/2].
struct FlatPrior {
    RVector means;
    RVector widths;
    std::vector<Index> grid_points;  // per axis, used by grid-based routines

    FlatPrior() = default;
    FlatPrior(double mean, double width, Index grid = 1000);
    FlatPrior(RVector means, RVector widths, Index grid = 200);

    Index dims() const { return means.size(); }
    double lower(Index k) const { return means(k) - 0.5 * widths(k); }
    double upper(Index k) const { return means(k) + 0.5 * widths(k); }
    double density() const { return 1.0 / widths.prod(); }
    double variance(Index k) const { return widths(k) * widths(k) / 12.0; }
    double second_moment(Index k) const { return means(k) * means(k) + variance(k); }
    // Square error is a good proxy of the periodic sine error for W <= 2.
    bool square_error_valid() const { return (widths.array() <= 2.0).all(); }
    RVector grid(Index k) const;
};

// Posterior snapshots of a simulated run with a fixed true value.
struct PriorScan {
    std::vector<RVector> axes;         // grid per parameter
    std::vector<int> mu;               // requested trial counts
    std::vector<RVector> posteriors;   // flattened, last axis fastest
    std::vector<int> maxima;           // local maxima above half the global one
};

PriorScan prior_scan(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                     const RVector& theta_true, const std::vector<int>& mu_list, std::uint64_t seed);

// Local maxima (8-neighbourhood in 2-D) whose height exceeds frac * max.
int count_maxima(const RVector& values, Index rows, Index cols, double frac = 0.5);

// pi/N for even N, pi/(2N) for odd N.
double noon_intrinsic_width(int n);

// Lower bound on the trials needed before the Fisher regime: 1/(var F_q).
double worthwhile_repetitions(double prior_variance, double fq);

// Flat-prior sine error 2(1 - (2/W) sin(W/2)) at zero trials.
double sine_error_prior(double width);

// Uniform draw in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

}  // namespace qm
