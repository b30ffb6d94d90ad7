#pragma once

#include <cstdint>
#include <vector>

#include "qmetro/priors.hpp"

namespace qm {

struct McConfig {
    Index grid_points = 1250;  // posterior grid per axis
    Index outer_steps = 125;   // true values per axis
    Index mc_samples = 1250;   // simulated outcome strings per true value
    std::uint64_t seed = 1;
    int mu_max = 100;
    std::vector<int> mu_eval;  // trial counts to report; empty means 1..mu_max
    int threads = 0;           // 0 means hardware concurrency

    static McConfig defaults_2d();
    std::vector<int> report_points() const;
    void validate(int dims) const;
};

struct MseCurve {
    std::vector<int> mu;
    RVector errors;
    RVector sigma;  // Monte-Carlo standard error
    McConfig config;
    long long underflows = 0;  // posteriors zeroed after a norm below 1e-16
};

// Weighted linear functions f_j = V(:, j) . theta, with G = V Wf V^T.
struct FunctionWeights {
    RMatrix V;
    RVector wf;

    RMatrix G() const { return V * wf.asDiagonal() * V.transpose(); }
};

// Mean square error of the Bayesian posterior-mean estimator after mu
// trials, averaged over outcome strings and over the prior. The outer
// prior integral uses a rectangle rule with one true value at the centre of
// each of outer_steps equal cells.
MseCurve mse_curve_1d(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                      const McConfig& config);

// Two-parameter version scoring G11 S11 + G22 S22 + 2 G12 S12 of the
// posterior covariance. True values are the first posterior-grid points at
// or above a uniform outer grid, integrated with Simpson's rule.
MseCurve mse_curve_2d(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                      const FunctionWeights& weights, const McConfig& config);

// (1/12) of the fourth central posterior moment, averaged like the error.
MseCurve taylor_error_curve(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                            const McConfig& config);

// |nested estimate of int p theta^2 - exact| / exact at each reported mu.
struct SelfCheck {
    std::vector<int> mu;
    RVector defect;
    RVector sigma;  // Monte-Carlo standard error
    double exact = 0.0;
    double max_defect() const { return defect.cwiseAbs().maxCoeff(); }
};
SelfCheck precision_self_check(const ProbeState& probe, const Generator& gen, const Pom& pom, const FlatPrior& prior,
                               const McConfig& config);

// Stream seed for one simulated string; independent of scheduling.
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t outer, std::uint64_t sample);

}  // namespace qm
