#pragma once

#include <vector>

#include "qmetro/priors.hpp"

namespace qm {

// Eigenvalues of rho below this are treated as outside its support.
inline constexpr double kSupportThreshold = 1e-12;

// Prior-averaged state and first moments,
//   rho = int p(theta) rho(theta),  rho_bar_k = int p(theta) theta_k rho(theta),
// stored on the span of the sector projections of the probe, which contains
// the support of every rho(theta). Reduced matrices are r x r.
struct PriorMoments {
    ModeSpace space;
    CMatrix basis;                 // dim x r, orthonormal columns
    RMatrix lambdas;               // parameters x r, generator eigenvalues per column
    CMatrix rho;                   // r x r
    std::vector<CMatrix> rho_bar;  // one r x r matrix per parameter

    Index rank() const { return basis.cols(); }
    // Full-space matrices (small spaces only).
    CMatrix full_rho() const { return basis * rho * basis.adjoint(); }
    CMatrix full_rho_bar(Index k) const { return basis * rho_bar[size_t(k)] * basis.adjoint(); }
};

// Flat-box averages of exp(-i omega theta) and theta exp(-i omega theta).
cplx flat_fourier(double omega, double mean, double width);
cplx flat_fourier_first(double omega, double mean, double width);

// Closed-form moments for a two-mode pure probe and the J_z encoding.
PriorMoments prior_moments_interferometer(const ProbeState& probe, const FlatPrior& prior);
// Same moments for any probe and commuting generators, integrating each
// frequency with Gauss-Legendre nodes (doubled until stable to 1e-6).
PriorMoments prior_moments_generic(const ProbeState& probe, const Generator& gen, const FlatPrior& prior,
                                   int nodes = 200);

struct QuantumEstimator {
    CMatrix basis;               // dim x q, support of rho (eigenvectors, in the full space)
    RVector support_weights;     // eigenvalues of rho on the support
    std::vector<CMatrix> S;      // q x q per parameter, in the support eigenbasis
    double sylvester_residual = 0.0;

    Index parameters() const { return Index(S.size()); }
    CMatrix full_S(Index k) const { return basis * S[size_t(k)] * basis.adjoint(); }
    RVector estimates(Index k) const;
};

QuantumEstimator solve_estimator(const PriorMoments& moments, double support_threshold = kSupportThreshold);

// sum_k w_k [int p theta_k^2 - Tr(rho S_k^2)]
double single_shot_bound(const QuantumEstimator& est, const FlatPrior& prior, const RVector& weights);
double single_shot_bound(const QuantumEstimator& est, const FlatPrior& prior);

// max_{i<j} |[S_i, S_j]|_max
double commutation_check(const QuantumEstimator& est);

// Projective POM on the common eigenbasis of the S_k, closed by the
// complement of the support. Degenerate eigenspaces are split along rho.
// Labels carry the estimates; the completion outcome is labelled by the
// prior means. Requires commuting estimators.
Pom optimal_pom(const QuantumEstimator& est, const ModeSpace& space, const FlatPrior& prior);

// Shot-by-shot bound of a NOON probe measured collectively on mu copies.
double noon_collective_bound(int mu, const FlatPrior& prior, int n = 2);

// var (1 - var F_q) for a narrow prior.
double high_prior_approx_bound(const ProbeState& probe, const Generator& gen, const FlatPrior& prior);

// Classically optimal single-shot error of a fixed POM,
// int p theta^2 - sum_m [int p p(m|theta) theta]^2 / int p p(m|theta).
double classical_single_shot_bound(const ProbeState& probe, const Generator& gen, const Pom& pom,
                                   const FlatPrior& prior, int nodes = 400);

}  // namespace qm
