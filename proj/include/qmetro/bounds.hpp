#pragma once

#include <optional>
#include <vector>

#include "qmetro/measurements.hpp"

namespace qm {

// 4 Var(K) of a pure probe.
double qfi(const ProbeState& probe, const Generator& gen);
// 4 Cov(K_i, K_j) of a pure probe.
RMatrix qfim(const ProbeState& probe, const Generator& gen);
// Symmetric-logarithmic-derivative information of a mixed probe,
// 2 sum_ij (p_i - p_j)^2 / (p_i + p_j) |<i|K|j>|^2 (pure input allowed).
double qfi_mixed(const ProbeState& probe, const Generator& gen);

// Real amplitudes (c_0, c_1, c_2) of sum_k c_k |k, 2-k> maximising qfi_mixed
// for exp(-i N_1 phi) after loss eta in mode 1.
std::vector<double> lossy_optimal_amplitudes(double eta);

// Fisher information of a likelihood table p(m|theta_j) on a uniform grid by
// central differences. Throws when doubling the step moves an interior value
// by more than 1%.
RVector classical_fisher(const RMatrix& table, const RVector& grid);
// Fisher matrices at arbitrary points, differentiating the likelihood model
// with step h and checking the result against h/2.
std::vector<RMatrix> classical_fisher(const ProbeState& probe, const Generator& gen, const Pom& pom,
                                      const RMatrix& thetas, double h = 1e-4);

// 1/(mu F) for mu = 1..mu_max.
RVector qcrb_curve(double fq, int mu_max);
// Tr(W F^-1)/mu; a singular F means some parameter has no finite precision.
RVector qcrb_curve(const RMatrix& fq, const RMatrix& weights, int mu_max);

// Smallest mu from which |mse - crb| / mse <= eps for every later mu.
std::optional<int> saturation_mu(const std::vector<int>& mu, const RVector& mse, const RVector& crb,
                                 double eps = 0.05);

// f(theta) = <psi0|exp(-i K theta)|psi0> on linspace(0, W, points), with f(2 theta) kept for the
// Weiss-Weinstein bound.
struct FidelityProfile {
    RVector theta;
    CVector amplitude;
    CVector amplitude_double;
    RVector values() const { return amplitude.cwiseAbs2(); }
};
FidelityProfile fidelity_profile(const ProbeState& probe, const Generator& gen, double width, Index points = 1000);

RVector qzzb(const FidelityProfile& f, double width, int mu_max);
RVector qwwb(const FidelityProfile& f, double width, int mu_max);
double qwwb_at(const FidelityProfile& f, double width, int mu);

}  // namespace qm
