#pragma once

#include "qmetro/types.hpp"

namespace qm {

// Linear functions f_j = V(:, j) . theta with diagonal weights wf (trace 1).
struct LinearFunctions {
    RMatrix V;
    RVector wf;
};

// d sensors, per-sensor generator variance v, correlation J = c / v.
struct NetworkSpec {
    int d = 2;
    double v = 0.25;
    double J = 0.0;

    void validate() const;
};

// 4v[(1 - J) I + J 11^T] and its closed-form inverse.
RMatrix qfim_sensor_symmetric(const NetworkSpec& spec);
RMatrix qfim_sensor_symmetric_inverse(const NetworkSpec& spec);

struct Geometry {
    double N = 0.0;  // normalisation, sum_j w_j |f_j|^2
    double G = 0.0;  // geometry parameter in [-1, d - 1]
};
Geometry geometry(const LinearFunctions& funcs, int d);

// [1 + (d - 2 - G) J] / ((1 - J)[1 + (d - 1) J])
double h_factor(double J, double G, int d);

// (N / (4 mu v)) h(J, G, d)
double asymptotic_error(const NetworkSpec& spec, const LinearFunctions& funcs, int mu);

// Correlation minimising h for fixed (G, d).
double j_opt(double G, int d);

// J of the two-qubit state (|00> + gamma |01> + gamma |10> + |11>) family.
inline double j_of_gamma(double gamma) { return (1.0 - gamma * gamma) / (1.0 + gamma * gamma); }
// Positive gamma realising j_opt(G, 2).
double gamma_opt(double G);

// Single-shot imaging bound of N local photons per mode; f and the bound
// (1/nbar^2)(pi^2/3 - f) on the (2 pi / nbar)^d box.
double imaging_local_f(int big_n, double nbar, int d);
double imaging_local_bound(int big_n, double nbar, int d);

// Global strategy with amplitude beta on each sensing mode.
double imaging_global_bound(double nbar, int d, double beta);
double imaging_global_beta_opt(int d);
double imaging_global_bound(double nbar, int d);

}  // namespace qm
