#include "qmetro/networks.hpp"

#include <cmath>

namespace qm {

void NetworkSpec::validate() const {
    if (d < 2) throw std::invalid_argument("network: at least two sensors");
    if (!(v > 0.0)) throw std::invalid_argument("network: variance must be positive");
    if (!(J > 1.0 / (1.0 - d) && J < 1.0))
        throw NumericalError("singular_fisher", "correlation outside the open interval (1/(1-d), 1)");
}

RMatrix qfim_sensor_symmetric(const NetworkSpec& spec) {
    spec.validate();
    const Index d = spec.d;
    return 4.0 * spec.v * ((1.0 - spec.J) * RMatrix::Identity(d, d) + spec.J * RMatrix::Ones(d, d));
}

RMatrix qfim_sensor_symmetric_inverse(const NetworkSpec& spec) {
    spec.validate();
    const Index d = spec.d;
    const double top = 1.0 + (d - 1) * spec.J;
    return (top * RMatrix::Identity(d, d) - spec.J * RMatrix::Ones(d, d)) / (4.0 * spec.v * (1.0 - spec.J) * top);
}

Geometry geometry(const LinearFunctions& funcs, int d) {
    if (funcs.V.rows() != d || funcs.V.cols() != funcs.wf.size())
        throw std::invalid_argument("geometry: V must be d x l with l weights");
    Geometry g;
    double acc = 0.0;
    for (Index j = 0; j < funcs.V.cols(); ++j) {
        const double norm2 = funcs.V.col(j).squaredNorm();
        const double s = funcs.V.col(j).sum();
        g.N += funcs.wf(j) * norm2;
        // |f|^2 (d cos^2 phi - 1) with cos^2 phi = (f . 1)^2 / (|f|^2 d)
        acc += funcs.wf(j) * (s * s - norm2);
    }
    if (!(g.N > 0.0)) throw std::invalid_argument("geometry: all functions vanish");
    g.G = acc / g.N;
    return g;
}

double h_factor(double J, double G, int d) {
    return (1.0 + (d - 2 - G) * J) / ((1.0 - J) * (1.0 + (d - 1) * J));
}

double asymptotic_error(const NetworkSpec& spec, const LinearFunctions& funcs, int mu) {
    spec.validate();
    if (mu < 1) throw std::invalid_argument("asymptotic_error: mu must be positive");
    const Geometry g = geometry(funcs, spec.d);
    return g.N / (4.0 * mu * spec.v) * h_factor(spec.J, g.G, spec.d);
}

double j_opt(double G, int d) {
    if (d < 2) throw std::invalid_argument("j_opt: at least two sensors");
    if (!(G > -1.0 && G < d - 1.0)) throw std::invalid_argument("j_opt: G must lie in (-1, d - 1)");
    const double den = G + 2.0 - d;
    if (std::abs(den) < 1e-9) return (d - 2.0) / (2.0 * (d - 1.0));
    return (1.0 - std::sqrt((G + 1.0) * (d - 1.0 - G) / (d - 1.0))) / den;
}

double gamma_opt(double G) {
    if (!(G > -1.0 && G < 1.0)) throw std::invalid_argument("gamma_opt: G must lie in (-1, 1)");
    if (std::abs(G) < 1e-12) return 1.0;
    const double r = std::sqrt(1.0 - G * G);
    return std::sqrt((G - 1.0 + r) / (G + 1.0 - r));
}

double imaging_local_f(int big_n, double nbar, int d) {
    if (big_n <= 0) throw std::invalid_argument("imaging: N must be positive");
    const double n = big_n, x = n * kPi / nbar;
    const double bracket = n * kPi * std::cos(x) - nbar * std::sin(x);
    return 4.0 * std::pow(nbar, 3) * ((1.0 + d) * n - nbar) * bracket * bracket /
           (kPi * kPi * std::pow(n, 6) * (1.0 + d) * (1.0 + d));
}

double imaging_local_bound(int big_n, double nbar, int d) {
    return (kPi * kPi / 3.0 - imaging_local_f(big_n, nbar, d)) / (nbar * nbar);
}

double imaging_global_bound(double nbar, int d, double beta) {
    if (!(beta > 0.0 && beta < 1.0 / std::sqrt(double(d))))
        throw std::invalid_argument("imaging: beta must lie in (0, 1/sqrt(d))");
    const double b2 = beta * beta;
    return (kPi * kPi / 3.0 - 4.0 * b2 * (1.0 - d * b2) / (1.0 + b2 * (1.0 - d))) / (nbar * nbar);
}

double imaging_global_beta_opt(int d) { return 1.0 / std::sqrt(d + std::sqrt(double(d))); }

double imaging_global_bound(double nbar, int d) {
    return imaging_global_bound(nbar, d, imaging_global_beta_opt(d));
}

}  // namespace qm
