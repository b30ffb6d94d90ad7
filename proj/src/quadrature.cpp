#include "qmetro/quadrature.hpp"

#include <cmath>

namespace qm {

RVector linspace(double a, double b, Index n) {
    if (n < 1) throw std::invalid_argument("linspace: n must be positive");
    RVector x(n);
    if (n == 1) {
        x(0) = b;
        return x;
    }
    // Matlab-style: symmetric construction keeps the end points exact.
    const double h = (b - a) / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) x(i) = a + static_cast<double>(i) * h;
    x(n - 1) = b;
    return x;
}

double trapz(const RVector& x, const RVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapz: size mismatch");
    double s = 0.0;
    for (Index i = 1; i < x.size(); ++i) s += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
    return s;
}

double trapz_uniform(double h, const Eigen::Ref<const RVector>& y) {
    const Index n = y.size();
    if (n < 2) return 0.0;
    return h * (y.sum() - 0.5 * (y(0) + y(n - 1)));
}

double simpson(const RVector& x, const RVector& y) {
    const Index n = x.size();
    if (n != y.size()) throw std::invalid_argument("simpson: size mismatch");
    if (n < 3) throw std::invalid_argument("simpson: needs at least three points");
    const double h = (x(n - 1) - x(0)) / static_cast<double>(n - 1);
    auto simpson_13 = [&](Index i0, Index i1) {  // i1 - i0 even
        double s = y(i0) + y(i1);
        for (Index i = i0 + 1; i < i1; ++i) s += (((i - i0) % 2) ? 4.0 : 2.0) * y(i);
        return s * h / 3.0;
    };
    const Index intervals = n - 1;
    if (intervals % 2 == 0) return simpson_13(0, n - 1);
    if (intervals == 3) return 3.0 * h / 8.0 * (y(0) + 3.0 * y(1) + 3.0 * y(2) + y(3));
    const Index m = n - 4;
    return simpson_13(0, m) + 3.0 * h / 8.0 * (y(m) + 3.0 * y(m + 1) + 3.0 * y(m + 2) + y(m + 3));
}

std::pair<RVector, RVector> gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    RVector x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x(i) = -z;
        x(n - 1 - i) = z;
        w(i) = w(n - 1 - i) = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    return {(x.array() * half + mid).matrix(), w * half};
}

}  // namespace qm
