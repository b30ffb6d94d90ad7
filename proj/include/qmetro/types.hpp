#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qm {

using cplx = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Mat<cplx>;
using CVector = Vec<cplx>;
using RMatrix = Mat<double>;
using RVector = Vec<double>;

// Raised when a numerical invariant breaks (completeness, cutoff, spectrum).
// The CLI maps it to exit status 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& invariant, const std::string& what)
        : std::runtime_error(invariant + ": " + what), invariant_(invariant) {}
    const std::string& invariant() const { return invariant_; }

private:
    std::string invariant_;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace qm
