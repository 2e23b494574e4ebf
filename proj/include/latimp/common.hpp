// common.hpp — shared constants, aliases and error types
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace latimp {

using Complex = std::complex<double>;

// Natural units: lambda = 1, gamma_L = 1, c = 1. All lengths are in units of
// the transition wavelength, all rates in units of the lattice linewidth.
inline constexpr double kOmega = 2.0 * std::numbers::pi;
inline constexpr double kGammaL = 1.0;

// Raised when linear algebra or an integration breaks down at runtime
// (as opposed to an invalid configuration).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lattice block is singular to working precision at this detuning.
class ResonanceError : public NumericalError {
public:
    ResonanceError(double delta, const std::string& what)
        : NumericalError(what), delta_(delta) {}
    double delta() const noexcept { return delta_; }

private:
    double delta_;
};

}  // namespace latimp
