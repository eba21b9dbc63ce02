#pragma once

#include <complex>
#include <stdexcept>

#include "hhw/model.hpp"

namespace hhw {

/// Raised when the semi-closed-form price is requested outside its validity
/// domain (nonzero rho13 or rho23).
class AnalyticDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a characteristic-function term or the inversion integral is
/// not finite, or the quadrature does not reach its tolerance.
class AnalyticNumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Branch constants of the characteristic function f_j, j in {1, 2}.
struct CharFnContext {
    int j = 1;
    double delta = 0.0;  // 0 for j = 1, 1 for j = 2
    double beta = 0.0;   // kappa - rho sigma1 for j = 1, kappa for j = 2
    double gamma = 0.5;  // +1/2 for j = 1, -1/2 for j = 2
    double alpha = 0.0;  // kappa eta
    double rho = 0.0;    // rho12

    static CharFnContext make(int j, const HHWParams& params);
};

/// Exponent terms of f_j at one frequency y.
struct ComplexEval {
    std::complex<double> d;
    std::complex<double> g;
    std::complex<double> F;
    std::complex<double> G;
    std::complex<double> H;
};

/// Integral of b(l) (1 - exp(-a (T - l))) over l in [tau, T], in closed form.
double b_integral(double tau, double T, const HHWParams& params);

/// Log of the zero-coupon bond price, c(r, tau).
double bond_exponent(double r, double tau, const HHWParams& params, double T);

/// Zero-coupon bond price B(r, tau) = exp(c(r, tau)) for maturity T.
double bond_price(double r, double tau, const HHWParams& params, double T);

/// F_j, G_j, H_j together with d_j and g_j.
///
/// d_j is the square root with nonpositive real part, which keeps
/// exp(d_j (T - tau)) bounded and the logarithm in F_j on its principal sheet.
ComplexEval char_fn_terms(int j, double tau, double y, const HHWParams& params, double T);

/// f_j(x, v, r, tau; y) for x = ln s. Requires y > 0 and tau < T.
std::complex<double> char_fn(int j, double x, double v, double r, double tau, double y,
                             const HHWParams& params, double T);

struct ProbabilityDetail {
    double value = 0.0;   // unclamped inversion result
    double y_cut = 0.0;   // truncation point of the frequency integral
    double error = 0.0;   // quadrature error estimate
    double peak = 0.0;    // largest sampled integrand envelope
    double tail = 0.0;    // integrand envelope at y_cut
};

/// P_j by Fourier inversion, before clamping.
ProbabilityDetail probability_detail(int j, double x, double v, double r, double tau, double K,
                                     const HHWParams& params, double T);

/// P_j in [0, 1].
double probability(int j, double x, double v, double r, double tau, double K,
                   const HHWParams& params, double T);

/// European call value at calendar time tau; maturity and strike from option.
/// Throws AnalyticDomainError when rho13 or rho23 is nonzero.
double call_price(double s, double v, double r, double tau, const HHWParams& params,
                  const OptionSpec& option);

}  // namespace hhw
