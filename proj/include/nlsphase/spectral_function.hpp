#pragma once

#include <complex>
#include <vector>

#include "nlsphase/polynomial.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

using cplx = std::complex<double>;

// Piece of a derivative: f'(lambda0 + c1 y) = p(y) for y in [0,1].
struct PolyPiece {
    double lambda0;
    double c1;
    Polynomial p;
};

// Bounded function with limits at +-infinity whose derivative is a finite sum
// of polynomial pieces. Covers the smooth characteristic functions and the
// functions built from them by reflection, scaling, sums and derivatives.
class SpectralFunction {
public:
    SpectralFunction() = default;
    SpectralFunction(double lim_minus, double lim_plus, std::vector<PolyPiece> pieces);

    static SpectralFunction constant(double c) { return {c, c, {}}; }
    static SpectralFunction from_cutoff(const Cutoff& c);
    // lambda W(lambda) for a window W = F(a <= lambda <= b).
    static SpectralFunction lambda_times_window(const Cutoff& window);

    double lim_minus() const { return lim_minus_; }
    double lim_plus() const { return lim_plus_; }
    double mean() const { return 0.5 * (lim_minus_ + lim_plus_); }
    const std::vector<PolyPiece>& pieces() const { return pieces_; }

    double operator()(double lambda) const;
    // k-th derivative, k >= 0.
    double derivative(double lambda, int k) const;

    SpectralFunction reflect() const;           // lambda -> f(-lambda)
    SpectralFunction scaled(double tau) const;  // lambda -> f(lambda / tau)
    SpectralFunction prime() const;             // f'
    SpectralFunction lambda_prime() const;      // lambda f'(lambda)
    SpectralFunction operator+(const SpectralFunction& o) const;
    SpectralFunction operator-(const SpectralFunction& o) const;
    SpectralFunction operator*(double s) const;

    // (1/2pi) int f'(lambda) e^{-i lambda s} d lambda.
    cplx derivative_transform(double s) const;
    // Transform of f - mean: derivative_transform(s) / (i s), s != 0.
    cplx decaying_transform(double s) const;
    // Rigorous bound of |derivative_transform(s)| for large |s|.
    double transform_envelope(double s) const;
    // Smallest S with int_{|s|>S} |decaying_transform| <= tol (envelope based).
    double window_for_tail(double tol) const;
    // Largest |lambda| where f' is supported.
    double support_radius() const;
    // int |decaying_transform(s)| |s|^n ds over |s| <= S, midpoint rule.
    double transform_moment(int n, double S, std::size_t nodes) const;

    // Sum over breakpoints of |jump of f^{(k+1)}|, k = 0, 1, ...
    std::vector<double> jump_magnitudes() const;

private:
    double lim_minus_ = 0.0;
    double lim_plus_ = 0.0;
    std::vector<PolyPiece> pieces_;
};

// int_0^1 p(y) e^{-i w y} dy
cplx poly_fourier(const Polynomial& p, double w);

}  // namespace nlsphase
