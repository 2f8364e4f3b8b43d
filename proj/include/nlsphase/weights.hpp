#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlsphase/polynomial.hpp"

namespace nlsphase {

// Nonnegative profile supported in (1,2) with unit integral.
struct Bump {
    std::function<double(double)> value;
    // Optional closed-form derivatives; central differences otherwise.
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

// Normalized exp(-1/(x-1) - 1/(2-x)) on (1,2).
Bump standard_bump();

struct WeightDerivs {
    double g;
    double g1;
    double delta_g;
    double delta2_g;
    double radial_gij;
};

// <x> = beta(|x|): beta = C on [0,1], beta'' = bump on [1,2], beta = r on [2,inf).
class SmoothWeight {
public:
    static SmoothWeight build(const Bump& bump);

    double beta(double r) const;
    double d1(double r) const;
    double d2(double r) const;
    double d3(double r) const;
    double d4(double r) const;
    double delta_g(double r) const;
    double delta2_g(double r) const;
    WeightDerivs derivs(double r) const;
    double constant() const { return c_; }
    double table_step() const { return step_; }

private:
    Bump bump_;
    double c_ = 0.0;
    double step_ = 1e-4;
    std::vector<double> b0_;  // beta at 1 + i*step
    std::vector<double> b1_;  // beta'
    std::vector<double> b2_;  // beta'' (bump)

    double hermite(const std::vector<double>& v, const std::vector<double>& slope, double r) const;
};

SmoothWeight build_beta(const Bump& bump);
const SmoothWeight& default_weight();
WeightDerivs eval_weight_derivs(const SmoothWeight& w, double r);
// Delta^2 <x> for <x> = sqrt(1+r^2).
double smooth_bracket_delta2_g(double r);

enum class CutoffKind { rising, falling, window };

// Smooth characteristic function with the half-scale transition:
// rising F(l >= a) vanishes for l <= a/2 and equals 1 for l >= a.
class Cutoff {
public:
    static Cutoff rising(double a, int order = 7);
    static Cutoff falling(double a, int order = 7);
    static Cutoff window(double a, double b, int order = 7);

    CutoffKind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }
    int order() const { return order_; }

    double operator()(double lambda) const { return derivative(lambda, 0); }
    double derivative(double lambda, int k) const;

    // Transition profile S on [0,1] (S(0)=0, S(1)=1) and S'.
    const Polynomial& profile() const { return s_; }
    const Polynomial& profile_slope() const { return ds_; }

private:
    CutoffKind kind_ = CutoffKind::rising;
    double a_ = 1.0, b_ = 0.0;
    int order_ = 7;
    Polynomial s_, ds_;

    double rise(double a, double lambda, int k) const;
};

Cutoff smooth_char(CutoffKind kind, double a, double b = 0.0, int order = 7);
// Polynomial smoothstep of odd order 2q+1 and its slope x^q (1-x)^q / B(q+1,q+1).
Polynomial smoothstep(int order);
Polynomial smoothstep_slope(int order);

struct VectorFieldKind {
    enum class Tag { Gamma0, SmoothedBeta, SqrtSmoothed, XfR } tag = Tag::Gamma0;
    double param = 0.0;  // theta for SqrtSmoothed, epsilon for XfR

    static VectorFieldKind sqrt_smoothed(double theta);
    static VectorFieldKind xfr(double eps);
};

struct MorawetzValue {
    double f_radial;
    double density;
};

MorawetzValue morawetz_field(const VectorFieldKind& kind, double r);

// CSV: lambda, value, d1, d2.
void dump_cutoff_csv(const std::string& path, const Cutoff& c, double lo, double hi, int samples);
// CSV: r, beta, d1, d2, delta_g, delta2_g.
void dump_weight_csv(const std::string& path, const SmoothWeight& w, double hi, int samples);

}  // namespace nlsphase
