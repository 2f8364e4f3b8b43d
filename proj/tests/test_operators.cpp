#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/operators.hpp"

using namespace nlsphase;
constexpr double pi = std::numbers::pi;

namespace {

// Smooth compactly supported bump on [a, b].
double bump(double r, double a, double b) {
    if (r <= a || r >= b) return 0.0;
    const double x = (2 * r - a - b) / (b - a);
    return std::exp(-1.0 / (1.0 - x * x));
}

double max_abs_diff(const RadialField& a, const RadialField& b, double lo, double hi) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a.r(j) >= lo && a.r(j) <= hi) m = std::max(m, std::abs(a.phi(j) - b.phi(j)));
    return m;
}

}  // namespace

TEST_CASE("gamma acts as k on outgoing exterior waves") {
    auto g = make_grid({200.0, 4096, 0.005});
    const double k = 2.0;
    auto f = RadialField::from_phi(g, [&](double r) { return bump(r, 20, 80) * std::exp(cplx(0, k * r)) / r; });
    auto gf = apply(OperatorTag::gamma(), f);
    // On the flat middle the envelope derivative is tiny compared with k.
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = f.r(j);
        if (r < 45 || r > 55) continue;
        worst = std::max(worst, std::abs(gf.u[j] - k * f.u[j]) / std::abs(f.u[j]));
    }
    CHECK(worst <= 2e-2);
    // Pure plane-wave part with the exact envelope derivative removed.
    auto env = RadialField::from_phi(g, [&](double r) { return cplx(bump(r, 20, 80)) / r; });
    auto genv = apply(OperatorTag::gamma(), env);
    auto expected = cplx(k) * f;
    for (std::size_t j = 0; j < f.size(); ++j) expected.u[j] += genv.u[j] * std::exp(cplx(0, k * f.r(j)));
    CHECK(max_abs_diff(gf, expected, 2.0, 150.0) <= 1e-8);
}

TEST_CASE("Laplacian of the first sine mode") {
    // Round-off enters at eps * k_max^2 against k_1^2, i.e. eps n^2 relative; n = 256 keeps it below 1e-10.
    auto g = make_grid({200.0, 256, 0.005});
    const double R = g->r_max();
    auto f = RadialField::from_phi(g, [&](double r) { return cplx(std::sin(pi * r / R) / r); });
    auto lf = apply(OperatorTag::laplacian(), f);
    auto expected = cplx(-std::pow(pi / R, 2)) * f;
    CHECK(norm(lf - expected) <= 1e-10 * norm(expected));
}

TEST_CASE("dilation annihilates the scale-invariant profile") {
    auto g = make_grid({200.0, 4096, 0.005});
    const auto win = Cutoff::window(2.0, 100.0);
    auto f = RadialField::from_phi(g, [&](double r) { return cplx(win(r) * std::pow(r, -1.5)); });
    auto flat = RadialField::from_phi(g, [](double r) { return cplx(std::pow(r, -1.5)); });
    auto af = apply(OperatorTag::dilation(), f);
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = f.r(j);
        // The window is identically 1 on [2, 50].
        if (r < 5 || r > 40) continue;
        worst = std::max(worst, std::abs(af.phi(j)) / std::abs(flat.phi(j)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("momentum multipliers") {
    auto g = make_grid({100.0, 2048, 0.005});
    const double R = g->r_max();
    auto f = RadialField::from_phi(g, [&](double r) { return cplx(std::sin(7 * pi * r / R) / r); });
    auto p = apply(OperatorTag::abs_momentum(), f);
    CHECK(norm(p - cplx(7 * pi / R) * f) <= 1e-10 * norm(f));
    auto c = apply(OperatorTag::momentum_cutoff(Cutoff::rising(1.0), 1.0), f);
    CHECK(norm(c) <= 1e-13);  // k = 0.22 lies below the transition
}

TEST_CASE("exterior identity gamma^2 = -Delta") {
    auto g = make_grid({200.0, 4096, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(bump(r, 10, 30)); });
    const auto res = exterior_identity_residual(f, default_weight());
    CHECK(res.support_ok);
    CHECK(res.residual <= 1e-6);
    auto inner_bump = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-std::pow((r - 1.5) / 0.2, 2))); });
    const auto bad = exterior_identity_residual(inner_bump, default_weight());
    CHECK_FALSE(bad.support_ok);
    CHECK(bad.residual >= 1e-2);
    CHECK_THROWS_AS(exterior_identity_residual(RadialField::zeros(g), default_weight()), ValidationError);
}

TEST_CASE("commutator [-i Delta, gamma] is supported in the mollification shell") {
    auto g = make_grid({200.0, 4096, 0.005});
    auto outer = RadialField::from_phi(g, [](double r) { return cplx(bump(r, 5, 10)); });
    CHECK(commutator_support_check(outer, default_weight()) <= 1e-8);
    auto shell = RadialField::from_phi(g, [](double r) { return cplx(bump(r, 1.2, 1.8)); });
    CHECK(commutator_support_check(shell, default_weight()) > 1e-4);
    CHECK(commutator_support_check(RadialField::zeros(g), default_weight()) == 0.0);
}

TEST_CASE("gamma is symmetric and [-i Delta, <x>] = 2 gamma") {
    auto g = make_grid({100.0, 4096, 0.005});
    auto f = RadialField::from_phi(g, [](double r) {
        return std::exp(-std::pow(r - 3, 2) / 2) * std::exp(cplx(0, 0.7 * r));
    });
    const double n2 = norm(f) * norm(f);
    const cplx q = inner(apply(OperatorTag::gamma(), f), f);
    CHECK(std::abs(q.imag()) <= 1e-10 * n2);
    const auto wc = weight_commutator_forms(f, default_weight());
    CHECK(std::abs(wc.lhs - wc.rhs) <= 1e-6 * std::pow(norm(f, NormKind::h1()), 2));
    // The dilation expectation of a real field is real (here zero).
    auto real = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 5)); });
    const cplx a = inner(apply(OperatorTag::dilation(), real), real);
    CHECK(std::abs(a.imag()) <= 1e-10 * norm(real) * norm(real));
}

TEST_CASE("boundary contamination flag") {
    auto g = make_grid({50.0, 1024, 0.005});
    auto near_edge = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-std::pow(r - 49, 2))); });
    CHECK(boundary_contaminated(near_edge));
    auto centred = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r)); });
    CHECK_FALSE(boundary_contaminated(centred));
}
