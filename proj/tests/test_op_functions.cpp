#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/flow.hpp"
#include "nlsphase/matrix_oracle.hpp"
#include "nlsphase/mellin.hpp"
#include "nlsphase/operators.hpp"

using namespace nlsphase;

namespace {

double bump(double r, double a, double b) {
    if (r <= a || r >= b) return 0.0;
    const double x = (2 * r - a - b) / (b - a);
    return std::exp(-1.0 / (1.0 - x * x));
}

double mass_outside(const RadialField& f, double lo, double hi) {
    const double total = norm(f) * norm(f);
    return (total - shell_mass(f, lo, hi)) / total;
}

}  // namespace

TEST_CASE("flow closed forms") {
    const auto& fm = default_flow();
    CHECK(std::abs(flow_z(fm, 3.0, 5.0) - 8.0) <= 1e-10);
    CHECK(flow_z(fm, 7.0, 0.5) == 0.5);
    CHECK(std::abs(fm.B(5.0) - 3.0) <= 1e-10);
    CHECK(std::abs(flow_z(fm, -3.0, 5.0) - 2.0) <= 1e-10);
    for (double a = 0.0; a <= 20.0; a += 0.5)
        for (double r = 2.0; r <= 40.0; r += 1.3) CHECK(std::abs(flow_z(fm, a, r) - (a + r)) <= 1e-10);
    for (double r = 0.0; r <= 1.0; r += 0.1) CHECK(flow_z(fm, -4.0, r) == r);
    // Monotone in a inside the mollification zone, saturating towards 1.
    double prev = 0.0;
    for (double a = -30.0; a <= 3.0; a += 0.25) {
        const double z = flow_z(fm, a, 1.5);
        CHECK(z > 1.0);
        CHECK(z >= prev);
        prev = z;
    }
}

TEST_CASE("gamma group: identity, unitarity, support motion, group law") {
    auto g = make_grid({100.0, 4096, 0.005});
    const auto& fm = default_flow();
    auto f = RadialField::from_phi(g, [](double r) { return cplx(bump(r, 5, 20)); });
    auto id = gamma_group(fm, 0.0, f);
    CHECK(norm(id.field - f) <= 1e-12 * norm(f));
    for (double a : {-2.0, 2.0}) {
        auto r = gamma_group(fm, a, f);
        CHECK(std::abs(norm(r.field) - norm(f)) <= 1e-8 * norm(f));
        CHECK_FALSE(r.boundary_flag);
    }
    auto b = RadialField::from_phi(g, [](double r) { return cplx(bump(r, 3, 4)); });
    auto moved = gamma_group(fm, 1.0, b).field;
    CHECK(mass_outside(moved, 2.0, 3.0) <= 1e-8);

    auto smooth = RadialField::from_phi(g, [](double r) { return std::exp(-std::pow(r - 12, 2)) * std::exp(cplx(0, r)); });
    for (auto [a, c] : {std::pair{1.3, -0.4}, std::pair{-2.0, 1.7}, std::pair{2.0, 2.0}}) {
        auto two = gamma_group(fm, a, gamma_group(fm, c, smooth).field).field;
        auto one = gamma_group(fm, a + c, smooth).field;
        CHECK(norm(two - one) <= 1e-6 * norm(smooth));
    }
}

// Mass pushed towards r = 1 is compressed without bound, so the discrete norm is
// only as good as the grid resolves the compressed profile.
TEST_CASE("gamma group crosses the mollification zone unitarily") {
    auto g = make_grid({60.0, 4096, 0.005});
    const auto& fm = default_flow();
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-std::pow(r - 3, 2))); });
    for (double a : {0.5, 1.5, 3.0}) {
        auto r = gamma_group(fm, a, f).field;
        CHECK(std::abs(norm(r) - norm(f)) <= 5e-3 * norm(f));
    }
}

TEST_CASE("function of gamma on exterior eigen-profiles") {
    auto g = make_grid({400.0, 4096, 0.005});
    const auto& fm = default_flow();
    const double tau = 1.0;
    for (bool fast : {true, false}) {
        CAPTURE(fast);
        GammaQuadrature q;
        q.exterior_fft = fast;
        auto hi = RadialField::from_phi(g, [&](double r) { return bump(r, 60, 200) * std::exp(cplx(0, 2 * tau * r)) / r; });
        CHECK(norm(func_of_gamma(fm, Cutoff::rising(1.0), tau, hi, q) - hi) <= 0.05 * norm(hi));
        auto lo = RadialField::from_phi(g, [&](double r) { return bump(r, 60, 200) * std::exp(cplx(0, 0.2 * tau * r)) / r; });
        CHECK(norm(func_of_gamma(fm, Cutoff::rising(1.0), tau, lo, q)) <= 0.05 * norm(lo));
    }
}

TEST_CASE("constant functions and complements") {
    auto g = make_grid({100.0, 2048, 0.005});
    const auto& fm = default_flow();
    auto f = RadialField::from_phi(g, [](double r) { return std::exp(-std::pow(r - 4, 2) / 3) * std::exp(cplx(0, 0.8 * r)); });
    auto one = apply_function_of_gamma(fm, SpectralFunction::constant(1.0), f);
    CHECK(norm(one - f) == 0.0);
    const auto F = SpectralFunction::from_cutoff(Cutoff::rising(1.0));
    const auto G = SpectralFunction::constant(1.0) - F;
    auto sum = apply_function_of_gamma(fm, F, f) + apply_function_of_gamma(fm, G, f);
    CHECK(norm(sum - f) <= 1e-6 * norm(f));
}

TEST_CASE("exterior fast path agrees with the flow quadrature") {
    auto g = make_grid({300.0, 4096, 0.005});
    const auto& fm = default_flow();
    auto f = RadialField::from_phi(g, [](double r) {
        return bump(r, 8, 60) * std::exp(cplx(0, 1.3 * r + 0.01 * r * r)) / r;
    });
    const auto F = SpectralFunction::from_cutoff(Cutoff::rising(1.0)).scaled(0.8);
    GammaQuadrature slow;
    slow.exterior_fft = false;
    auto a = apply_function_of_gamma(fm, F, f);
    auto b = apply_function_of_gamma(fm, F, f, slow);
    CHECK(norm(a - b) <= 1e-9 * norm(f));
}

TEST_CASE("tail bound beyond the node cap is refused") {
    auto g = make_grid({100.0, 2048, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r)); });
    GammaQuadrature q;
    q.max_nodes = 10;
    CHECK_THROWS_AS(func_of_gamma(default_flow(), Cutoff::rising(1.0), 0.01, f, q), NumericalError);
}

TEST_CASE("Mellin transform: unitarity, round trip and the eigenrelation") {
    auto g = make_grid({200.0, 4096, 0.005});
    const LogGrid log = LogGrid::defaults(*g);
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 2), 0.1 * r * std::exp(-r)); });
    const auto w = to_log_grid(f, log);
    CHECK(std::abs(log_grid_norm(w, log) - norm(f)) <= 1e-8 * norm(f));
    const auto one = SpectralMultiplierA::from_function(log, [](double) { return cplx(1.0); });
    CHECK(norm(func_of_dilation(one, f) - f) <= 1e-6 * norm(f));

    const double l0 = 2.5;
    const auto win = Cutoff::window(2.0, 40.0);
    auto prof = RadialField::from_phi(g, [&](double r) { return win(r) * std::pow(r, -1.5) * std::exp(cplx(0, l0 * std::log(r))); });
    const auto lam = SpectralMultiplierA::from_function(log, [](double l) { return cplx(l); });
    auto af = func_of_dilation(lam, prof);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
        if (prof.r(j) < 4.0 || prof.r(j) > 20.0) continue;
        num += std::norm(af.u[j] - l0 * prof.u[j]);
        den += std::norm(l0 * prof.u[j]);
    }
    CHECK(std::sqrt(num / den) <= 1e-2);
    // Agrees with the differential form of A.
    auto ad = apply(OperatorTag::dilation(), prof);
    CHECK(norm(af - ad) <= 1e-3 * norm(ad));

    const LogGrid narrow{1.0, g->r_max(), 8192};
    const auto one_narrow = SpectralMultiplierA::from_function(narrow, [](double) { return cplx(1.0); });
    CHECK_THROWS_AS(func_of_dilation(one_narrow, f), ValidationError);
}

TEST_CASE("tanh projections") {
    const TanhProjection out{100.0, 10.0, TanhProjection::Sign::outgoing};
    CHECK(out(100.0) == 0.5);
    CHECK(out(200.0) >= 1.0 - 1e-8);
    const TanhProjection in{100.0, 10.0, TanhProjection::Sign::incoming};
    CHECK(in(-100.0) == 0.5);
    CHECK_THROWS_AS((TanhProjection{100.0, 1.0, TanhProjection::Sign::outgoing}.validate()), ValidationError);
}

TEST_CASE("high-low leakage decreases with the gap") {
    auto g = make_grid({200.0, 4096, 0.005});
    const LogGrid log = LogGrid::defaults(*g);
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 8)); });
    auto h = RadialField::from_phi(g, [](double r) { return cplx(1.0 / (1 + r * r)); });
    const double N = 2.0;
    double prev = INFINITY;
    for (double ratio : {4.0, 8.0, 16.0}) {
        const double M = ratio * N;
        const double l = highlow_leakage(N, M, std::sqrt(M), f, h, log).leakage;
        CHECK(l < prev);
        prev = l;
    }
    // The tanh tail alone contributes about exp(-2 (M - 2N) / R), so the band is widened to N = 4.
    CHECK(highlow_leakage(4.0, 40.0, std::sqrt(40.0), f, f, log).leakage <= 1e-3);
    CHECK(highlow_leakage(N, 8.0, 3.0, f, RadialField::zeros(g), log).leakage == 0.0);
}

TEST_CASE("Mellin convolution theorem on band-limited pairs") {
    auto g = make_grid({100.0, 1024, 0.005});
    const LogGrid log{1e-5 * g->r_max(), g->r_max(), 512};
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 4)); });
    auto h = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 9) * r); });
    CHECK(mellin_convolution_residual(f, h, log) <= 1e-5);
}

TEST_CASE("commutator expansion against the matrix oracle") {
    const auto F = SpectralFunction::from_cutoff(Cutoff::rising(1.0));
    // Diagonal A with B commuting: nothing survives.
    CMatrix Ad = CMatrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) Ad(i, i) = 0.3 * i;
    const auto A = HermitianMatrix::from(Ad);
    const auto B = HermitianMatrix::from(Ad * Ad);
    const auto r = commutator_expansion_matrix(B, A, F, 2);
    CHECK(r.remainder_norm <= 1e-14);
    for (const auto& t : r.terms) CHECK(t.norm() <= 1e-14);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto a = HermitianMatrix::random(8, seed, 2.0);
        const auto b = HermitianMatrix::random(8, seed + 1000);
        const auto e = commutator_expansion_matrix(b, a, F.scaled(0.7), 2);
        CHECK(e.moment_finite);
        CHECK(e.remainder_norm <= e.bound);
    }
    const auto a = HermitianMatrix::random(8, 5);
    const auto sq = HermitianMatrix::from(a.m * a.m);
    CHECK(commutator_expansion_matrix(sq, a, F, 1).remainder_norm <= 1e-13);
}
