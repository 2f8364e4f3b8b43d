#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/experiment.hpp"
#include "nlsphase/mellin.hpp"

using namespace nlsphase;

namespace {

GridPtr grid200() { return make_grid({200.0, 4096, 0.005}); }

}  // namespace

TEST_CASE("log grid geometry") {
    const LogGrid log{0.1, 100.0, 1024};
    CHECK(std::abs(log.dt() - std::log(1000.0) / 1024) <= 1e-15);
    CHECK(std::abs(log.t(0) - std::log(0.1)) <= 1e-15);
    CHECK(log.lambda(0) == 0.0);
    // Bins above n/2 carry negative eigenvalues.
    CHECK(log.lambda(1) > 0.0);
    CHECK(log.lambda(1023) < 0.0);
    CHECK(std::abs(log.lambda(1) + log.lambda(1023)) <= 1e-12);
    CHECK(std::abs(log.lambda(1) - 2 * std::numbers::pi / (1024 * log.dt())) <= 1e-12);

    CHECK_THROWS_AS((LogGrid{1.0, 0.5, 64}.validate()), ValidationError);
    CHECK_THROWS_AS((LogGrid{0.0, 10.0, 64}.validate()), ValidationError);
    CHECK_THROWS_AS((LogGrid{0.1, 10.0, 100}.validate()), ValidationError);

    const auto g = grid200();
    const auto d = LogGrid::defaults(*g);
    CHECK(std::abs(d.r_max - 200.0) <= 1e-12);
    CHECK(std::abs(d.r_min - 200.0e-7) <= 1e-18);
    CHECK(d.n_log == 8192);
}

TEST_CASE("log grid map preserves the windowed norm") {
    const auto g = grid200();
    const auto f = RadialField::from_phi(g, [](double r) { return std::exp(-r * r / 18) * std::exp(cplx(0, 0.7 * r)); });
    const auto log = LogGrid::defaults(*g);
    const auto w = to_log_grid(f, log);
    CHECK(std::abs(log_grid_norm(w, log) - norm(f)) <= 1e-6 * norm(f));
    CHECK(log_window_mass_fraction(f, log) >= 1.0 - 1e-8);

    const LogGrid outer{50.0, 200.0, 2048};
    CHECK(log_window_mass_fraction(f, outer) <= 1e-20);
}

TEST_CASE("tanh projections mirror each other") {
    const TanhProjection out{20.0, 4.0, TanhProjection::Sign::outgoing};
    const TanhProjection in{20.0, 4.0, TanhProjection::Sign::incoming};
    for (double l = -60.0; l <= 60.0; l += 3.7) {
        CHECK(std::abs(out(l) - in(-l)) <= 1e-15);
        CHECK(out(l) >= 0.0);
        CHECK(out(l) <= 1.0);
    }
    CHECK(std::abs(out(20.0) - 0.5) <= 1e-15);
    CHECK(out(200.0) > 1.0 - 1e-15);
    CHECK(out(-200.0) < 1e-15);
    CHECK_THROWS_AS((TanhProjection{20.0, 0.0}.validate()), ValidationError);
}

TEST_CASE("constant multiplier is the identity on the window") {
    const auto g = grid200();
    const auto f = RadialField::from_phi(g, [](double r) { return std::exp(-std::pow(r - 8, 2) / 4); });
    const auto log = LogGrid::defaults(*g);
    const auto one = SpectralMultiplierA::from_function(log, [](double) { return cplx(1.0); });
    const auto back = func_of_dilation(one, f);
    CHECK(norm(back - f) <= 1e-6 * norm(f));

    // e^{i a A} for a constant phase shift is unitary.
    const auto phase = SpectralMultiplierA::from_function(log, [](double l) { return std::exp(cplx(0, 0.4 * l)); });
    CHECK(std::abs(norm(func_of_dilation(phase, f)) - norm(f)) <= 1e-6 * norm(f));
}

TEST_CASE("mellin suite") {
    const auto r = mellin_suite();
    CHECK(r.round_trip <= 1e-6);
    CHECK(r.eigen_interior_error <= 1e-2);
    REQUIRE(r.leakage.size() == 3);
    CHECK(r.leakage_ratios == std::vector<double>{4.0, 8.0, 16.0});
    CHECK(r.leakage[1] < r.leakage[0]);
    CHECK(r.leakage[2] < r.leakage[1]);
    CHECK(r.leakage_decreasing);
    CHECK(r.detail.contains("leakage"));
}
