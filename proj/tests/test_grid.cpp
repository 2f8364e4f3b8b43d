#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/grid.hpp"
#include "nlsphase/interp.hpp"

using namespace nlsphase;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid geometry") {
    auto g = make_grid({200.0, 4096, 0.005});
    CHECK(g->h() == 0.048828125);
    CHECK(g->wavenumbers()[0] == doctest::Approx(pi / 200.0).epsilon(1e-15));
    auto small = make_grid({1.0, 16, 0.01});
    CHECK(small->r(15) == 1.0);
    CHECK_THROWS_AS(make_grid({200.0, 1000, 0.005}), ValidationError);
    CHECK_THROWS_AS(make_grid({-1.0, 1024, 0.005}), ValidationError);
}

TEST_CASE("norms against analytic values") {
    auto g = make_grid({40.0, 4096, 0.005});
    const double c = std::pow(pi, -0.75);
    auto psi = RadialField::from_phi(g, [&](double r) { return cplx(c * std::exp(-r * r / 2)); });
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-6));
    auto e = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 2)); });
    const double ratio = std::pow(norm(e, NormKind::hdot1()) / norm(e), 2);
    CHECK(ratio == doctest::Approx(1.5).epsilon(1e-6));
    auto z = RadialField::zeros(g);
    CHECK(norm(z) == 0.0);
    CHECK(norm(z, NormKind::h1()) == 0.0);
    CHECK(norm(z, NormKind::hdot1()) == 0.0);
    CHECK(norm(z, NormKind::weighted_x(1.0)) == 0.0);
}

TEST_CASE("inner product convention") {
    auto g = make_grid({40.0, 1024, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 3), 0.2 * r * std::exp(-r * r)); });
    const double n2 = norm(f) * norm(f);
    CHECK(std::abs(inner(f, f) - cplx(n2)) <= 1e-13 * n2);
    const cplx fi = inner(f, cplx(0, 1) * f);
    CHECK(std::abs(fi - cplx(0, -n2)) <= 1e-13 * n2);
    auto h = RadialField::from_phi(g, [](double r) { return cplx(1.0 / (1 + r * r)); });
    CHECK(std::abs(inner(f, h) - std::conj(inner(h, f))) <= 1e-15);

    const double R = g->r_max();
    auto s1 = RadialField::from_phi(g, [&](double r) { return cplx(std::sin(pi * r / R) / r); });
    auto s2 = RadialField::from_phi(g, [&](double r) { return cplx(std::sin(2 * pi * r / R) / r); });
    CHECK(std::abs(inner(s1, s2)) <= 1e-12);
}

TEST_CASE("sine transform round trip and spectral derivative") {
    auto g = make_grid({50.0, 2048, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 4), std::sin(r) * std::exp(-r * r / 9)); });
    auto back = g->from_sine_coefficients(g->sine_coefficients(f.u));
    double err = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        err += std::norm(back[j] - f.u[j]);
        ref += std::norm(f.u[j]);
    }
    CHECK(std::sqrt(err / ref) <= 1e-12);

    // u = r e^{-r^2/4} -> u' = (1 - r^2/2) e^{-r^2/4}
    auto e = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 4)); });
    const auto d = g->derivative(e.u);
    double worst = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double r = g->r(j);
        worst = std::max(worst, std::abs(d[j] - (1 - r * r / 2) * std::exp(-r * r / 4)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("oversampled interpolation reproduces smooth fields off grid") {
    auto g = make_grid({50.0, 2048, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 4)); });
    OversampledField o(*g, f.u, 8);
    for (double r : {0.013, 1.2345, 3.3333, 7.77}) CHECK(std::abs(o(r) - r * std::exp(-r * r / 4)) <= 1e-10);
}

TEST_CASE("shell mass and edge fraction") {
    auto g = make_grid({40.0, 2048, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r * r / 2)); });
    const double total = norm(f) * norm(f);
    CHECK(shell_mass(f, 0.0, 40.0) == doctest::Approx(total).epsilon(1e-12));
    CHECK(edge_mass_fraction(f) <= 1e-30);
}

TEST_CASE("field CSV round trip") {
    auto g = make_grid({20.0, 256, 0.005});
    auto f = RadialField::from_phi(g, [](double r) { return cplx(std::exp(-r), std::cos(r) * std::exp(-r)); }, 1.5);
    const auto path = (std::filesystem::temp_directory_path() / "nlsphase_field_roundtrip.csv").string();
    write_field_csv(path, f);
    auto h = read_field_csv(path);
    CHECK(h.time == 1.5);
    CHECK(h.grid->same_as(*g));
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(h.u[j] == f.u[j]);
    CHECK_THROWS_AS(read_field_csv(path + ".missing"), IoError);
}

TEST_CASE("fields on different grids are rejected") {
    auto a = RadialField::zeros(make_grid({20.0, 256, 0.005}));
    auto b = RadialField::zeros(make_grid({30.0, 256, 0.005}));
    CHECK_THROWS_AS(inner(a, b), ValidationError);
}
