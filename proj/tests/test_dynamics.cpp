#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "nlsphase/dynamics.hpp"
#include "nlsphase/error.hpp"

using namespace nlsphase;

namespace {

RadialField gaussian(const GridPtr& g, double amp, double width, double k0 = 0.0) {
    return RadialField::from_phi(
        g, [=](double r) { return amp * std::exp(-r * r / (2 * width * width)) * std::exp(cplx(0, k0 * r)); });
}

NonlinearitySpec defocusing() {
    NonlinearitySpec s;
    s.a = 1.0;
    s.p = 2.0;
    return s;
}

}  // namespace

TEST_CASE("nonlinearity values") {
    auto s = defocusing();
    CHECK(s.factor(2.0, 1.0, 0.0) == doctest::Approx(4.0).epsilon(1e-15));
    s.b = 1.0;
    s.m = 3.0;
    s.n = 1.0;
    // 4 - 8 / (1 + 4)
    CHECK(s.factor(2.0, 1.0, 0.0) == doctest::Approx(2.4).epsilon(1e-14));
    s.potential = PotentialTerm{2.0, 3.0, PotentialTerm::Profile::cosine, 0.5};
    const double v = 2.0 * std::pow(3.0, -3.0) * std::cos(0.5);
    CHECK(s.factor(0.0, 2.0, 1.0) == doctest::Approx(v).epsilon(1e-14));
    CHECK_FALSE(s.autonomous());
    s.weighted = WeightedTerm{1.5, 2.0, 1.0};

    for (double amp : {0.3, 1.0, 2.5}) {
        const double h = 1e-6;
        const double fd = (s.factor(amp + h, 2.0, 1.0) - s.factor(amp - h, 2.0, 1.0)) / (2 * h);
        CHECK(s.d_ds(amp, 2.0, 1.0) == doctest::Approx(fd).epsilon(1e-7));
        const double fr = (s.factor(amp, 2.0 + h, 1.0) - s.factor(amp, 2.0 - h, 1.0)) / (2 * h);
        CHECK(s.d_dr(amp, 2.0, 1.0) == doctest::Approx(fr).epsilon(1e-7));
        // dG / d rho = N(sqrt rho)
        const double rho = amp * amp;
        const double fg = (s.potential_energy_density(std::sqrt(rho + h), 2.0, 1.0) -
                           s.potential_energy_density(std::sqrt(rho - h), 2.0, 1.0)) /
                          (2 * h);
        CHECK(fg == doctest::Approx(s.factor(amp, 2.0, 1.0)).epsilon(1e-6));
    }
}

TEST_CASE("nonlinearity validation") {
    NonlinearitySpec s;
    CHECK(s.is_zero());
    CHECK(s.autonomous());
    s.a = 1.0;
    s.p = 5.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.p = 1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.b = -1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.potential = PotentialTerm{1.0, 1.0};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.b = 1.0;
    s.m = 1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("step with zero interaction is the free propagator") {
    const auto g = make_grid({40.0, 512, 0.01});
    const auto f = gaussian(g, 1.0, 1.5, 1.0);
    const auto a = step(f, NonlinearitySpec{}, 0.01);
    const auto b = free_evolve(f, 0.01);
    CHECK(norm(a - b) <= 1e-12 * norm(f));
    CHECK(a.time == doctest::Approx(0.01));

    // Free evolution forms a group.
    const auto c = free_evolve(free_evolve(f, 0.7), 1.3);
    CHECK(norm(c - free_evolve(f, 2.0)) <= 1e-12 * norm(f));
}

TEST_CASE("mass drift per step") {
    const auto g = make_grid({100.0, 2048, 0.005});
    const auto f = gaussian(g, 2.0, 1.0);
    const RunOptions opt{0.005, 2.0, 40, 1e-6, 1e6};
    const auto free_run = evolve(f, NonlinearitySpec{}, opt);
    CHECK(free_run.max_step_mass_drift <= 1e-10);
    auto spec = defocusing();
    spec.b = 0.5;
    spec.potential = PotentialTerm{1.0, 2.0, PotentialTerm::Profile::decay, 1.0, 1.0};
    const auto run = evolve(f, spec, opt);
    CHECK(run.max_step_mass_drift <= 1e-10);
    CHECK(run.size() == 11);
    CHECK(run.times().back() == doctest::Approx(2.0));
}

TEST_CASE("energy error is second order in the step") {
    const auto g = make_grid({40.0, 512, 0.01});
    const auto f = gaussian(g, 2.0, 1.0);
    const auto spec = defocusing();
    const double e0 = energy(f, spec, 0.0);
    std::vector<double> err;
    for (double dt : {0.02, 0.01, 0.005}) {
        const auto run = evolve(f, spec, {dt, 1.0, static_cast<std::size_t>(std::lround(1.0 / dt)), 1e-6, 1e6});
        err.push_back(std::abs(energy(run.snapshots.back(), spec, 1.0) - e0));
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.25));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.25));
    CHECK(err[2] <= 1e-3 * e0);
}

TEST_CASE("pseudo-conformal invariant along free evolution") {
    const auto g = make_grid({200.0, 4096, 0.005});
    // Smooth at the origin: a phase e^{i k r} would put a kink there.
    const auto f = RadialField::from_phi(g, [](double r) { return std::exp(-r * r / 2) * cplx(1.0, 0.3 * r * r); });
    const double p0 = pseudo_conformal(f, 0.0);
    // ||x f||^2 = 4 pi int r^4 (1 + 0.09 r^4) e^{-r^2} dr
    const double x2 = 1.5 * std::pow(std::numbers::pi, 1.5) * (1.0 + 0.09 * 35.0 / 4.0);
    CHECK(p0 == doctest::Approx(std::sqrt(x2)).epsilon(1e-10));
    for (double t = 1.0; t <= 10.0; t += 1.0) CHECK(std::abs(pseudo_conformal(free_evolve(f, t), t) - p0) <= 1e-6 * p0);
}

TEST_CASE("velocity bounds for band-limited data") {
    const auto g = make_grid({200.0, 4096, 0.005});
    const auto f = gaussian(g, 1.0, 1.0);
    const auto rows = velocity_bound_scan(f, {1.0, 2.0}, 0.5, 5.0, {5.0, 10.0, 20.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows.back().interior_mass <= 1e-3);
    CHECK(rows.back().exterior_mass <= 1e-5);
    CHECK(rows.back().interior_mass < rows.front().interior_mass);
    CHECK_THROWS_AS(velocity_bound_scan(f, {1.0, 2.0}, 0.5, 5.0, {50.0}), ValidationError);
    CHECK_THROWS_AS(band_filter(f, 2.0, 1.0), ValidationError);
}

TEST_CASE("band filter keeps only the band") {
    const auto g = make_grid({100.0, 2048, 0.005});
    const auto f = band_filter(gaussian(g, 1.0, 0.5), 1.0, 2.0);
    const auto c = g->sine_coefficients(f.u);
    const auto k = g->wavenumbers();
    double outside = 0.0, total = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        total += std::norm(c[m]);
        if (k[m] < 1.0 || k[m] > 2.0) outside += std::norm(c[m]);
    }
    CHECK(outside <= 1e-28 * total);
}

TEST_CASE("boundary contamination is flagged") {
    const auto g = make_grid({30.0, 512, 0.01});
    const auto f = gaussian(g, 1.0, 1.0, 3.0);
    const auto run = evolve(f, NonlinearitySpec{}, {0.01, 8.0, 50, 1e-6, 1e6});
    CHECK_FALSE(run.boundary_flags.front());
    CHECK(run.boundary_flags.back());
    CHECK(run.valid_until < 8.0);
    CHECK(run.valid_until > 0.0);
}

TEST_CASE("H1 cap aborts the run") {
    const auto g = make_grid({30.0, 512, 0.01});
    CHECK_THROWS_AS(evolve(gaussian(g, 1.0, 1.0), NonlinearitySpec{}, {0.01, 1.0, 10, 1e-6, 1e-3}), NumericalError);
    CHECK_THROWS_AS(evolve(gaussian(g, 1.0, 1.0), NonlinearitySpec{}, {0.01, 1.0, 0, 1e-6, 1e6}), ValidationError);
}

TEST_CASE("free trajectory agrees with the stepper") {
    const auto g = make_grid({60.0, 1024, 0.01});
    const auto f = gaussian(g, 1.0, 1.0, 1.0);
    const auto a = evolve(f, NonlinearitySpec{}, {0.01, 1.0, 50, 1e-6, 1e6});
    const auto b = free_trajectory(f, a.times());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(norm(a.snapshots[i] - b.snapshots[i]) <= 1e-10);
    CHECK_THROWS_AS(free_trajectory(f, {1.0, 0.5}), ValidationError);
}

TEST_CASE("norms of a gaussian") {
    const auto g = make_grid({40.0, 1024, 0.01});
    const auto f = gaussian(g, 1.0, 1.0);
    // int exp(-3 r^2) d^3x = (pi / 3)^{3/2}
    CHECK(l6_norm(f) == doctest::Approx(std::pow(std::numbers::pi / 3.0, 0.25)).epsilon(1e-8));
    // |grad phi|^2 = r^2 e^{-r^2}: 4 pi int r^4 e^{-r^2} dr = 3 pi^{3/2} / 2
    CHECK(kinetic_energy(f) == doctest::Approx(1.5 * std::pow(std::numbers::pi, 1.5)).epsilon(1e-8));
    const double ratio = radial_sobolev_ratio(f);
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.0);

    const auto run = free_trajectory(f, {0.0, 0.5, 1.0});
    const double s = strichartz_l2l6(run);
    CHECK(std::isfinite(s));
    CHECK(s > 0.0);
}

TEST_CASE("field CSV round trip") {
    const auto g = make_grid({20.0, 256, 0.01});
    const auto f = gaussian(g, 1.3, 2.0, 0.7);
    const auto path = (std::filesystem::temp_directory_path() / "nlsphase_field_roundtrip.csv").string();
    write_field_csv(path, f);
    const auto back = read_field_csv(path);
    CHECK(back.grid->same_as(*g));
    CHECK(norm(back - f) == 0.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_field_csv(path), IoError);
}
