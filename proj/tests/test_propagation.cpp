#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/propagation.hpp"

using namespace nlsphase;

namespace {

std::vector<double> lattice(double t0, double t1, double dt) {
    std::vector<double> t;
    for (std::size_t i = 0; t0 + static_cast<double>(i) * dt <= t1 + 1e-9; ++i) t.push_back(t0 + static_cast<double>(i) * dt);
    return t;
}

GridPtr wide_grid() {
    static const GridPtr g = make_grid({400.0, 2048, 0.01});
    return g;
}

RadialField gaussian(const GridPtr& g, double amp, double width) {
    return RadialField::from_phi(g, [=](double r) { return cplx(amp * std::exp(-r * r / (2 * width * width))); });
}

// Exact free run of a unit gaussian out to T = 48, sampled every 0.5.
const Trajectory& free_run() {
    static const Trajectory run = free_trajectory(gaussian(wide_grid(), 1.0, 1.0), lattice(0.0, 48.0, 0.5));
    return run;
}

}  // namespace

TEST_CASE("preset names round trip") {
    for (auto p : {PropagationPreset::PE, PropagationPreset::PE2, PropagationPreset::PE3, PropagationPreset::PE4V2,
                   PropagationPreset::PE5, PropagationPreset::PEBoundary, PropagationPreset::Bab,
                   PropagationPreset::PEr2})
        CHECK(preset_from_name(preset_name(p)) == p);
    CHECK_THROWS_AS(preset_from_name("PE-9"), ValidationError);
}

TEST_CASE("preset gates") {
    PresetParams q;
    q.alpha = 0.3;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PE, q), ValidationError);
    q.alpha = 0.6;
    CHECK_NOTHROW(validate_preset(PropagationPreset::PE, q));
    q.delta = 0.0;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PE2, q), ValidationError);

    PresetParams v;
    v.alpha = 0.6;
    v.beta = 0.4;
    v.c0 = 0.2;  // alpha + beta = 1 needs c0 > alpha / 2 unless beta < alpha
    CHECK_NOTHROW(validate_preset(PropagationPreset::PE4V2, v));
    v.beta = 0.7;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PE4V2, v), ValidationError);

    PresetParams f;
    f.alpha = 0.6;
    f.beta = 0.4;
    f.c1 = 0.2;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PE5, f), ValidationError);
    f.c1 = 0.1;
    CHECK_NOTHROW(validate_preset(PropagationPreset::PE5, f));
    f.beta = 0.3;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PEBoundary, f), ValidationError);

    PresetParams b;
    b.a = 0.5;
    b.b = -0.5;
    b.c = 0.5;
    CHECK_NOTHROW(validate_preset(PropagationPreset::Bab, b));
    b.c = 0.2;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::Bab, b), ValidationError);
    b.b = 0.2;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::Bab, b), ValidationError);

    PresetParams r;
    r.alpha = 0.6;
    r.beta = 0.5;
    CHECK_THROWS_AS(validate_preset(PropagationPreset::PEr2, r), ValidationError);
}

TEST_CASE("boundary scaling count") {
    CHECK(boundary_scaling_terms(0.6) == 10);
    for (double a : {0.55, 0.7, 0.9}) {
        const int J = boundary_scaling_terms(a);
        CHECK(std::pow(0.75, J) < a / 8);
        CHECK(std::pow(0.75, J - 1) >= a / 8);
    }
}

TEST_CASE("tail statistics") {
    std::vector<double> t, v;
    for (int i = 1; i <= 200; ++i) {
        t.push_back(i);
        v.push_back(2.0 + 3.0 / i);
    }
    const auto s = tail_stats(t, v);
    CHECK(s.estimate == doctest::Approx(2.0).epsilon(0.02));
    CHECK(s.oscillation <= 0.01);
    CHECK(loglog_slope(t, std::vector<double>(v.size(), 1.0)) == doctest::Approx(0.0));
    std::vector<double> sq(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) sq[i] = t[i] * t[i];
    CHECK(loglog_slope(t, sq) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(interpolate_series({0.0, 1.0, 2.0}, {0.0, 2.0, 3.0}, 1.5) == doctest::Approx(2.5));
}

TEST_CASE("gamma limit of free data") {
    const auto& run = free_run();
    const auto r = gamma_limit_estimate(run, 0.6);
    // (psi_0, |p| psi_0) for e^{-r^2/2}: pi^{3/2} 2 / sqrt(pi)
    const double exact = 2.0 * std::numbers::pi;
    CHECK(abs_momentum_expectation(run.snapshots.front()) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(r.gamma_hat == doctest::Approx(exact).epsilon(0.03));
    CHECK(r.nonnegative);
    CHECK_THROWS_AS(gamma_limit_estimate(run, 0.2), ValidationError);
}

TEST_CASE("PE and PE-2 converge on free data") {
    const auto& run = free_run();
    PresetParams q;
    q.alpha = 0.6;
    for (auto p : {PropagationPreset::PE, PropagationPreset::PE2}) {
        const auto r = propagation_integral(run, p, q);
        CHECK(r.t0 == doctest::Approx(10.5));
        CHECK(r.tail_ratio < 0.8);
        CHECK(r.converged);
        const auto j = verdict_json(r);
        CHECK(j["preset"] == preset_name(p));
        CHECK(j["converged"] == true);
    }
}

TEST_CASE("PE-3 incoming integrand is negligible on outgoing data") {
    const auto& run = free_run();
    PresetParams q;
    q.alpha = 0.6;
    const auto r = propagation_integral(run, PropagationPreset::PE3, q);
    REQUIRE(r.counterpart.size() == r.integrand.size());
    const std::size_t late = r.integrand.size() * 3 / 4;
    for (std::size_t i = late; i < r.integrand.size(); ++i)
        CHECK(std::abs(r.integrand[i]) <= 1e-3 * std::abs(r.counterpart[i]));
}

TEST_CASE("halving the snapshot rate moves the integral by under 2%") {
    const auto& fine = free_run();
    const auto coarse = free_trajectory(fine.snapshots.front(), lattice(0.0, 48.0, 1.0));
    PresetParams q;
    q.alpha = 0.6;
    q.t0 = 11.0;  // on both lattices
    const auto a = propagation_integral(fine, PropagationPreset::PE, q);
    const auto b = propagation_integral(coarse, PropagationPreset::PE, q);
    const double ia = a.running_integral.back(), ib = b.running_integral.back();
    CHECK(std::abs(ia - ib) <= 0.02 * std::abs(ia));
}

TEST_CASE("short runs are rejected") {
    const auto run = free_trajectory(free_run().snapshots.front(), lattice(0.0, 20.0, 0.5));
    PresetParams q;
    q.alpha = 0.6;
    CHECK_THROWS_AS(propagation_integral(run, PropagationPreset::PE, q), ValidationError);
    const auto tiny = free_trajectory(free_run().snapshots.front(), lattice(0.0, 5.0, 0.5));
    CHECK_THROWS_AS(propagation_integral(tiny, PropagationPreset::PE, q), ValidationError);
}

TEST_CASE("zero field gives zero integrands") {
    const auto run = free_trajectory(RadialField::zeros(wide_grid()), lattice(0.0, 48.0, 2.0));
    PresetParams q;
    q.alpha = 0.6;
    const auto r = propagation_integral(run, PropagationPreset::PE, q);
    for (double v : r.integrand) CHECK(v == 0.0);
    CHECK(r.tail_ratio == 0.0);
    const auto g = gamma_limit_estimate(run, 0.6);
    CHECK(g.gamma_hat == 0.0);
    CHECK(g.nonnegative);
}

TEST_CASE("boundary limit stays sublinear") {
    const auto b = boundary_limit_check(free_run(), 0.6);
    CHECK(std::isfinite(b.tail_magnitude));
    CHECK(b.growth_exponent < 1.0);
    CHECK_THROWS_AS(boundary_limit_check(free_run(), 1.2), ValidationError);
}

TEST_CASE("exterior Morawetz balance on a free run") {
    const auto g = make_grid({200.0, 2048, 0.01});
    const auto run = free_trajectory(gaussian(g, 1.0, 2.0), lattice(0.0, 16.0, 0.1));
    const auto m = exterior_morawetz(run, 8.0, 4.0, 16.0, true);
    CHECK(m.scaled);
    CHECK(m.relative_residual <= 0.05);
    CHECK_THROWS_AS(exterior_morawetz(run, 8.0, 4.0, 16.0, false), ValidationError);
    CHECK_THROWS_AS(exterior_morawetz(run, 2.0, 4.0, 16.0, true), ValidationError);
    CHECK_THROWS_AS(exterior_morawetz(run, 8.0, 16.0, 4.0, true), ValidationError);
}

TEST_CASE("virial identity on free and defocusing runs") {
    const auto g = make_grid({100.0, 1024, 0.005});
    const auto f = gaussian(g, 1.5, 1.0);
    const auto free = free_trajectory(f, lattice(0.0, 2.0, 0.05));
    for (const auto& row : virial_series(free)) CHECK(row.residual <= 1e-3 * row.kinetic2);
    // For free data d<A>/dt = 2 ||grad phi||^2 exactly.
    CHECK(dilation_expectation(free.snapshots.back()) - dilation_expectation(free.snapshots.front()) ==
          doctest::Approx(2.0 * 2.0 * kinetic_energy(f)).epsilon(1e-8));

    NonlinearitySpec spec;
    spec.a = 1.0;
    spec.p = 2.0;
    const auto run = evolve(f, spec, {0.005, 2.0, 10, 1e-6, 1e6});
    double scale = 0.0, worst = 0.0;
    for (const auto& row : virial_series(run)) {
        scale = std::max(scale, row.kinetic2);
        worst = std::max(worst, row.residual);
    }
    CHECK(worst <= 1e-2 * scale);

    spec.potential = PotentialTerm{1.0, 2.0, PotentialTerm::Profile::cosine};
    auto timed = run;
    timed.spec = spec;
    CHECK_THROWS_AS(virial_series(timed), ValidationError);
}
