#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsphase/error.hpp"
#include "nlsphase/experiment.hpp"
#include "nlsphase/identity_lab.hpp"

using namespace nlsphase;

TEST_CASE("symmetrization with A = C = I reduces to exact cancellation") {
    const auto I = HermitianMatrix::from(CMatrix::Identity(10, 10));
    const auto B = HermitianMatrix::random(10, 5);
    const auto r = check_symmetrization(I, B, I);
    CHECK(r.max() <= 1e-13);
    for (double t : r.remainder_terms) CHECK(t <= 1e-13);
}

TEST_CASE("symmetrization with C = A^2") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t d = 8 + seed % 9;
        const auto A = HermitianMatrix::random(d, seed);
        const auto B = HermitianMatrix::random(d, seed + 1000);
        const auto C = HermitianMatrix::from(A.m * A.m);
        const auto r = check_symmetrization(A, B, C);
        CHECK(r.max() <= 1e-10);
        CHECK(r.remainder_terms.size() == 4);
    }
}

TEST_CASE("ABBA identity at dimension 16") {
    const auto A = HermitianMatrix::random(16, 77, 3.0);
    const auto B = HermitianMatrix::random(16, 78, 3.0);
    const auto C = HermitianMatrix::from(CMatrix::Identity(16, 16));
    const auto r = check_symmetrization(A, B, C);
    CHECK(r.abba <= symmetrization_tolerance(16, 3.0));
    CHECK(r.ab2a <= symmetrization_tolerance(16, 3.0));
}

TEST_CASE("non-commuting A and C are rejected") {
    const auto A = HermitianMatrix::random(8, 1);
    const auto C = HermitianMatrix::random(8, 2);
    CHECK_THROWS_AS(check_symmetrization(A, A, C), ValidationError);
    const auto small = HermitianMatrix::random(4, 3);
    CHECK_THROWS_AS(check_symmetrization(A, small, A), ValidationError);
}

TEST_CASE("double commutator matches its Fourier representation") {
    const auto f1 = SpectralFunction::from_cutoff(Cutoff::rising(1.0));
    const auto f2 = SpectralFunction::from_cutoff(Cutoff::rising(2.0)).reflect();
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto A = HermitianMatrix::random(10, seed, 2.0);
        const auto B = HermitianMatrix::random(10, seed + 50);
        const auto r = check_double_commutator(f1, f2, A, B);
        CHECK(r.direct_norm > 0.0);
        CHECK(r.residual <= 1e-4);
    }
}

TEST_CASE("heisenberg residual on a nonlinear run") {
    const auto g = make_grid({60.0, 1024, 0.002});
    const auto f0 = RadialField::from_phi(g, [](double r) { return std::exp(-r * r / 4) * std::exp(cplx(0, 0.5 * r)); });
    NonlinearitySpec spec;
    spec.a = 1.0;
    spec.p = 2.0;
    spec.potential = PotentialTerm{0.5, 3.0, PotentialTerm::Profile::constant};
    const auto run = evolve(f0, spec, {0.002, 2.0, 10, 1e-6, 1e6});
    // A = multiplication by a smooth real weight.
    const FieldOperator op = [](const RadialField& f) {
        RadialField out = f;
        for (std::size_t j = 0; j < out.size(); ++j) out.u[j] *= std::exp(-out.r(j) * out.r(j) / 50);
        return out;
    };
    const auto rows = heisenberg_residual(run, op);
    REQUIRE(rows.size() == run.size() - 2);
    double scale = 0.0, worst = 0.0;
    for (const auto& row : rows) {
        scale = std::max(scale, std::abs(row.lhs));
        worst = std::max(worst, row.residual);
    }
    CHECK(scale > 1e-3);
    CHECK(worst <= 1e-3 * scale);
}

TEST_CASE("heisenberg residual needs three snapshots") {
    const auto g = make_grid({20.0, 256, 0.01});
    Trajectory run;
    run.grid = g;
    run.snapshots = {RadialField::zeros(g), RadialField::zeros(g, 0.1)};
    CHECK_THROWS_AS(heisenberg_residual(run, [](const RadialField& f) { return f; }), ValidationError);
}

TEST_CASE("symmetrization fixture") {
    std::vector<std::uint64_t> seeds{3, 4};
    std::vector<SymmetrizationReport> reports;
    for (auto s : seeds) {
        const auto A = HermitianMatrix::random(9, s);
        reports.push_back(check_symmetrization(A, HermitianMatrix::random(9, s + 9), A));
    }
    const auto j = symmetrization_fixture(seeds, 9, reports);
    CHECK(j["kind"] == "symmetrization");
    REQUIRE(j["cases"].size() == 2);
    CHECK(j["cases"][1]["seed"] == 4);
    CHECK(j["cases"][0]["dimension"] == 9);
    CHECK(j["cases"][0]["remainder_terms"].size() == 4);
    CHECK(j["cases"][0]["abba"].get<double>() <= 1e-10);
}

TEST_CASE("identity suite is seeded and passes") {
    const auto a = identity_suite(7, 20);
    const auto b = identity_suite(7, 20);
    CHECK(a.cases == 20);
    CHECK(a.max_symmetrization <= 1e-10);
    CHECK(a.expansion_holds == 20);
    CHECK(a.min_slack > 0.0);
    CHECK(a.max_symmetrization == b.max_symmetrization);
    CHECK(a.min_slack == b.min_slack);
}
