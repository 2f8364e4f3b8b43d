#include "nlsphase/identity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/operators.hpp"
#include "nlsphase/quadrature.hpp"

namespace nlsphase {

namespace {
CMatrix comm(const CMatrix& x, const CMatrix& y) { return x * y - y * x; }
}  // namespace

double SymmetrizationReport::max() const {
    return std::max({ab2a, a2bc2, abba, abc, a2bc2_sym});
}

double symmetrization_tolerance(std::size_t d, double scale) {
    const double dd = static_cast<double>(d);
    return dd * dd * 1e-12 * scale * scale * scale;
}

SymmetrizationReport check_symmetrization(const HermitianMatrix& Ah, const HermitianMatrix& Bh,
                                          const HermitianMatrix& Ch) {
    Ah.validate();
    Bh.validate();
    Ch.validate();
    const CMatrix &A = Ah.m, &B = Bh.m, &C = Ch.m;
    if (A.rows() != B.rows() || A.rows() != C.rows()) throw ValidationError("symmetrization: dimension mismatch");
    const double scale = std::max({1.0, A.norm(), C.norm()});
    if (comm(A, C).norm() > 1e-12 * scale * scale)
        throw ValidationError("symmetrization: [A,C] = 0 is required");
    SymmetrizationReport r;
    r.ab2a = (A * B * B * A - (B * A * A * B + comm(comm(A, B), B) * A + B * comm(comm(A, B), A))).norm();
    const CMatrix AC = A * C;
    r.a2bc2 = (A * A * B * C * C - (AC * B * AC + A * A * comm(B, C) * C + AC * comm(A, B) * C)).norm();
    r.abba = (A * A * B + B * A * A - (2.0 * A * B * A + comm(A, comm(A, B)))).norm();
    r.abc = (A * B * C - C * B * A - (A * comm(B, C) + C * comm(A, B))).norm();
    const std::vector<CMatrix> terms{A * comm(comm(A, B), C) * C, C * comm(comm(C, B), A) * A,
                                     A * comm(C, comm(C, B)) * A, C * comm(A, comm(A, B)) * C};
    CMatrix R = CMatrix::Zero(A.rows(), A.cols());
    for (const auto& t : terms) {
        R += t;
        r.remainder_terms.push_back(t.norm());
    }
    r.a2bc2_sym = (A * A * B * C * C + C * C * B * A * A - (2.0 * AC * B * AC + R)).norm();
    return r;
}

DoubleCommutatorResult check_double_commutator(const SpectralFunction& f1, const SpectralFunction& f2,
                                               const HermitianMatrix& Ah, const HermitianMatrix& Bh) {
    Ah.validate();
    Bh.validate();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Ah.m);
    if (es.info() != Eigen::Success) throw NumericalError("double commutator: eigendecomposition failed");
    const auto& a = es.eigenvalues();
    const CMatrix& V = es.eigenvectors();
    const CMatrix Bt = V.adjoint() * Bh.m * V;
    const Eigen::Index d = a.size();
    // Direct: ((f1_i - f1_j)(f2_i - f2_j)) B_ij in the eigenbasis.
    CMatrix direct(d, d), quad(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            direct(i, j) = (f1(a(i)) - f1(a(j))) * (f2(a(i)) - f2(a(j))) * Bt(i, j);
    // Quadrature: element = -X_ij G_{f1}(i,j) G_{f2}(i,j), X = ad_A^2(B),
    // G_f(i,j) = int hat f(s) e^{i s a_i} (1 - e^{-i s (a_i - a_j)}) / (i (a_i - a_j)) ds.
    double amax = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) amax = std::max(amax, std::abs(a(i)));
    auto G = [&](const SpectralFunction& f) {
        CMatrix g = CMatrix::Zero(d, d);
        const double S = f.window_for_tail(1e-9);
        const double ds = std::numbers::pi / (1.5 * amax + 2.0 * f.support_radius() + 1.0);
        const std::size_t nodes = static_cast<std::size_t>(std::ceil(S / ds));
        for (std::size_t k = 0; k < nodes; ++k) {
            for (double sign : {1.0, -1.0}) {
                const double s = sign * (static_cast<double>(k) + 0.5) * ds;
                const cplx w = f.decaying_transform(s) * ds;
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index j = 0; j < d; ++j) {
                        const double diff = a(i) - a(j);
                        if (std::abs(diff) < 1e-12) continue;
                        const cplx e = std::exp(cplx(0.0, s * a(i))) * (1.0 - std::exp(cplx(0.0, -s * diff)));
                        g(i, j) += w * e / cplx(0.0, diff);
                    }
            }
        }
        return g;
    };
    const CMatrix g1 = G(f1), g2 = G(f2);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const double diff = a(j) - a(i);
            quad(i, j) = -(diff * diff) * Bt(i, j) * g1(i, j) * g2(i, j);
        }
    const double dn = direct.norm();
    const double res = (direct - quad).norm();
    return {dn > 0.0 ? res / dn : res, dn};
}

std::vector<HeisenbergRow> heisenberg_residual(const Trajectory& run, const FieldOperator& op) {
    if (run.size() < 3) throw ValidationError("heisenberg residual: need at least 3 snapshots");
    std::vector<double> expect(run.size());
    for (std::size_t i = 0; i < run.size(); ++i)
        expect[i] = inner(op(run.snapshots[i]), run.snapshots[i]).real();
    std::vector<HeisenbergRow> rows;
    for (std::size_t i = 1; i + 1 < run.size(); ++i) {
        const RadialField& f = run.snapshots[i];
        const double t = f.time;
        const double lhs = (expect[i + 1] - expect[i - 1]) / (run.snapshots[i + 1].time - run.snapshots[i - 1].time);
        const Grid& g = *f.grid;
        const RadialField af = op(f);
        // [-i Delta, A] f = -i Delta (A f) + i A (Delta f)
        const auto lap_af = apply_laplacian(g, af.u);
        const RadialField a_lap = op(RadialField(f.grid, apply_laplacian(g, f.u), t));
        RadialField c = RadialField::zeros(f.grid, t);
        for (std::size_t j = 0; j < c.size(); ++j)
            c.u[j] = cplx(0.0, -1.0) * lap_af[j] + cplx(0.0, 1.0) * a_lap.u[j];
        const double comm_term = inner(c, f).real();
        const RadialField nf = eval_nonlinearity(run.spec, f, t);
        const double inter = 2.0 * inner(nf, af).imag();
        rows.push_back({t, lhs, comm_term, inter, std::abs(lhs - comm_term - inter)});
    }
    return rows;
}

json symmetrization_fixture(const std::vector<std::uint64_t>& seeds, std::size_t d,
                            const std::vector<SymmetrizationReport>& reports) {
    json cases = json::array();
    for (std::size_t i = 0; i < reports.size() && i < seeds.size(); ++i) {
        const auto& r = reports[i];
        cases.push_back({{"seed", seeds[i]},
                         {"dimension", d},
                         {"ab2a", r.ab2a},
                         {"a2bc2", r.a2bc2},
                         {"abba", r.abba},
                         {"abc", r.abc},
                         {"a2bc2_sym", r.a2bc2_sym},
                         {"remainder_terms", r.remainder_terms}});
    }
    return {{"kind", "symmetrization"}, {"cases", cases}};
}

}  // namespace nlsphase
