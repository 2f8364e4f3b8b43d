#include "nlsphase/matrix_oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nlsphase/error.hpp"

namespace nlsphase {

void HermitianMatrix::validate() const {
    if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("matrix: must be square and nonempty");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-14 * scale) throw ValidationError("matrix: not Hermitian");
}

HermitianMatrix HermitianMatrix::random(std::size_t d, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) x(i, j) = cplx(g(rng), g(rng));
    x *= scale / std::sqrt(2.0 * static_cast<double>(d));
    CMatrix h = 0.5 * (x + x.adjoint());
    return {h, seed};
}

HermitianMatrix HermitianMatrix::from(CMatrix m, std::uint64_t seed) {
    HermitianMatrix h{std::move(m), seed};
    h.validate();
    return h;
}

CMatrix function_of(const CMatrix& A, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("matrix: eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    Eigen::VectorXcd d(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) d(i) = f(ev(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix ad_power(const CMatrix& B, const CMatrix& A, int k) {
    CMatrix x = B;
    for (int i = 0; i < k; ++i) x = x * A - A * x;
    return x;
}

double operator_norm(const CMatrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues()(0);
}

TransformMoment transform_moment(const SpectralFunction& f, int n) {
    if (n < 1) throw ValidationError("transform moment: order must be >= 1");
    const auto c = f.jump_magnitudes();
    // |hat f(s)| |s|^n <= (1/2pi) sum_k c_k |s|^{n-k-2}: integrable at infinity iff every
    // nonzero c_k has k >= n.
    bool finite = true;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] > 0.0 && static_cast<int>(k) < n) finite = false;
    if (!finite || f.pieces().empty()) return {finite ? 0.0 : INFINITY, finite};
    const double S = f.window_for_tail(1e-10);
    const double ds = std::min(0.05, 0.1 / (1.0 + f.support_radius()));
    const std::size_t nodes = static_cast<std::size_t>(std::ceil(S / ds));
    double value = f.transform_moment(n, S, nodes);
    for (std::size_t k = static_cast<std::size_t>(n); k < c.size(); ++k) {
        const double p = static_cast<double>(k) + 1.0 - n;
        value += 2.0 * c[k] / (2.0 * std::numbers::pi) * std::pow(S, -p) / p;
    }
    return {value, true};
}

ExpansionResult commutator_expansion_matrix(const HermitianMatrix& B, const HermitianMatrix& A,
                                            const SpectralFunction& f, int n) {
    return commutator_expansion_matrix(B, A, f, n, transform_moment(f, n));
}

ExpansionResult commutator_expansion_matrix(const HermitianMatrix& B, const HermitianMatrix& A,
                                            const SpectralFunction& f, int n, const TransformMoment& moment) {
    A.validate();
    B.validate();
    if (A.dim() != B.dim()) throw ValidationError("matrix oracle: dimension mismatch");
    if (A.dim() > 64) throw ValidationError("matrix oracle: dimension above the cap of 64");
    if (n < 1) throw ValidationError("matrix oracle: order must be >= 1");
    const CMatrix fA = function_of(A.m, [&](double l) { return f(l); });
    const CMatrix exact = B.m * fA - fA * B.m;
    ExpansionResult res;
    CMatrix sum = CMatrix::Zero(A.m.rows(), A.m.cols());
    double fact = 1.0;
    for (int k = 1; k < n; ++k) {
        fact *= k;
        const CMatrix dk = function_of(A.m, [&](double l) { return f.derivative(l, k); });
        CMatrix term = dk * ad_power(B.m, A.m, k) / fact;
        sum += term;
        res.terms.push_back(std::move(term));
    }
    res.remainder = exact - sum;
    res.remainder_norm = operator_norm(res.remainder);
    double nfact = 1.0;
    for (int k = 2; k <= n; ++k) nfact *= k;
    res.moment_finite = moment.finite;
    res.bound = operator_norm(ad_power(B.m, A.m, n)) * moment.value / nfact;
    res.slack = res.bound - res.remainder_norm;
    return res;
}

}  // namespace nlsphase
