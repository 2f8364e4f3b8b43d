#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nlsphase/spectral_function.hpp"

namespace nlsphase {

using CMatrix = Eigen::MatrixXcd;

struct HermitianMatrix {
    CMatrix m;
    std::uint64_t seed = 0;

    std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }
    void validate() const;
    // Seeded GUE-like sample with entries of variance scale^2 / d, Hermitized by averaging.
    static HermitianMatrix random(std::size_t d, std::uint64_t seed, double scale = 1.0);
    static HermitianMatrix from(CMatrix m, std::uint64_t seed = 0);
};

// f(A) through the eigendecomposition of A.
CMatrix function_of(const CMatrix& A, const std::function<double(double)>& f);
// ad_A^k(B), ad_A(B) = [B, A].
CMatrix ad_power(const CMatrix& B, const CMatrix& A, int k);
double operator_norm(const CMatrix& M);

// int |hat f(s)| |s|^n ds split into quadrature over |s| <= S and the analytic envelope tail.
struct TransformMoment {
    double value;
    bool finite;
};
TransformMoment transform_moment(const SpectralFunction& f, int n);

struct ExpansionResult {
    std::vector<CMatrix> terms;  // (1/k!) f^{(k)}(A) ad_A^k(B), k = 1..n-1
    CMatrix remainder;
    double remainder_norm;
    double bound;  // (1/n!) ||ad_A^n(B)|| int |hat f| |s|^n
    double slack;  // bound - remainder_norm
    bool moment_finite;
};

ExpansionResult commutator_expansion_matrix(const HermitianMatrix& B, const HermitianMatrix& A,
                                            const SpectralFunction& f, int n);
// Reuses a precomputed moment (the same function across many cases).
ExpansionResult commutator_expansion_matrix(const HermitianMatrix& B, const HermitianMatrix& A,
                                            const SpectralFunction& f, int n, const TransformMoment& moment);

}  // namespace nlsphase
