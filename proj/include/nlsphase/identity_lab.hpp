#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlsphase/dynamics.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/matrix_oracle.hpp"

namespace nlsphase {

struct SymmetrizationReport {
    double ab2a;      // A B^2 A = B A^2 B + [[A,B],B] A + B [[A,B],A]
    double a2bc2;     // A^2 B C^2 = (AC) B (AC) + A^2 [B,C] C + A C [A,B] C
    double abba;      // A^2 B + B A^2 = 2 A B A + [A,[A,B]]
    double abc;       // A B C - C B A = A [B,C] + C [A,B]
    double a2bc2_sym; // A^2 B C^2 + C^2 B A^2 = 2 (AC) B (AC) + R(A,B,C)
    // Term-by-term: each of the four double-commutator pieces of R, as computed.
    std::vector<double> remainder_terms;
    double max() const;
};

// The identities needing [A,C] = 0 throw when the precondition fails.
SymmetrizationReport check_symmetrization(const HermitianMatrix& A, const HermitianMatrix& B,
                                          const HermitianMatrix& C);
// Residual bound d^2 1e-12 scale^3 used by the suite.
double symmetrization_tolerance(std::size_t d, double scale);

struct DoubleCommutatorResult {
    double residual;  // relative Frobenius residual
    double direct_norm;
};

// [f1(A), [f2(A), B]] directly versus the double Fourier-integral representation.
DoubleCommutatorResult check_double_commutator(const SpectralFunction& f1, const SpectralFunction& f2,
                                               const HermitianMatrix& A, const HermitianMatrix& B);

using FieldOperator = std::function<RadialField(const RadialField&)>;

struct HeisenbergRow {
    double t;
    double lhs;         // centered difference of <A>
    double commutator;  // <[-i Delta, A]>
    double interaction; // 2 Im (A phi, N phi) in the conjugate-linear-first convention
    double residual;
};

// Time-independent self-adjoint A applied by `op`.
std::vector<HeisenbergRow> heisenberg_residual(const Trajectory& run, const FieldOperator& op);

json symmetrization_fixture(const std::vector<std::uint64_t>& seeds, std::size_t d,
                            const std::vector<SymmetrizationReport>& reports);

}  // namespace nlsphase
