#pragma once

#include <string>
#include <vector>

#include "nlsphase/dynamics.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

using Table = std::vector<std::vector<double>>;

struct ChannelResult {
    RadialField omega;                // at the last sample time
    std::vector<RadialField> omegas;  // e^{-i Delta t_k} F(<x>/t_k^alpha0) phi(t_k)
    std::vector<double> times;
    Table cauchy_l2;
    Table cauchy_h1;  // || p^2 (1 + p^2)^{-1/2} (omega_i - omega_j) ||
    double alpha0 = 0.0;
    Cutoff F = Cutoff::rising(1.0);
    double late_gap = 0.0;  // L2 distance of the last two samples
    double tolerance = 0.0;
    bool accepted = false;
};

// Sample times must coincide with snapshots. tolerance <= 0 selects 0.1 ||phi_0||.
ChannelResult extract_free_channel(const Trajectory& run, double alpha0, const Cutoff& F,
                                   const std::vector<double>& sample_times, double tolerance = 0.0);

double h1_surrogate_norm(const RadialField& f);

struct DecompositionRow {
    double t;
    double norm_wb;
    double exterior_mass;       // mass of phi_wb outside r <= t^alpha
    double mean_bracket_x;      // <<x>> of phi_wb, normalized by its mass
    double orthogonality;       // |(phi_wb, e^{i Delta t} probe)|
    double mass_bookkeeping;    // ||phi_wb||^2 + ||omega||^2 - ||phi_0||^2
    double identity_residual;   // ||phi - e^{i Delta t} omega - phi_wb||
};

struct DecompositionReport {
    std::vector<DecompositionRow> rows;
    std::vector<RadialField> weakly_bounded;  // phi_wb(t_k) per snapshot
    double exterior_exponent = 0.0;           // log-log slope of exterior mass
    double orthogonality_exponent = 0.0;
    bool below_floor = false;  // ||phi_wb||^2 < 1e-3 at the end: verdicts suppressed
};

DecompositionReport decompose(const Trajectory& run, const ChannelResult& channel, double alpha,
                              const RadialField& probe);

struct WlsDiagnostics {
    double exponent = 0.0;
    double stderr_exponent = 0.0;
    std::string verdict;  // ballistic | weakly localized | localized | intermediate | below measurement floor
};

// Growth exponent of <<x>>_t over the series, which must span T >= 4 t0.
WlsDiagnostics wls_diagnostics(const std::vector<RadialField>& series);

struct ZeroFrequencySeries {
    std::vector<double> times;
    std::vector<double> values;  // <F(|p| t^beta <= 1)>
    double tail_oscillation = 0.0;
    bool settled = false;  // only asserted for beta > 2/3
};

ZeroFrequencySeries zero_frequency_mass(const Trajectory& run, double beta, double tolerance = 1e-3);

enum class MicrolocalOperator { gamma, dilation };

struct MicrolocalMap {
    Table mass;  // mass[i][j] = (B_j chi_i f, chi_i f)
    std::vector<double> shell_mass;  // ||chi_i f||^2
    std::vector<double> row_sum;
};

// Shells chi_i in <x>/t^{alpha_i} and bands B_j in |op| t^{alpha_j}, both smooth
// partitions of unity; alphas ascending.
MicrolocalMap microlocal_map(const RadialField& f, double t, const std::vector<double>& alphas,
                             MicrolocalOperator op);

struct SelfSimilarRecord {
    std::vector<double> times;
    std::vector<RadialField> profiles;
    Table distances;
    bool sequential = false;  // some consecutive pair closer than tolerance
};

// e^{i a A} f with e^a = scale: (reduced) u -> sqrt(scale) u(scale r).
RadialField dilate(const RadialField& f, double scale);

SelfSimilarRecord self_similar_profile(const std::vector<RadialField>& series, double alpha,
                                       const std::vector<double>& sample_times, double momentum_cap = 10.0,
                                       double tolerance = 1e-6);

struct SequentialBound {
    double M;  // radius multiplier: |x| <= M sqrt(t)
    std::vector<double> times;
    std::vector<double> values;  // || A phi ||_{L2(|x| <= M sqrt t)}
    std::vector<double> window_min_times;
    std::vector<double> window_min_values;
    double slope = 0.0;  // log-log slope of the window minima
};

std::vector<SequentialBound> sequential_A_bound(const std::vector<RadialField>& series,
                                                const std::vector<double>& M_list);

json channel_json(const ChannelResult& c);

}  // namespace nlsphase
