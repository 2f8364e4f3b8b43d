#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsphase/channels.hpp"
#include "nlsphase/dynamics.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/propagation.hpp"

namespace nlsphase {

inline constexpr const char* kVersion = "0.1.0";

struct InitialDataSpec {
    enum class Kind { gaussian, band_limited, self_similar, file };
    Kind kind = Kind::gaussian;
    double amplitude = 1.0;
    double width = 1.0;      // gaussian: exp(-r^2 / (2 width^2))
    double k_lo = 1.0;       // band_limited: gaussian filtered to |k| in [k_lo, k_hi]
    double k_hi = 2.0;
    double alpha = 0.5;      // self_similar: t^{-3 alpha/2} S(r / t^alpha) at t_ref
    double t_ref = 1.0;
    double noise = 0.0;      // seeded complex perturbation, relative to amplitude
    std::string path;        // file: CSV written by write_field_csv
};

struct PropagationRequest {
    PropagationPreset preset = PropagationPreset::PE;
    PresetParams params;
};

struct ChannelRequest {
    double alpha0 = 0.6;
    std::vector<double> samples;
    double tolerance = 0.0;
    std::optional<double> decompose_alpha;
};

struct MorawetzRequest {
    double M = 20.0;
    double t1 = 10.0;
    double t2 = 40.0;
    bool allow_scaled = true;
};

struct ExperimentConfig {
    std::string name = "run";
    GridSpec grid;
    RunOptions run;
    NonlinearitySpec nonlinearity;
    InitialDataSpec initial;
    std::optional<double> gamma_limit_alpha;
    std::vector<PropagationRequest> propagation;
    std::optional<MorawetzRequest> morawetz;
    std::optional<double> zero_frequency_beta;
    bool virial = false;
    bool export_snapshots = false;
    std::optional<ChannelRequest> channel;
    std::string output = "out";
    std::uint64_t seed = 0;

    static ExperimentConfig from_json(const json& j);
    json to_json() const;
    // Every violated gate, one message each; empty when the config is runnable.
    std::vector<std::string> violations() const;
    // Throws ValidationError listing every violation.
    void validate() const;
    std::string hash() const;
};

ExperimentConfig load_config(const std::string& path);
// Checked-in example configs by name (example1..example4).
ExperimentConfig load_preset(const std::string& name);
std::vector<std::string> preset_names();

RadialField make_initial_data(const GridPtr& grid, const InitialDataSpec& spec, std::uint64_t seed);

struct ExperimentSummary {
    std::string directory;
    std::vector<std::string> files;
    json verdict;
};

// Runs the full pipeline and writes CSVs, verdict.json and MANIFEST.json to `dir`.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& dir);
// Channel extraction only (plus the trajectory summary).
ExperimentSummary run_channels(const ExperimentConfig& cfg, const std::string& dir);
// Free-wave checks on the config's grid and initial data.
ExperimentSummary run_freewave(const ExperimentConfig& cfg, const std::string& dir);

// Summary text of an artifact directory; throws IoError on missing or corrupted files.
std::string report(const std::string& dir);

struct IdentitySuiteResult {
    std::size_t cases = 0;
    double max_symmetrization = 0.0;
    std::size_t expansion_holds = 0;
    double min_slack = 0.0;
    double seconds = 0.0;
    json detail;
};

// Seeded 8..16 dimensional matrix cases; no grid involved.
IdentitySuiteResult identity_suite(std::uint64_t seed, std::size_t cases = 100);

struct MellinSuiteResult {
    double round_trip = 0.0;
    double eigen_interior_error = 0.0;
    std::vector<double> leakage_ratios;  // M/N = 4, 8, 16
    std::vector<double> leakage;
    bool leakage_decreasing = false;
    json detail;
};

MellinSuiteResult mellin_suite(const GridSpec& grid = {200.0, 4096, 0.005});

void write_manifest(const std::string& dir, const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const json& extra = json::object());

}  // namespace nlsphase
