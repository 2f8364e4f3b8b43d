#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nlsphase/error.hpp"
#include "nlsphase/experiment.hpp"

using namespace nlsphase;

namespace {

struct CommonOptions {
    std::vector<std::string> configs;
    std::vector<std::string> presets;
    std::string out;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_inputs = true) {
    if (with_inputs) {
        cmd->add_option("--config", o.configs, "JSON run config (repeat for a sweep)");
        cmd->add_option("--preset", o.presets, "checked-in preset: example1..example4 (repeatable)");
    }
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed overriding the config");
}

std::vector<ExperimentConfig> gather(const CommonOptions& o, bool allow_default) {
    std::vector<ExperimentConfig> out;
    for (const auto& p : o.configs) out.push_back(load_config(p));
    for (const auto& p : o.presets) out.push_back(load_preset(p));
    if (out.empty()) {
        if (!allow_default) throw ValidationError("need --config or --preset");
        out.emplace_back();
        out.back().name = "default";
    }
    for (auto& c : out)
        if (o.seed) c.seed = *o.seed;
    return out;
}

std::string target_dir(const CommonOptions& o, const ExperimentConfig& c, bool sweep) {
    if (o.out.empty()) return sweep ? c.output + "/" + c.name : c.output;
    return sweep ? o.out + "/" + c.name : o.out;
}

int code_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ValidationError& x) {
        std::fprintf(stderr, "validation error: %s\n", x.what());
        return static_cast<int>(ExitCode::validation);
    } catch (const NumericalError& x) {
        std::fprintf(stderr, "numerical abort: %s\n", x.what());
        return static_cast<int>(ExitCode::numerical);
    } catch (const IoError& x) {
        std::fprintf(stderr, "i/o error: %s\n", x.what());
        return static_cast<int>(ExitCode::io);
    } catch (const std::exception& x) {
        std::fprintf(stderr, "error: %s\n", x.what());
        return static_cast<int>(ExitCode::numerical);
    }
}

using Runner = ExperimentSummary (*)(const ExperimentConfig&, const std::string&);

// Runs every config, `threads` at a time, each into its own directory.
int run_all(const CommonOptions& o, const std::vector<ExperimentConfig>& cfgs, Runner runner) {
    const bool sweep = cfgs.size() > 1;
    std::vector<int> codes(cfgs.size(), 0);
    std::vector<std::string> summaries(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
            try {
                const auto s = runner(cfgs[i], target_dir(o, cfgs[i], sweep));
                summaries[i] = report(s.directory);
            } catch (...) {
                codes[i] = code_of(std::current_exception());
            }
        }
    };
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(o.threads), cfgs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& s : summaries) std::cout << s;
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial NLS phase-space experiments"};
    app.require_subcommand(1);

    CommonOptions sim, free, chan, ident, mell;
    auto* simulate = app.add_subcommand("simulate", "run a config: trajectory, observables, verdicts");
    add_common(simulate, sim);
    auto* freewave = app.add_subcommand("freewave", "free-wave checks on the config's grid and data");
    add_common(freewave, free);
    auto* channels = app.add_subcommand("channels", "free-channel extraction and decomposition");
    add_common(channels, chan);
    auto* identities = app.add_subcommand("identities", "matrix identity and commutator-expansion suite");
    add_common(identities, ident, false);
    std::size_t cases = 100;
    identities->add_option("--cases", cases, "number of seeded matrix cases");
    auto* mellin = app.add_subcommand("mellin", "Mellin round trip, dilation eigenrelation, leakage");
    add_common(mellin, mell, false);
    auto* rep = app.add_subcommand("report", "summarize an artifact directory");
    std::string rep_dir;
    rep->add_option("--out,dir", rep_dir, "artifact directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::validation);
    }

    try {
        if (*simulate) return run_all(sim, gather(sim, false), &run_experiment);
        if (*channels) return run_all(chan, gather(chan, false), &run_channels);
        if (*freewave) return run_all(free, gather(free, true), &run_freewave);
        if (*identities) {
            const auto r = identity_suite(ident.seed.value_or(0), cases);
            std::printf("symmetrization max residual %s over %zu cases\n", fmt_num(r.max_symmetrization).c_str(),
                        r.cases);
            std::printf("commutator expansion bound holds on %zu/%zu cases, min slack %s\n", r.expansion_holds,
                        r.cases, fmt_num(r.min_slack).c_str());
            if (!ident.out.empty()) {
                std::filesystem::create_directories(ident.out);
                write_json(ident.out + "/identities.json", r.detail);
            }
            return 0;
        }
        if (*mellin) {
            const auto r = mellin_suite();
            std::printf("round trip %s\n", fmt_num(r.round_trip).c_str());
            std::printf("dilation eigenrelation interior error %s\n", fmt_num(r.eigen_interior_error).c_str());
            for (std::size_t i = 0; i < r.leakage.size(); ++i)
                std::printf("leakage M/N=%s: %s\n", fmt_num(r.leakage_ratios[i]).c_str(), fmt_num(r.leakage[i]).c_str());
            if (!mell.out.empty()) {
                std::filesystem::create_directories(mell.out);
                write_json(mell.out + "/mellin.json", r.detail);
            }
            return 0;
        }
        if (*rep) {
            std::cout << report(rep_dir);
            return 0;
        }
    } catch (...) {
        return code_of(std::current_exception());
    }
    return 0;
}
