#include "nlsphase/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "nlsphase/error.hpp"
#include "nlsphase/identity_lab.hpp"
#include "nlsphase/matrix_oracle.hpp"
#include "nlsphase/mellin.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

namespace fs = std::filesystem;

namespace {

const char* kind_name(InitialDataSpec::Kind k) {
    switch (k) {
        case InitialDataSpec::Kind::gaussian: return "gaussian";
        case InitialDataSpec::Kind::band_limited: return "band-limited";
        case InitialDataSpec::Kind::self_similar: return "self-similar";
        case InitialDataSpec::Kind::file: return "file";
    }
    return "gaussian";
}

InitialDataSpec::Kind kind_from(const std::string& s) {
    if (s == "gaussian") return InitialDataSpec::Kind::gaussian;
    if (s == "band-limited") return InitialDataSpec::Kind::band_limited;
    if (s == "self-similar") return InitialDataSpec::Kind::self_similar;
    if (s == "file") return InitialDataSpec::Kind::file;
    throw ValidationError("initial data: unknown kind '" + s + "'");
}

const char* profile_name(PotentialTerm::Profile p) {
    switch (p) {
        case PotentialTerm::Profile::constant: return "constant";
        case PotentialTerm::Profile::cosine: return "cosine";
        case PotentialTerm::Profile::decay: return "decay";
    }
    return "constant";
}

PotentialTerm::Profile profile_from(const std::string& s) {
    if (s == "constant") return PotentialTerm::Profile::constant;
    if (s == "cosine") return PotentialTerm::Profile::cosine;
    if (s == "decay") return PotentialTerm::Profile::decay;
    throw ValidationError("potential: unknown time profile '" + s + "'");
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ValidationError(where + ": unknown key '" + k + "'");
}

json params_json(const PresetParams& q) {
    return {{"alpha", q.alpha}, {"beta", q.beta},   {"delta", q.delta}, {"c0", q.c0},
            {"c1", q.c1},       {"a", q.a},         {"b", q.b},         {"c", q.c},
            {"gamma_cap", q.gamma_cap}, {"t0", q.t0}};
}

PresetParams params_from(const json& j) {
    PresetParams q;
    q.alpha = j.value("alpha", q.alpha);
    q.beta = j.value("beta", q.beta);
    q.delta = j.value("delta", q.delta);
    q.c0 = j.value("c0", q.c0);
    q.c1 = j.value("c1", q.c1);
    q.a = j.value("a", q.a);
    q.b = j.value("b", q.b);
    q.c = j.value("c", q.c);
    q.gamma_cap = j.value("gamma_cap", q.gamma_cap);
    q.t0 = j.value("t0", q.t0);
    return q;
}

double snapshot_spacing(const ExperimentConfig& c) { return c.grid.dt * static_cast<double>(c.run.stride); }

bool on_snapshot_lattice(double t, double spacing) {
    const double k = std::round(t / spacing);
    return k >= 0.0 && std::abs(k * spacing - t) <= 1e-9 * std::max(1.0, t);
}

template <typename F>
void gate(std::vector<std::string>& out, F&& check) {
    try {
        check();
    } catch (const ValidationError& e) {
        out.emplace_back(e.what());
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

double relative_l2(const RadialField& a, const RadialField& b) { return norm(a - b) / norm(b); }

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    try {
        reject_unknown(j, {"name", "seed", "output", "grid", "run", "nonlinearity", "initial", "observables",
                           "channel", "export_snapshots"},
                       "config");
        ExperimentConfig c;
        c.name = j.value("name", c.name);
        c.seed = j.value("seed", c.seed);
        c.output = j.value("output", c.output);
        c.export_snapshots = j.value("export_snapshots", false);
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            reject_unknown(g, {"r_max", "n", "dt"}, "grid");
            c.grid.r_max = g.value("r_max", c.grid.r_max);
            c.grid.n = g.value("n", c.grid.n);
            c.grid.dt = g.value("dt", c.grid.dt);
        }
        if (j.contains("run")) {
            const auto& r = j["run"];
            reject_unknown(r, {"t_end", "stride", "boundary_threshold", "h1_cap"}, "run");
            c.run.t_end = r.value("t_end", c.run.t_end);
            c.run.stride = r.value("stride", c.run.stride);
            c.run.boundary_threshold = r.value("boundary_threshold", c.run.boundary_threshold);
            c.run.h1_cap = r.value("h1_cap", c.run.h1_cap);
        }
        c.run.dt = c.grid.dt;
        if (j.contains("nonlinearity")) {
            const auto& n = j["nonlinearity"];
            reject_unknown(n, {"a", "p", "b", "m", "n", "potential", "weighted"}, "nonlinearity");
            auto& s = c.nonlinearity;
            s.a = n.value("a", s.a);
            s.p = n.value("p", s.p);
            s.b = n.value("b", s.b);
            s.m = n.value("m", s.m);
            s.n = n.value("n", s.n);
            if (n.contains("potential")) {
                const auto& v = n["potential"];
                reject_unknown(v, {"amplitude", "q", "profile", "omega", "kappa"}, "potential");
                PotentialTerm p;
                p.amplitude = v.value("amplitude", p.amplitude);
                p.q = v.value("q", p.q);
                p.profile = profile_from(v.value("profile", std::string("constant")));
                p.omega = v.value("omega", p.omega);
                p.kappa = v.value("kappa", p.kappa);
                s.potential = p;
            }
            if (n.contains("weighted")) {
                const auto& w = n["weighted"];
                reject_unknown(w, {"w_amp", "w_decay", "exponent"}, "weighted");
                WeightedTerm t;
                t.w_amp = w.value("w_amp", t.w_amp);
                t.w_decay = w.value("w_decay", t.w_decay);
                t.exponent = w.value("exponent", t.exponent);
                s.weighted = t;
            }
        }
        if (j.contains("initial")) {
            const auto& i = j["initial"];
            reject_unknown(i, {"kind", "amplitude", "width", "k_lo", "k_hi", "alpha", "t_ref", "noise", "path"},
                           "initial");
            auto& d = c.initial;
            d.kind = kind_from(i.value("kind", std::string("gaussian")));
            d.amplitude = i.value("amplitude", d.amplitude);
            d.width = i.value("width", d.width);
            d.k_lo = i.value("k_lo", d.k_lo);
            d.k_hi = i.value("k_hi", d.k_hi);
            d.alpha = i.value("alpha", d.alpha);
            d.t_ref = i.value("t_ref", d.t_ref);
            d.noise = i.value("noise", d.noise);
            d.path = i.value("path", d.path);
        }
        if (j.contains("observables")) {
            const auto& o = j["observables"];
            reject_unknown(o, {"gamma_limit", "propagation", "morawetz", "zero_frequency", "virial"}, "observables");
            if (o.contains("gamma_limit")) c.gamma_limit_alpha = o["gamma_limit"].value("alpha", 0.6);
            if (o.contains("propagation"))
                for (const auto& p : o["propagation"]) {
                    PropagationRequest r;
                    r.preset = preset_from_name(p.at("preset").get<std::string>());
                    r.params = params_from(p);
                    c.propagation.push_back(r);
                }
            if (o.contains("morawetz")) {
                const auto& m = o["morawetz"];
                MorawetzRequest r;
                r.M = m.value("M", r.M);
                r.t1 = m.value("t1", r.t1);
                r.t2 = m.value("t2", r.t2);
                r.allow_scaled = m.value("allow_scaled", r.allow_scaled);
                c.morawetz = r;
            }
            if (o.contains("zero_frequency")) c.zero_frequency_beta = o["zero_frequency"].value("beta", 0.7);
            c.virial = o.value("virial", false);
        }
        if (j.contains("channel")) {
            const auto& h = j["channel"];
            reject_unknown(h, {"alpha0", "samples", "tolerance", "decompose_alpha"}, "channel");
            ChannelRequest r;
            r.alpha0 = h.value("alpha0", r.alpha0);
            r.samples = h.value("samples", std::vector<double>{});
            r.tolerance = h.value("tolerance", r.tolerance);
            if (h.contains("decompose_alpha")) r.decompose_alpha = h["decompose_alpha"].get<double>();
            c.channel = r;
        }
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

json ExperimentConfig::to_json() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["output"] = output;
    j["grid"] = {{"r_max", grid.r_max}, {"n", grid.n}, {"dt", grid.dt}};
    j["run"] = {{"t_end", run.t_end},
                {"stride", run.stride},
                {"boundary_threshold", run.boundary_threshold},
                {"h1_cap", run.h1_cap}};
    const auto& s = nonlinearity;
    json n = {{"a", s.a}, {"p", s.p}, {"b", s.b}, {"m", s.m}, {"n", s.n}};
    if (s.potential)
        n["potential"] = {{"amplitude", s.potential->amplitude},
                          {"q", s.potential->q},
                          {"profile", profile_name(s.potential->profile)},
                          {"omega", s.potential->omega},
                          {"kappa", s.potential->kappa}};
    if (s.weighted)
        n["weighted"] = {
            {"w_amp", s.weighted->w_amp}, {"w_decay", s.weighted->w_decay}, {"exponent", s.weighted->exponent}};
    j["nonlinearity"] = n;
    const auto& d = initial;
    j["initial"] = {{"kind", kind_name(d.kind)}, {"amplitude", d.amplitude}, {"width", d.width},
                    {"k_lo", d.k_lo},            {"k_hi", d.k_hi},           {"alpha", d.alpha},
                    {"t_ref", d.t_ref},          {"noise", d.noise},         {"path", d.path}};
    json o = json::object();
    if (gamma_limit_alpha) o["gamma_limit"] = {{"alpha", *gamma_limit_alpha}};
    if (!propagation.empty()) {
        o["propagation"] = json::array();
        for (const auto& p : propagation) {
            json e = {{"preset", preset_name(p.preset)}};
            e.update(params_json(p.params));
            o["propagation"].push_back(e);
        }
    }
    if (morawetz)
        o["morawetz"] = {
            {"M", morawetz->M}, {"t1", morawetz->t1}, {"t2", morawetz->t2}, {"allow_scaled", morawetz->allow_scaled}};
    if (zero_frequency_beta) o["zero_frequency"] = {{"beta", *zero_frequency_beta}};
    o["virial"] = virial;
    j["observables"] = o;
    if (channel) {
        json h = {{"alpha0", channel->alpha0}, {"samples", channel->samples}, {"tolerance", channel->tolerance}};
        if (channel->decompose_alpha) h["decompose_alpha"] = *channel->decompose_alpha;
        j["channel"] = h;
    }
    j["export_snapshots"] = export_snapshots;
    return j;
}

std::string ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("output");
    return hex64(fnv1a(j.dump()));
}

std::vector<std::string> ExperimentConfig::violations() const {
    std::vector<std::string> v;
    gate(v, [&] { grid.validate(); });
    gate(v, [&] { nonlinearity.validate(); });
    if (!(run.t_end > 0.0)) v.emplace_back("run: t_end must be positive");
    if (run.stride == 0) v.emplace_back("run: snapshot stride must be positive");
    if (!(run.boundary_threshold > 0.0)) v.emplace_back("run: boundary threshold must be positive");
    const double T = run.t_end;
    const double spacing = snapshot_spacing(*this);

    const auto& d = initial;
    if (!std::isfinite(d.amplitude) || !(d.amplitude > 0.0)) v.emplace_back("initial data: amplitude must be positive");
    if (!(d.width > 0.0)) v.emplace_back("initial data: width must be positive");
    if (!(d.noise >= 0.0)) v.emplace_back("initial data: noise must be nonnegative");
    if (d.kind == InitialDataSpec::Kind::band_limited) {
        const double k_max = std::numbers::pi * static_cast<double>(grid.n) / grid.r_max;
        if (!(d.k_hi > d.k_lo && d.k_lo >= 0.0)) v.emplace_back("initial data: band needs 0 <= k_lo < k_hi");
        if (d.k_hi >= 0.5 * k_max) v.emplace_back("initial data: band exceeds half the grid's momentum range");
    }
    if (d.kind == InitialDataSpec::Kind::self_similar) {
        if (!(d.alpha > 0.0 && d.alpha <= 0.5)) v.emplace_back("initial data: self-similar alpha must lie in (0, 1/2]");
        if (!(d.t_ref > 0.0)) v.emplace_back("initial data: self-similar t_ref must be positive");
    }
    if (d.kind == InitialDataSpec::Kind::file && d.path.empty()) v.emplace_back("initial data: file path missing");

    if (gamma_limit_alpha) {
        const double a = *gamma_limit_alpha;
        if (!(a > 1.0 / 3.0 && a < 1.0)) v.emplace_back("gamma limit: alpha must lie in (1/3, 1)");
        else if (!(std::pow(T, a) > 4.0)) v.emplace_back("gamma limit: run too short, need t_end^alpha > 4");
    }
    for (const auto& p : propagation) {
        gate(v, [&] { validate_preset(p.preset, p.params); });
        if (p.preset == PropagationPreset::Bab || !(p.params.alpha > 0.0)) continue;
        const double t0 = p.params.t0 > 0.0 ? p.params.t0 : std::pow(4.0, 1.0 / p.params.alpha);
        if (!(std::pow(T, p.params.alpha) > 4.0))
            v.emplace_back(preset_name(p.preset) + ": run never reaches the regime t^alpha >= 4");
        else if (T < 4.0 * t0)
            v.emplace_back(preset_name(p.preset) + ": dyadic tail windows need t_end >= 4 t0 (t0 = " + fmt_num(t0) + ")");
    }
    if (morawetz) {
        const auto& m = *morawetz;
        if (!(m.M >= 4.0)) v.emplace_back("exterior Morawetz: M must be at least 4");
        if (m.M < 100.0 && !m.allow_scaled) v.emplace_back("exterior Morawetz: M < 100 needs allow_scaled");
        if (!(m.t1 >= 0.0 && m.t2 > m.t1 && m.t2 <= T + 1e-12))
            v.emplace_back("exterior Morawetz: need 0 <= t1 < t2 <= t_end");
    }
    if (zero_frequency_beta && !(*zero_frequency_beta > 0.0)) v.emplace_back("zero frequency: beta must be positive");
    if (virial && !nonlinearity.autonomous()) v.emplace_back("virial: needs an autonomous interaction");
    if (channel) {
        const auto& c = *channel;
        if (!(c.alpha0 > 0.5 && c.alpha0 < 1.0)) v.emplace_back("channel: alpha0 must lie in (1/2, 1)");
        if (c.samples.size() < 2) v.emplace_back("channel: need at least two sample times");
        for (std::size_t i = 0; i < c.samples.size(); ++i) {
            const double t = c.samples[i];
            if (!(t > 0.0 && t <= T + 1e-12)) v.emplace_back("channel: sample time " + fmt_num(t) + " outside (0, t_end]");
            else if (spacing > 0.0 && !on_snapshot_lattice(t, spacing))
                v.emplace_back("channel: sample time " + fmt_num(t) + " is not a snapshot time");
            if (i > 0 && !(t > c.samples[i - 1])) v.emplace_back("channel: sample times must increase");
        }
        if (c.decompose_alpha && !(*c.decompose_alpha > 0.0 && *c.decompose_alpha < 1.0))
            v.emplace_back("decomposition: alpha must lie in (0, 1)");
    }
    return v;
}

void ExperimentConfig::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "config '" + name + "' failed " + std::to_string(v.size()) + " gate(s):";
    for (const auto& s : v) msg += "\n  - " + s;
    throw ValidationError(msg);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path + ": malformed JSON: " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3", "example4"}; }

ExperimentConfig load_preset(const std::string& name) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ValidationError("unknown preset '" + name + "' (known: example1..example4)");
    return load_config(std::string(NLSPHASE_PRESET_DIR) + "/" + name + ".json");
}

// ---------------------------------------------------------------- initial data

RadialField make_initial_data(const GridPtr& grid, const InitialDataSpec& d, std::uint64_t seed) {
    RadialField f;
    switch (d.kind) {
        case InitialDataSpec::Kind::gaussian: {
            const double w2 = d.width * d.width;
            f = RadialField::from_phi(grid, [&](double r) { return cplx(d.amplitude * std::exp(-r * r / (2.0 * w2))); });
            break;
        }
        case InitialDataSpec::Kind::band_limited: {
            const double w2 = d.width * d.width;
            const auto g =
                RadialField::from_phi(grid, [&](double r) { return cplx(std::exp(-r * r / (2.0 * w2))); });
            f = band_filter(g, d.k_lo, d.k_hi);
            f *= d.amplitude / std::max(norm(f), 1e-300);
            break;
        }
        case InitialDataSpec::Kind::self_similar: {
            const double s = std::pow(d.t_ref, d.alpha);
            const double pre = d.amplitude * std::pow(s, -1.5);
            f = RadialField::from_phi(grid, [&](double r) {
                const double y = r / s;
                return pre * std::exp(-y * y / 2.0) * std::exp(cplx(0.0, r * r / (4.0 * d.t_ref)));
            });
            break;
        }
        case InitialDataSpec::Kind::file: {
            f = read_field_csv(d.path);
            if (!f.grid->same_as(*grid)) throw ValidationError("initial data: file grid differs from the config grid");
            f.grid = grid;
            break;
        }
    }
    if (d.noise > 0.0) {
        std::mt19937_64 rng(seed);
        // Bits rather than std::normal_distribution: the latter is not portable across libraries.
        auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
        auto smooth = RadialField::zeros(grid, f.time);
        for (std::size_t j = 0; j + 1 < smooth.size(); ++j) {
            const double r = grid->r(j);
            smooth.u[j] = r * std::exp(-r * r / 8.0) * cplx(uniform(), uniform());
        }
        smooth = band_filter(smooth, 0.0, 4.0);
        const double scale = d.noise * norm(f) / std::max(norm(smooth), 1e-300);
        f += cplx(scale) * smooth;
    }
    f.check();
    return f;
}

// ---------------------------------------------------------------- run

void write_manifest(const std::string& dir, const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const json& extra) {
    json m = {{"name", cfg.name},
              {"version", kVersion},
              {"config_hash", cfg.hash()},
              {"seed", cfg.seed},
              {"files", files},
              {"weight_constant_C", default_weight().constant()}};
    m.update(extra);
    write_json(dir + "/MANIFEST.json", m);
}

namespace {

struct RunContext {
    const ExperimentConfig& cfg;
    std::string dir;
    std::vector<std::string> files;
    json verdict = json::object();

    void add(const std::string& file) { files.push_back(file); }
    std::string path(const std::string& file) const { return dir + "/" + file; }
};

Trajectory simulate_into(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto grid = make_grid(cfg.grid);
    const RadialField f0 = make_initial_data(grid, cfg.initial, cfg.seed);
    RunOptions opt = cfg.run;
    opt.dt = cfg.grid.dt;
    Trajectory run = evolve(f0, cfg.nonlinearity, opt);

    CsvWriter w(ctx.path("conservation.csv"));
    w.comment("mass = ||phi||^2; energy = int |grad phi|^2 + G(|phi|^2); drift relative to t = 0");
    w.header({"t[time]", "mass[L2^2]", "mass_drift[relative]", "energy[H1 functional]", "h1_norm[H1]",
              "boundary_flag[0/1]"});
    const double m0 = std::pow(norm(run.snapshots.front()), 2);
    for (std::size_t i = 0; i < run.size(); ++i) {
        const auto& f = run.snapshots[i];
        const double m = std::pow(norm(f), 2);
        w.row({f.time, m, std::abs(m - m0) / m0, energy(f, cfg.nonlinearity, f.time), norm(f, NormKind::h1()),
               run.boundary_flags[i] ? 1.0 : 0.0});
    }
    ctx.add("conservation.csv");
    ctx.verdict["trajectory"] = {{"snapshots", run.size()},
                                 {"max_mass_drift", run.max_mass_drift},
                                 {"max_step_mass_drift", run.max_step_mass_drift},
                                 {"valid_until", run.valid_until}};
    if (cfg.export_snapshots) {
        ensure_dir(ctx.path("snapshots"));
        for (std::size_t i = 0; i < run.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshots/snapshot_%05zu.csv", i);
            write_field_csv(ctx.path(name), run.snapshots[i]);
            ctx.add(name);
        }
    }
    return run;
}

void channel_into(RunContext& ctx, const Trajectory& run) {
    const auto& req = *ctx.cfg.channel;
    const auto ch = extract_free_channel(run, req.alpha0, Cutoff::rising(1.0), req.samples, req.tolerance);
    write_field_csv(ctx.path("omega.csv"), ch.omega);
    ctx.add("omega.csv");
    const json cj = channel_json(ch);
    write_json(ctx.path("cauchy.json"), cj);
    ctx.add("cauchy.json");

    CsvWriter w(ctx.path("channel_cauchy.csv"));
    w.comment("gaps between consecutive samples of e^{-i Delta t} F(<x>/t^alpha0) phi(t)");
    w.header({"t_first[time]", "t_second[time]", "gap_l2[L2]", "gap_h1_surrogate[H1]"});
    for (std::size_t i = 0; i + 1 < ch.times.size(); ++i)
        w.row({ch.times[i], ch.times[i + 1], ch.cauchy_l2[i][i + 1], ch.cauchy_h1[i][i + 1]});
    ctx.add("channel_cauchy.csv");

    json v = {{"alpha0", ch.alpha0},
              {"late_gap", ch.late_gap},
              {"tolerance", ch.tolerance},
              {"accepted", ch.accepted},
              {"abs_momentum_omega", abs_momentum_expectation(ch.omega)}};
    if (req.decompose_alpha) {
        const RadialField probe = band_filter(run.snapshots.front(), 1.0, 2.0);
        const auto dec = decompose(run, ch, *req.decompose_alpha, probe);
        CsvWriter d(ctx.path("decomposition.csv"));
        d.comment("phi_wb = phi(t) - e^{i Delta t} omega");
        d.header({"t[time]", "norm_wb[L2]", "exterior_mass[L2^2]", "mean_bracket_x[length]",
                  "orthogonality[L2^2]", "mass_bookkeeping[L2^2]", "identity_residual[L2]"});
        for (const auto& r : dec.rows)
            d.row({r.t, r.norm_wb, r.exterior_mass, r.mean_bracket_x, r.orthogonality, r.mass_bookkeeping,
                   r.identity_residual});
        ctx.add("decomposition.csv");
        json dj = {{"alpha", *req.decompose_alpha},
                   {"exterior_exponent", dec.exterior_exponent},
                   {"orthogonality_exponent", dec.orthogonality_exponent},
                   {"below_floor", dec.below_floor}};
        if (!dec.below_floor) {
            const auto wls = wls_diagnostics(dec.weakly_bounded);
            dj["growth_exponent"] = wls.exponent;
            dj["growth_exponent_stderr"] = wls.stderr_exponent;
            dj["verdict"] = wls.verdict;
        } else {
            dj["verdict"] = "below measurement floor";
        }
        write_json(ctx.path("decomposition.json"), dj);
        ctx.add("decomposition.json");
        v["decomposition"] = dj;
    }
    ctx.verdict["channel"] = v;
}

void finish(RunContext& ctx, const json& extra = json::object()) {
    write_json(ctx.path("verdict.json"), ctx.verdict);
    ctx.add("verdict.json");
    write_json(ctx.path("config.json"), ctx.cfg.to_json());
    ctx.add("config.json");
    write_manifest(ctx.dir, ctx.cfg, ctx.files, extra);
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& dir) {
    cfg.validate();
    ensure_dir(dir);
    RunContext ctx{cfg, dir, {}, json::object()};
    const Trajectory run = simulate_into(ctx);
    bool scaled = false;

    if (cfg.gamma_limit_alpha) {
        const auto g = gamma_limit_estimate(run, *cfg.gamma_limit_alpha);
        write_series_csv(ctx.path("gamma_limit.csv"), g.series, "momentum");
        ctx.add("gamma_limit.csv");
        ctx.verdict["gamma_limit"] = {{"alpha", *cfg.gamma_limit_alpha},
                                      {"gamma_hat", g.gamma_hat},
                                      {"tail_oscillation", g.tail.oscillation},
                                      {"decay_rate", g.tail.decay_fitted ? json(g.tail.decay_rate) : json(nullptr)},
                                      {"nonnegative", g.nonnegative}};
    }
    if (!cfg.propagation.empty()) {
        json arr = json::array();
        for (const auto& req : cfg.propagation) {
            const auto r = propagation_integral(run, req.preset, req.params);
            std::string file = "propagation_" + r.preset + ".csv";
            CsvWriter w(ctx.path(file));
            w.comment("terms are time weighted integrands; integral runs from t0 = " + fmt_num(r.t0));
            std::vector<std::string> cols{"t[time]"};
            for (std::size_t k = 0; k < r.terms.size(); ++k)
                cols.push_back("term" + std::to_string(k + 1) + "[1/time]");
            cols.push_back("integrand[1/time]");
            cols.push_back("running_integral[1]");
            if (!r.counterpart.empty()) cols.push_back("outgoing_counterpart[1/time]");
            w.header(cols);
            std::vector<double> row;
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                row.assign(1, r.times[i]);
                for (const auto& t : r.terms) row.push_back(t[i]);
                row.push_back(r.integrand[i]);
                row.push_back(r.running_integral[i]);
                if (!r.counterpart.empty()) row.push_back(r.counterpart[i]);
                w.row(row);
            }
            ctx.add(file);
            arr.push_back(verdict_json(r));
        }
        ctx.verdict["propagation"] = arr;
    }
    if (cfg.morawetz) {
        const auto& m = *cfg.morawetz;
        const auto res = exterior_morawetz(run, m.M, m.t1, m.t2, m.allow_scaled);
        scaled = scaled || res.scaled;
        CsvWriter w(ctx.path("morawetz.csv"));
        w.comment("lhs = <F gamma F>_t - <F gamma F>_t1, rhs = time integral of the right-hand side");
        w.header({"t[time]", "lhs[momentum]", "main[momentum/time]", "boundary[momentum/time]",
                  "interaction[momentum/time]", "rhs[momentum]"});
        for (const auto& r : res.rows) w.row({r.t, r.lhs, r.main, r.boundary, r.interaction, r.rhs});
        ctx.add("morawetz.csv");
        ctx.verdict["morawetz"] = {
            {"M", m.M}, {"t1", m.t1}, {"t2", m.t2}, {"relative_residual", res.relative_residual}, {"scaled", res.scaled}};
    }
    if (cfg.zero_frequency_beta) {
        const auto z = zero_frequency_mass(run, *cfg.zero_frequency_beta);
        CsvWriter w(ctx.path("zero_frequency.csv"));
        w.header({"t[time]", "low_momentum_mass[L2^2]"});
        for (std::size_t i = 0; i < z.times.size(); ++i) w.row({z.times[i], z.values[i]});
        ctx.add("zero_frequency.csv");
        ctx.verdict["zero_frequency"] = {
            {"beta", *cfg.zero_frequency_beta}, {"tail_oscillation", z.tail_oscillation}, {"settled", z.settled}};
    }
    if (cfg.virial) {
        const auto rows = virial_series(run);
        CsvWriter w(ctx.path("virial.csv"));
        w.comment("d/dt <A> against 2 ||grad phi||^2 - int r d_r N |phi|^2");
        w.header({"t[time]", "d_dt_A[momentum*length/time]", "kinetic2[momentum^2]", "potential[momentum^2]",
                  "residual[momentum^2]"});
        double worst = 0.0;
        for (const auto& r : rows) {
            w.row({r.t, r.lhs, r.kinetic2, r.potential, r.residual});
            worst = std::max(worst, r.residual);
        }
        ctx.add("virial.csv");
        ctx.verdict["virial"] = {{"max_residual", worst}};
    }
    if (cfg.channel) channel_into(ctx, run);

    finish(ctx, {{"scaled", scaled}});
    return {dir, ctx.files, ctx.verdict};
}

ExperimentSummary run_channels(const ExperimentConfig& cfg, const std::string& dir) {
    if (!cfg.channel) throw ValidationError("channels: config has no channel block");
    ExperimentConfig c = cfg;
    c.gamma_limit_alpha.reset();
    c.propagation.clear();
    c.morawetz.reset();
    c.zero_frequency_beta.reset();
    c.virial = false;
    return run_experiment(c, dir);
}

ExperimentSummary run_freewave(const ExperimentConfig& cfg, const std::string& dir) {
    ExperimentConfig c = cfg;
    c.nonlinearity = NonlinearitySpec{};
    c.gamma_limit_alpha.reset();
    c.propagation.clear();
    c.morawetz.reset();
    c.zero_frequency_beta.reset();
    c.channel.reset();
    c.virial = false;
    c.validate();
    ensure_dir(dir);
    RunContext ctx{c, dir, {}, json::object()};
    const Trajectory run = simulate_into(ctx);
    const RadialField& f0 = run.snapshots.front();

    CsvWriter pc(ctx.path("pseudo_conformal.csv"));
    pc.header({"t[time]", "invariant[length*L2]", "relative_change[1]"});
    const double p0 = pseudo_conformal(f0, 0.0);
    double worst = 0.0;
    for (const auto& f : run.snapshots) {
        const double p = pseudo_conformal(f, f.time);
        const double rel = std::abs(p - p0) / p0;
        worst = std::max(worst, rel);
        pc.row({f.time, p, rel});
    }
    ctx.add("pseudo_conformal.csv");

    // Cone radii v t must stay on the grid.
    const double v1 = 0.5, v2 = 5.0;
    std::vector<double> times;
    for (const auto& f : run.snapshots)
        if (v2 * f.time <= c.grid.r_max) times.push_back(f.time);
    const auto rows = velocity_bound_scan(f0, {1.0, 2.0}, v1, v2, times);
    CsvWriter vb(ctx.path("velocity_bounds.csv"));
    vb.comment("band [1,2]; interior r <= 0.5 t, exterior r >= 5 t");
    vb.header({"t[time]", "interior_mass[fraction]", "exterior_mass[fraction]"});
    for (const auto& r : rows) vb.row({r.t, r.interior_mass, r.exterior_mass});
    ctx.add("velocity_bounds.csv");

    ctx.verdict["freewave"] = {{"pseudo_conformal_max_change", worst},
                               {"final_interior_mass", rows.empty() ? 0.0 : rows.back().interior_mass},
                               {"final_exterior_mass", rows.empty() ? 0.0 : rows.back().exterior_mass},
                               {"strichartz_l2l6", strichartz_l2l6(run)}};
    finish(ctx);
    return {dir, ctx.files, ctx.verdict};
}

// ---------------------------------------------------------------- report

std::string report(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("report: " + dir + " is not a directory");
    const std::string manifest_path = dir + "/MANIFEST.json";
    if (!fs::exists(manifest_path)) throw IoError("report: no MANIFEST.json in " + dir);
    const json m = read_json(manifest_path);
    if (!m.contains("files")) throw IoError("report: MANIFEST.json in " + dir + " lists no files");
    std::ostringstream out;
    out << "run " << m.value("name", std::string("?")) << "  version " << m.value("version", std::string("?"))
        << "  config " << m.value("config_hash", std::string("?")) << "  seed " << m.value("seed", 0) << '\n';

    for (const auto& f : m["files"]) {
        const std::string name = f.get<std::string>();
        const std::string path = dir + "/" + name;
        if (!fs::exists(path)) throw IoError("report: missing file " + path);
        if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") read_csv(path);
        else if (name.size() > 5 && name.substr(name.size() - 5) == ".json") read_json(path);
    }
    const json v = read_json(dir + "/verdict.json");
    if (v.contains("trajectory")) {
        const auto& t = v["trajectory"];
        out << "mass drift: " << fmt_num(t.value("max_mass_drift", 0.0)) << " (per step "
            << fmt_num(t.value("max_step_mass_drift", 0.0)) << "), valid until t = "
            << fmt_num(t.value("valid_until", 0.0)) << '\n';
    }
    if (v.contains("gamma_limit")) {
        const auto& g = v["gamma_limit"];
        out << "Gamma_hat: " << fmt_num(g.value("gamma_hat", 0.0)) << " +- "
            << fmt_num(g.value("tail_oscillation", 0.0)) << " (alpha " << fmt_num(g.value("alpha", 0.0))
            << "), nonnegative " << (g.value("nonnegative", false) ? "yes" : "no") << '\n';
    }
    if (v.contains("propagation"))
        for (const auto& p : v["propagation"])
            out << "propagation " << p.value("preset", std::string("?")) << ": tail ratio "
                << fmt_num(p.value("tail_ratio", 0.0)) << ", "
                << (p.value("converged", false) ? "converged" : "not converged") << ", integral "
                << fmt_num(p.value("integral", 0.0)) << '\n';
    if (v.contains("morawetz"))
        out << "exterior Morawetz residual: " << fmt_num(v["morawetz"].value("relative_residual", 0.0))
            << (v["morawetz"].value("scaled", false) ? " (scaled M)" : "") << '\n';
    if (v.contains("zero_frequency"))
        out << "zero-frequency mass oscillation: " << fmt_num(v["zero_frequency"].value("tail_oscillation", 0.0))
            << '\n';
    if (v.contains("virial")) out << "virial max residual: " << fmt_num(v["virial"].value("max_residual", 0.0)) << '\n';
    if (v.contains("channel")) {
        const auto& c = v["channel"];
        out << "channel Cauchy gap: " << fmt_num(c.value("late_gap", 0.0)) << " (tolerance "
            << fmt_num(c.value("tolerance", 0.0)) << ", " << (c.value("accepted", false) ? "accepted" : "rejected")
            << ")\n";
        if (c.contains("decomposition")) {
            const auto& d = c["decomposition"];
            out << "weakly bounded part: " << d.value("verdict", std::string("?"));
            if (d.contains("growth_exponent")) out << ", growth exponent " << fmt_num(d["growth_exponent"].get<double>());
            out << '\n';
        }
    }
    if (v.contains("freewave")) {
        const auto& f = v["freewave"];
        out << "pseudo-conformal change: " << fmt_num(f.value("pseudo_conformal_max_change", 0.0))
            << ", interior cone mass " << fmt_num(f.value("final_interior_mass", 0.0)) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- grid-free suites

IdentitySuiteResult identity_suite(std::uint64_t seed, std::size_t cases) {
    const auto start = std::chrono::steady_clock::now();
    IdentitySuiteResult res;
    res.cases = cases;
    res.min_slack = INFINITY;
    const SpectralFunction f = SpectralFunction::from_cutoff(Cutoff::rising(1.0));
    constexpr int order = 3;
    const TransformMoment moment = transform_moment(f, order);
    json rows = json::array();
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < cases; ++i) {
        const std::uint64_t s = rng();
        const std::size_t d = 8 + static_cast<std::size_t>(s % 9);
        const auto A = HermitianMatrix::random(d, s);
        const auto B = HermitianMatrix::random(d, s ^ 0x9e3779b97f4a7c15ULL);
        // A function of A commutes with A.
        const auto C = HermitianMatrix::from(function_of(A.m, [](double l) { return std::tanh(l) + 0.3 * l * l; }), s);
        const auto sym = check_symmetrization(A, B, C);
        res.max_symmetrization = std::max(res.max_symmetrization, sym.max());
        const auto ex = commutator_expansion_matrix(B, A, f, order, moment);
        if (ex.remainder_norm <= ex.bound) ++res.expansion_holds;
        res.min_slack = std::min(res.min_slack, ex.slack);
        rows.push_back({{"seed", s},
                        {"dim", d},
                        {"symmetrization", sym.max()},
                        {"remainder", ex.remainder_norm},
                        {"bound", ex.bound},
                        {"slack", ex.slack}});
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.detail = {{"seed", seed}, {"order", order}, {"moment", moment.value}, {"cases", rows}};
    return res;
}

MellinSuiteResult mellin_suite(const GridSpec& spec) {
    MellinSuiteResult res;
    auto grid = make_grid(spec);
    const LogGrid log = LogGrid::defaults(*grid);

    const auto gauss = RadialField::from_phi(grid, [](double r) { return cplx(std::exp(-r * r / 2.0), 0.3 * r * std::exp(-r * r / 3.0)); });
    const auto back = from_log_grid(to_log_grid(gauss, log), log, grid, 0.0);
    res.round_trip = relative_l2(back, gauss);

    // Windowed |x|^{-3/2 + i lambda0}: A acts as lambda0 where the window is flat.
    const double lambda0 = 3.0;
    const Cutoff win = Cutoff::window(2.0, 40.0);
    const auto prof = RadialField::from_phi(grid, [&](double r) {
        return win(r) * std::pow(r, -1.5) * std::exp(cplx(0.0, lambda0 * std::log(r)));
    });
    const auto Am = SpectralMultiplierA::from_function(log, [](double l) { return cplx(l); });
    const auto Af = func_of_dilation(Am, prof);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
        const double r = grid->r(j);
        if (r < 4.0 || r > 20.0) continue;
        num += std::norm(Af.u[j] - lambda0 * prof.u[j]);
        den += std::norm(lambda0 * prof.u[j]);
    }
    res.eigen_interior_error = std::sqrt(num / den);

    const auto f = RadialField::from_phi(grid, [](double r) { return cplx(std::exp(-r * r / 8.0)); });
    const auto g = RadialField::from_phi(grid, [](double r) { return cplx(1.0 / (1.0 + r * r)); });
    const double N = 2.0;
    json rows = json::array();
    for (double ratio : {4.0, 8.0, 16.0}) {
        const double M = ratio * N;
        const auto lk = highlow_leakage(N, M, std::sqrt(M), f, g, log);
        res.leakage_ratios.push_back(ratio);
        res.leakage.push_back(lk.leakage);
        rows.push_back({{"M_over_N", ratio}, {"M", M}, {"R", std::sqrt(M)}, {"leakage", lk.leakage}});
    }
    res.leakage_decreasing = res.leakage[1] < res.leakage[0] && res.leakage[2] < res.leakage[1];
    res.detail = {{"round_trip", res.round_trip},
                  {"eigen_lambda0", lambda0},
                  {"eigen_interior_error", res.eigen_interior_error},
                  {"leakage", rows},
                  {"leakage_decreasing", res.leakage_decreasing}};
    return res;
}

}  // namespace nlsphase
