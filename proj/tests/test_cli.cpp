#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("NLSPHASE_CLI");
    REQUIRE_MESSAGE(p != nullptr, "NLSPHASE_CLI must point at the binary");
    return p;
}

Outcome run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("nlsphase_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

nlohmann::json small_config() {
    return nlohmann::json::parse(R"({
      "name": "small",
      "seed": 3,
      "grid": {"r_max": 200.0, "n": 1024, "dt": 0.01},
      "run": {"t_end": 48.0, "stride": 100},
      "nonlinearity": {"a": 1.0, "p": 2.0},
      "initial": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0, "noise": 0.01},
      "observables": {
        "gamma_limit": {"alpha": 0.6},
        "propagation": [{"preset": "PE", "alpha": 0.6}],
        "zero_frequency": {"beta": 0.8},
        "virial": true
      },
      "channel": {"alpha0": 0.6, "samples": [12.0, 24.0, 48.0], "decompose_alpha": 0.6}
    })");
}

fs::path write_config(const std::string& name, const nlohmann::json& j) {
    const auto p = scratch() / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Byte comparison of every regular file under two directories.
bool same_tree(const fs::path& a, const fs::path& b) {
    std::size_t count = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) return false;
        ++count;
    }
    std::size_t other = 0;
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) ++other;
    return count == other && count > 0;
}

}  // namespace

TEST_CASE("simulate writes artifacts and a report") {
    const auto cfg = write_config("small", small_config());
    const auto out = scratch() / "run1";
    const auto r = run("simulate --config " + cfg.string() + " --out " + out.string());
    REQUIRE_MESSAGE(r.code == 0, r.out);
    for (const char* f : {"MANIFEST.json", "verdict.json", "config.json", "conservation.csv", "gamma_limit.csv",
                          "omega.csv", "cauchy.json", "decomposition.csv"})
        CHECK_MESSAGE(fs::exists(out / f), f);
    CHECK(r.out.find("mass drift:") != std::string::npos);
    CHECK(r.out.find("Gamma_hat:") != std::string::npos);
    CHECK(r.out.find("channel Cauchy gap:") != std::string::npos);
    CHECK(r.out.find("propagation PE:") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(out / "MANIFEST.json"));
    CHECK(manifest["name"] == "small");
    CHECK(manifest["seed"] == 3);
    CHECK(manifest["files"].size() >= 8);

    const auto rep = run("report " + out.string());
    CHECK(rep.code == 0);
    CHECK(rep.out.find("Gamma_hat:") != std::string::npos);
}

TEST_CASE("rerun is byte-identical and seeds matter") {
    const auto cfg = write_config("small", small_config());
    const auto a = scratch() / "det_a", b = scratch() / "det_b", c = scratch() / "det_c";
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + a.string()).code == 0);
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + b.string()).code == 0);
    CHECK(same_tree(a, b));
    REQUIRE(run("simulate --config " + cfg.string() + " --seed 4 --out " + c.string()).code == 0);
    CHECK(slurp(a / "conservation.csv") != slurp(c / "conservation.csv"));
}

TEST_CASE("sweep writes one directory per config") {
    auto second = small_config();
    second["name"] = "small_b";
    second["nonlinearity"]["a"] = 0.5;
    const auto c1 = write_config("small", small_config());
    const auto c2 = write_config("small_b", second);
    const auto out = scratch() / "sweep";
    const auto r = run("simulate --config " + c1.string() + " --config " + c2.string() + " --threads 2 --out " +
                       out.string());
    REQUIRE_MESSAGE(r.code == 0, r.out);
    CHECK(fs::exists(out / "small" / "MANIFEST.json"));
    CHECK(fs::exists(out / "small_b" / "MANIFEST.json"));
}

TEST_CASE("validation failures exit with 2 and list every gate") {
    auto bad = small_config();
    bad["observables"]["gamma_limit"]["alpha"] = 0.2;
    bad["channel"]["alpha0"] = 0.3;
    bad["run"]["stride"] = 0;
    const auto r = run("simulate --config " + write_config("bad", bad).string() + " --out " +
                       (scratch() / "bad").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("3 gate(s)") != std::string::npos);

    auto unknown = small_config();
    unknown["grid"]["spacing"] = 1.0;
    CHECK(run("simulate --config " + write_config("unknown", unknown).string()).code == 2);
    CHECK(run("simulate --threads 0 --preset example1").code == 2);
    CHECK(run("no-such-command").code == 2);
}

TEST_CASE("i/o failures exit with 4") {
    CHECK(run("simulate --config " + (scratch() / "missing.json").string()).code == 4);
    const auto empty = scratch() / "empty";
    fs::create_directories(empty);
    const auto r = run("report " + empty.string());
    CHECK(r.code == 4);
    CHECK(r.out.find("MANIFEST") != std::string::npos);
    CHECK(run("report " + (scratch() / "nowhere").string()).code == 4);
}

TEST_CASE("a corrupted CSV is named in the report error") {
    const auto cfg = write_config("small", small_config());
    const auto out = scratch() / "corrupt";
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()).code == 0);
    std::ofstream(out / "gamma_limit.csv", std::ios::app) << "1.0,not-a-number,\n";
    const auto r = run("report " + out.string());
    CHECK(r.code == 4);
    CHECK(r.out.find("gamma_limit.csv") != std::string::npos);

    fs::remove(out / "omega.csv");
    const auto m = run("report " + out.string());
    CHECK(m.code == 4);
}

TEST_CASE("identities and mellin subcommands") {
    const auto out = scratch() / "suites";
    const auto i = run("identities --cases 10 --seed 1 --out " + out.string());
    CHECK(i.code == 0);
    CHECK(i.out.find("10/10") != std::string::npos);
    CHECK(fs::exists(out / "identities.json"));
    const auto m = run("mellin --out " + out.string());
    CHECK(m.code == 0);
    CHECK(m.out.find("round trip") != std::string::npos);
    CHECK(fs::exists(out / "mellin.json"));
}
