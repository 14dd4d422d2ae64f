#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "hybridsim/cli/commands.hpp"
#include "hybridsim/errors.hpp"
#include "test_support.hpp"

using namespace hybridsim;
using namespace hybridsim::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / fmt::format("hybridsim_cli_{}", ::getpid());
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Config fig2() { return Config::load(fs::path(HYBRIDSIM_CONFIG_DIR) / "fig2.ini"); }

int run_exe(const std::string& args)
{
    const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", HYBRIDSIM_EXE, args,
                                        (scratch_dir() / "stdout.txt").string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Config small_pulse()
{
    auto c = Config::load(fs::path(HYBRIDSIM_CONFIG_DIR) / "fig4.ini");
    c.set("sweep.points=5");
    c.set("pulse.shots=4");
    c.set("pulse.dt_s=5e-10");
    return c;
}

} // namespace

TEST_CASE("config parsing and overrides")
{
    auto c = Config::parse_ini("[system]\nomega_c_hz = 4.7e9\n; comment\n[sweep]\npoints = 3\n");
    CHECK(c.get_double("system.omega_c_hz") == 4.7e9);
    CHECK(c.get_int("sweep.points") == 3);
    CHECK(c.get_double("system.gamma_c_hz", 7.0) == 7.0);
    CHECK_THROWS_AS(c.get_double("system.gamma_c_hz"), ConfigError);

    c.set("system.omega_c_hz = 5e9");
    CHECK(c.get_double("system.omega_c_hz") == 5e9);
    CHECK_THROWS_AS(c.set("no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(c.set("nosection=1"), ConfigError);
    c.set("sweep.points=abc");
    CHECK_THROWS_AS(c.get_int("sweep.points"), ConfigError);
    CHECK_THROWS_AS(Config::parse_ini("[broken\n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/file.ini"), ConfigError);

    c.set("spectrum.b0_tesla=0, 0.1, 0.2");
    CHECK(c.get_list("spectrum.b0_tesla") == std::vector<double>{0, 0.1, 0.2});
}

TEST_CASE("config digest is canonical")
{
    const auto a = Config::parse_ini("[b]\ny = 2\n[a]\nx = 1\n");
    const auto b = Config::parse_ini("[a]\nx = 1\n[b]\ny = 2\n");
    CHECK(a.digest() == b.digest());
    CHECK(a.digest().size() == 64);
    CHECK(a.canonical_lines() == std::vector<std::string>{"a.x = 1", "b.y = 2"});
    auto c = a;
    c.set("a.x=1.0");
    CHECK(c.digest() != a.digest());
}

TEST_CASE("sweep axis validation")
{
    auto c = fig2();
    const auto axis = sweep_axis(c);
    const auto v = axis.values();
    REQUIRE(v.size() == 201);
    CHECK(v.front() == 4.6e9);
    CHECK(v.back() == 4.8e9);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);

    c.set("sweep.points=1");
    CHECK_THROWS_AS(sweep_axis(c), ConfigError);
    c.set("sweep.points=3");
    c.set("sweep.start=4.9e9");
    CHECK_THROWS_AS(sweep_axis(c), ConfigError);
    c.set("sweep.start=4.6e9");
    c.set("sweep.quantity=temperature");
    CHECK_THROWS_AS(sweep_axis(c), ConfigError);

    c = fig2();
    c.set("system.gamma_c_hz=-1");
    CHECK_THROWS_AS(system_params(c), ConfigError);
}

TEST_CASE("CSV metadata round trip")
{
    const auto c = fig2();
    Table t;
    t.columns = {"x_hz", "n", "status"};
    t.add({0.1, 3LL, std::string("ok")});
    t.add({1.0 / 3.0, 4LL, std::string("out_of_band")});
    CHECK_THROWS(t.add({1.0}));

    const auto path = scratch_dir() / "roundtrip.csv";
    write_csv(path, t, "test", c);
    const auto text = slurp(path);
    CHECK(text.starts_with("# hybridsim "));
    CHECK(text.find("# config_sha256: " + c.digest()) != std::string::npos);

    const auto back = read_csv(path);
    CHECK(back.columns == t.columns);
    CHECK(back.number(1, "x_hz") == 1.0 / 3.0);
    CHECK(std::get<std::string>(back.rows[1][2]) == "out_of_band");

    // The embedded config reproduces the original exactly.
    const auto reloaded = Config::load(path);
    CHECK(reloaded.digest() == c.digest());

    CHECK_THROWS_AS(write_csv(fs::path("/nonexistent/dir/out.csv"), t, "test", c), IoError);
}

TEST_CASE("anticrossing grid ridge follows the hybrid frequencies")
{
    const auto c = fig2();
    const auto t = anticross_table(c, 2);
    const std::size_t nm = 201, na = 201;
    REQUIRE(t.rows.size() == nm * na);
    const double cell = 0.2e9 / 200;
    const auto p = system_params(c);
    for (std::size_t i = 0; i < nm; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < na; ++j) {
            if (t.number(i * na + j, "p_ac") > t.number(i * na + best, "p_ac")) best = j;
        }
        const double wm = hz_to_angular(t.number(i * na, "omega_m_hz"));
        const auto h = hybrid_frequencies(p.with_omega_m(wm));
        const double fa = t.number(i * na + best, "omega_a_hz");
        const double err = std::min(std::abs(fa - angular_to_hz(h.lower)), std::abs(fa - angular_to_hz(h.upper)));
        CHECK(err <= cell);
    }
}

TEST_CASE("vanishing coupling leaves the bare crossing lines")
{
    auto c = fig2();
    c.set("system.g_cm_hz=1e3");
    c.set("sweep.points=41");
    c.set("sweep.omega_a_points=41");
    const auto t = anticross_table(c, 1);
    const double cell = 0.2e9 / 40;
    for (std::size_t i = 0; i < 41; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < 41; ++j) {
            if (t.number(i * 41 + j, "p_ac") > t.number(i * 41 + best, "p_ac")) best = j;
        }
        const double fm = t.number(i * 41, "omega_m_hz");
        const double fa = t.number(i * 41 + best, "omega_a_hz");
        CHECK(std::min(std::abs(fa - 4.7e9), std::abs(fa - fm)) <= cell);
    }

    c.set("sweep.points=1");
    CHECK_THROWS_AS(anticross_table(c, 1), ConfigError);
}

TEST_CASE("bandwidth report")
{
    const auto r = bandwidth_report(fig2());
    CHECK(angular_to_hz(r.lower.bandwidth()) == doctest::Approx(62.16e6).epsilon(1e-3));
    CHECK(angular_to_hz(r.upper.bandwidth()) == doctest::Approx(62.18e6).epsilon(1e-3));
    REQUIRE(r.curve.rows.size() == 201);
    double qmax = 0;
    for (std::size_t i = 0; i < r.curve.rows.size(); ++i) qmax = std::max(qmax, r.curve.number(i, "q_minus"));
    CHECK(qmax == 1.0);

    auto wide = fig2();
    wide.set("system.gamma_c_hz=11e6");
    wide.set("system.gamma_m_hz=35e6");
    CHECK(bandwidth_report(wide).lower.bandwidth() > r.lower.bandwidth());

    auto uncoupled = fig2();
    uncoupled.set("system.g_cm_hz=0");
    try {
        bandwidth_report(uncoupled);
        FAIL("expected a diagnostic");
    } catch (const DiagnosticError& e) {
        CHECK(exit_code_for(e) == kDiagnosticError);
    }
}

TEST_CASE("pulse run bookkeeping")
{
    auto c = small_pulse();
    c.set("pulse.jitter=0");
    c.set("pulse.shots=1");
    const auto run = pulse_run(c, 2);
    REQUIRE(run.summary.rows.size() == 5);
    CHECK(run.shots.rows.size() == 5);
    double qmax = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(run.summary.number(i, "q_std") == 0.0);
        CHECK(run.summary.number(i, "n_shots") == 1.0);
        qmax = std::max(qmax, run.summary.number(i, "q_mean"));
    }
    CHECK(qmax == 1.0);

    // A fixed LO only covers part of the sweep; the rest is flagged.
    auto fixed = small_pulse();
    const double mid = angular_to_hz(hybrid_frequency(system_params(fixed).with_omega_m(larmor_frequency(0.1684)),
                                                      Branch::lower));
    fixed.set("heterodyne.lo_hz", fmt::format("{}", mid));
    const auto partial = pulse_run(fixed, 1);
    int ok = 0, flagged = 0;
    for (const auto& row : partial.summary.rows) {
        (std::get<std::string>(row.back()) == "ok" ? ok : flagged)++;
    }
    CHECK(ok >= 1);
    CHECK(flagged >= 1);
}

TEST_CASE("pulse results do not depend on the worker count")
{
    const auto c = small_pulse();
    const auto a = pulse_run(c, 1);
    const auto b = pulse_run(c, 3);
    REQUIRE(a.shots.rows.size() == b.shots.rows.size());
    for (std::size_t i = 0; i < a.shots.rows.size(); ++i) {
        CHECK(a.shots.number(i, "q_raw") == b.shots.number(i, "q_raw"));
    }
    // Jitter actually varies between shots.
    CHECK(a.shots.number(0, "q_raw") != a.shots.number(1, "q_raw"));
}

TEST_CASE("spectrum run")
{
    auto c = fig2();
    const auto run = spectrum_run(c, 2);
    const auto fields = c.get_list("spectrum.b0_tesla");
    CHECK(run.table.rows.size() == fields.size() * 8001);
    CHECK(find_peaks(run.spectra.front().spectrum).size() == 1);

    const auto ex = extract_params(run.spectra);
    const auto p = system_params(c);
    CHECK(ex.params.omega_c == doctest::Approx(p.omega_c).epsilon(0.02));
    CHECK(ex.params.gamma_c == doctest::Approx(p.gamma_c).epsilon(0.02));
    CHECK(ex.params.gamma_m == doctest::Approx(p.gamma_m).epsilon(0.02));
    CHECK(ex.params.g_cm == doctest::Approx(p.g_cm).epsilon(0.02));
}

TEST_CASE("parallel_for propagates the first failure")
{
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw DiagnosticError("boom");
                    }),
                    DiagnosticError);
}

TEST_CASE("executable exit codes")
{
    const auto dir = scratch_dir();
    const std::string fig2_ini = (fs::path(HYBRIDSIM_CONFIG_DIR) / "fig2.ini").string();

    CHECK(run_exe(fmt::format("bandwidth --config \"{}\" --out \"{}\"", fig2_ini, (dir / "bw.csv").string())) == 0);
    CHECK(slurp(dir / "stdout.txt").find("lower-branch bandwidth: 62.") != std::string::npos);

    CHECK(run_exe(fmt::format("bandwidth --config \"{}\" --set system.g_cm_hz=0 --out \"{}\"", fig2_ini,
                              (dir / "bw0.csv").string())) == kDiagnosticError);
    CHECK(run_exe("bandwidth --config /nonexistent.ini") == kConfigError);
    CHECK(run_exe(fmt::format("anticross --config \"{}\" --set sweep.points=1", fig2_ini)) == kConfigError);
    CHECK(run_exe(fmt::format("bandwidth --config \"{}\" --out /nonexistent/dir/bw.csv", fig2_ini)) == kIoError);
    CHECK(run_exe("frobnicate") == kConfigError);
}

TEST_CASE("re-running from an emitted CSV reproduces it")
{
    const auto dir = scratch_dir();
    const std::string fig4_ini = (fs::path(HYBRIDSIM_CONFIG_DIR) / "fig4.ini").string();
    const auto first = dir / "p1.csv";
    const auto second = dir / "p2.csv";
    REQUIRE(run_exe(fmt::format("pulse --config \"{}\" --set sweep.points=3 --set pulse.shots=5 --seed 7 "
                                "--jobs 2 --svg --out \"{}\"",
                                fig4_ini, first.string())) == 0);
    REQUIRE(run_exe(fmt::format("pulse --config \"{}\" --jobs 1 --svg --out \"{}\"", first.string(),
                                second.string())) == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(dir / "p1.shots.csv") == slurp(dir / "p2.shots.csv"));
    CHECK(fs::exists(dir / "p1.svg"));
    CHECK(slurp(first).find("# config: run.seed = 7") != std::string::npos);
}
