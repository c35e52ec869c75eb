#include <doctest.h>

#include "coin/cli.hpp"
#include "coin/config.hpp"
#include "coin/io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

using namespace coin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("coin_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "coin_cli");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> small_simulation(const fs::path& out)
{
    return {"--mode=simulate",        "--paths.output=" + out.string(), "--simulate.n=20", "--simulate.T=300",
            "--spectral.M_T=12",      "--spectral.m=30",                "--factors.q=2",   "--factors.r=2",
            "--factors.r_phi=1"};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& more)
{
    a.insert(a.end(), more.begin(), more.end());
    return a;
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("configuration parsing and overrides")
{
    std::istringstream in("mode = simulate\ncutoff.theta_c = pi/6\n[spectral]\nM_T = 15  # lag window\n\n");
    Config c = Config::parse(in);
    CHECK(c.get_or("mode", "") == "simulate");
    CHECK(c.get_int("spectral.M_T", 0) == 15);
    c.apply_override("spectral.m=40");
    CHECK(c.get_int("spectral.m", 0) == 40);
    CHECK(c.get_angle("cutoff.theta_c", 0.0) == doctest::Approx(kPi / 6));
    CHECK(c.canonical().find("spectral.m=40") != std::string::npos);

    CHECK(parse_angle("pi") == doctest::Approx(kPi));
    CHECK(parse_angle("2*pi/3") == doctest::Approx(2 * kPi / 3));
    CHECK(parse_angle("0.5pi") == doctest::Approx(kPi / 2));
    CHECK(parse_angle("0.25") == 0.25);
    CHECK_THROWS_AS(parse_angle("half"), ConfigError);

    Config bad;
    bad.set("mode", "simulate");
    bad.set("spectral.M_T", "0");
    CHECK_THROWS_AS(build_run_config(bad), ConfigError);
    Config unknown;
    CHECK_THROWS_AS(unknown.set("spectral.bogus", "1"), ConfigError);
}

TEST_CASE("draw file round trip")
{
    Eigen::MatrixXd d(3, 4);
    d << 1, 2, 3, 4, 5, 6, 7, 8, -1e-300, 1e300, 0.1, kMissing;
    const DrawFile f = decode_draws(encode_draws(d, Horizon::Annual));
    CHECK(f.version == kDrawFileVersion);
    CHECK(f.horizon == Horizon::Annual);
    CHECK(f.draws.topLeftCorner(3, 3).cwiseEqual(d.topLeftCorner(3, 3)).all());
    CHECK(std::isnan(f.draws(2, 3)));
    std::string bytes = encode_draws(d, Horizon::Quarterly);
    CHECK(bytes.size() == 8 + 16 + 12 * 8);
    bytes[0] = 'X';
    CHECK_THROWS(decode_draws(bytes));
    CHECK_THROWS(decode_draws(encode_draws(d, Horizon::Quarterly).substr(0, 40)));
}

TEST_CASE("simulate writes hashed, reproducible outputs")
{
    const fs::path a = scratch("sim_a");
    REQUIRE(run(with({"simulate"}, small_simulation(a))) == kExitOk);
    std::map<std::string, std::string> first;
    for (const char* name : {"panel.csv", "gdp.csv", "truth.csv"}) first[name] = read_file(a / name);
    REQUIRE(run(with({"simulate"}, small_simulation(a))) == kExitOk);
    for (const char* name : {"panel.csv", "gdp.csv", "truth.csv"}) {
        REQUIRE(fs::exists(a / name));
        CHECK(read_file(a / name) == first[name]);
        const std::string head = first_line(a / name);
        CHECK(head.rfind("# coin simulate config_hash=", 0) == 0);
        CHECK(head.find("data_hash=") != std::string::npos);
    }
}

TEST_CASE("simulated data round trips through real mode")
{
    const fs::path sim = scratch("sim_real");
    REQUIRE(run(with({"simulate"}, small_simulation(sim))) == kExitOk);
    const fs::path out = scratch("real_out");
    const std::vector<std::string> real{"--mode=real",
                                        "--paths.panel=" + (sim / "panel.csv").string(),
                                        "--paths.gdp=" + (sim / "gdp.csv").string(),
                                        "--paths.output=" + out.string(),
                                        "--spectral.M_T=12",
                                        "--spectral.m=30"};
    REQUIRE(run(with({"nowcast"}, real)) == kExitOk);
    CHECK(fs::exists(out / "nowcast.csv"));
    CHECK(fs::exists(out / "nowcast.json"));
    REQUIRE(run(with({"target"}, real)) == kExitOk);
    CHECK(fs::exists(out / "target.csv"));

    const std::string once = read_file(out / "nowcast.csv");
    REQUIRE(run(with({"nowcast"}, real)) == kExitOk);
    CHECK(read_file(out / "nowcast.csv") == once);
}

TEST_CASE("nowcast and bootstrap in simulate mode")
{
    const fs::path out = scratch("boot");
    REQUIRE(run(with({"nowcast"}, small_simulation(out))) == kExitOk);
    const std::string csv = read_file(out / "nowcast.csv");
    CHECK(csv.find("true_qoq") != std::string::npos);

    REQUIRE(run(with({"bootstrap", "--bootstrap.B=1", "--bootstrap.save_draws=true"}, small_simulation(out))) ==
            kExitOk);
    CHECK(fs::exists(out / "deciles.csv"));
    CHECK(fs::exists(out / "pit.csv"));
    const DrawFile q = decode_draws(read_file(out / "draws_qoq.bin"));
    CHECK(q.draws.rows() == 1);
    CHECK(q.draws.cols() == 300);
    CHECK(q.horizon == Horizon::Quarterly);
}

TEST_CASE("evaluate with one method skips the pairwise tests")
{
    const fs::path out = scratch("eval");
    const std::vector<std::string> args =
        with(small_simulation(out), {"--simulate.T=420", "--rolling.window=121", "--rolling.test_start=1980-01",
                                     "--rolling.test_end=1981-12"});
    REQUIRE(run(with({"evaluate", "--evaluate.methods=USCOIN"}, args)) == kExitOk);
    CHECK(fs::exists(out / "table1.csv"));
    CHECK(fs::exists(out / "paths.csv"));
    CHECK_FALSE(fs::exists(out / "dm.csv"));

    REQUIRE(run(with({"evaluate", "--evaluate.methods=USCOIN,BP"}, args)) == kExitOk);
    CHECK(fs::exists(out / "dm.csv"));
}

TEST_CASE("exit codes")
{
    const fs::path out = scratch("codes");
    CHECK(run({"nowcast", "--mode=real", "--paths.output=" + out.string(), "--paths.panel=/nonexistent.csv"}) ==
          kExitConfig);
    CHECK(run(with(with({"nowcast"}, small_simulation(out)), {"--spectral.M_T=0"})) == kExitConfig);
    CHECK(run(with(with({"nowcast"}, small_simulation(out)), {"--spectral.M_T=400"})) != kExitOk);
    CHECK(run({"frobnicate"}) == kExitConfig);
    CHECK(run({"nowcast", "-c", "/nonexistent.cfg"}) == kExitConfig);

    const fs::path broken = out / "broken.csv";
    write_file(broken, "sasdate,A\nTransform:,1\n1/1/1960,abc\n");
    write_file(out / "gdp.csv", "date,level\n1960-01-01,100\n");
    CHECK(run({"nowcast", "--mode=real", "--paths.output=" + out.string(), "--paths.panel=" + broken.string(),
               "--paths.gdp=" + (out / "gdp.csv").string()}) == kExitData);
    CHECK(run({"simulate", "--mode=real", "--paths.output=" + out.string(), "--paths.panel=" + broken.string(),
               "--paths.gdp=" + (out / "gdp.csv").string()}) == kExitConfig);
}
