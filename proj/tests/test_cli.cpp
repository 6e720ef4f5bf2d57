#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using semideg::cli::ojson;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "semideg-cli");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = semideg::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(SEMIDEG_CONFIG_DIR) + "/" + name; }

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("semideg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  auto p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

const char* fusion_small = R"({"N": [2, 3], "draws": 4, "sigma_scale": 0.3, "seed": 7})";

}  // namespace

TEST_CASE("three-point run on the bundled config") {
  auto r = run_cli({"three-point", "--config", config("three_point_n3.json")});
  INFO(r.err);
  REQUIRE(r.code == 0);
  auto j = ojson::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"command", "version", "config_hash", "seed", "status", "checks", "results"});
  CHECK(j["command"] == "three-point");
  CHECK(j["version"] == semideg::version);
  CHECK(j["status"] == "pass");
  CHECK(j["config_hash"].get<std::string>().size() == 64);
  for (const auto& c : j["checks"]) {
    std::vector<std::string> ck;
    for (auto it = c.begin(); it != c.end(); ++it) ck.push_back(it.key());
    CHECK(ck == std::vector<std::string>{"name", "value", "tolerance", "pass"});
    CHECK(c["pass"] == true);
  }
}

TEST_CASE("CSV and JSON outputs") {
  auto csv = (scratch() / "fusion.csv").string();
  auto r = run_cli({"fusion-check", "--config", write("f.json", fusion_small), "--out", csv});
  REQUIRE(r.code == 0);
  std::string text = slurp(csv);
  CHECK(text.rfind("N,draw,identity,residual,status\r\n", 0) == 0);
  // every line ends in CRLF: 1 header + 2 N x 4 draws x 4 identities
  std::size_t lines = 0;
  for (std::size_t p = 0; (p = text.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  CHECK(lines == 33);
  CHECK(std::count(text.begin(), text.end(), '\n') == 33);
  CHECK(slurp((scratch() / "fusion.json").string()) == r.out);
  CHECK(semideg::cli::sibling_json("a/b.c/out.csv") == "a/b.c/out.json");
  CHECK(semideg::cli::sibling_json("a.d/out") == "a.d/out.json");
}

TEST_CASE("CSV quoting") {
  using semideg::cli::Csv;
  CHECK(Csv::quote("plain") == "plain");
  CHECK(Csv::quote("a,b") == "\"a,b\"");
  CHECK(Csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(Csv::quote("two\nlines") == "\"two\nlines\"");
  Csv c({"x", "y"});
  c.add({"1", "a,b"});
  CHECK(c.str() == "x,y\r\n1,\"a,b\"\r\n");
  CHECK_THROWS_AS(c.add({"1"}), std::logic_error);
}

TEST_CASE("malformed JSON reports line and column") {
  auto path = write("bad.json", "{\n  \"N\": 2,\n  oops\n}\n");
  auto r = run_cli({"fusion-check", "--config", path});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "line 3, column 3"));
}

TEST_CASE("config errors exit with 2") {
  auto r = run_cli({"fusion-check", "--config", write("u.json", R"({"N": 2, "bogus": 1})")});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "unknown key 'bogus'"));

  r = run_cli({"fusion-check", "--config", (scratch() / "missing.json").string()});
  CHECK(r.code == 2);

  r = run_cli({"three-point", "--config", write("t.json", R"({"theta0": [[0.1, 0], [0.2, 0]], "theta_inf": [[0.2, 0], [-0.2, 0]], "a": [0.3, 0]})")});
  CHECK(r.code == 2);

  r = run_cli({"three-point", "--config", write("c.json", R"({"theta0": [0.1, -0.1], "theta_inf": [[0.2, 0], [-0.2, 0]], "a": [0.3, 0]})")});
  CHECK(r.code == 2);

  r = run_cli({"fusion-check", "--config", write("top.json", "[1, 2]")});
  CHECK(r.code == 2);
}

TEST_CASE("numerical errors exit with 3") {
  auto r = run_cli({"three-point", "--config",
                    write("res.json", R"({"theta0": [[0.1, 0], [-0.1, 0]], "theta_inf": [[0.5, 0], [-0.5, 0]], "a": [0.3, 0]})")});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "ResonantExponents"));
}

TEST_CASE("command-line errors exit with 2") {
  auto f = write("f.json", fusion_small);
  CHECK(run_cli({"fusion-check", "--config", f, "--bogus"}).code == 2);
  CHECK(run_cli({"fusion-check"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"fusion-check", "--config", f, "--threads", "0"}).code == 2);
  CHECK(run_cli({"fusion-check", "--config", f, "--draws", "-3"}).code == 2);
  CHECK(run_cli({"tau-crosscheck", "--config", f, "--side", "cft"}).code == 2);
  CHECK(run_cli({"fusion-check", "--config", f, "--side", "ode-only"}).code == 2);
}

TEST_CASE("fusion-check is deterministic") {
  auto f = config("fusion_default.json");
  auto a = run_cli({"fusion-check", "--config", f, "--draws", "1", "--seed", "7"});
  auto b = run_cli({"fusion-check", "--config", f, "--draws", "1", "--seed", "7"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = ojson::parse(a.out);
  CHECK(j["seed"] == 7);
  CHECK(j["results"]["draws"] == 1);
  auto c = run_cli({"fusion-check", "--config", f, "--draws", "1", "--seed", "8"});
  CHECK(ojson::parse(c.out)["seed"] == 8);
  CHECK(c.out != a.out);
}

TEST_CASE("thread count does not change results") {
  auto f = write("f.json", fusion_small);
  auto c1 = (scratch() / "t1.csv").string(), c3 = (scratch() / "t3.csv").string();
  auto a = run_cli({"fusion-check", "--config", f, "--threads", "1", "--out", c1});
  auto b = run_cli({"fusion-check", "--config", f, "--threads", "3", "--out", c3});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(c1) == slurp(c3));
}

TEST_CASE("config hash ignores key order and formatting") {
  auto a = run_cli({"fusion-check", "--config", write("h1.json", R"({"N": [2], "draws": 2, "seed": 3})")});
  auto b = run_cli({"fusion-check", "--config", write("h2.json", "{\n  \"seed\": 3,\n  \"N\": [2],\n  \"draws\": 2\n}")});
  auto c = run_cli({"fusion-check", "--config", write("h3.json", R"({"N": [2], "draws": 3, "seed": 3})")});
  auto h = [](const Result& r) { return ojson::parse(r.out)["config_hash"].get<std::string>(); };
  CHECK(h(a) == h(b));
  CHECK(h(a) != h(c));
}

TEST_CASE("degenerate fusion draws are counted, not fatal") {
  auto r = run_cli({"fusion-check", "--config", write("d.json", R"({"N": [2], "draws": 3, "sigma_scale": 1e-12, "seed": 1})"),
                    "--out", (scratch() / "d.csv").string()});
  CHECK(r.code == 0);
  auto j = ojson::parse(r.out);
  CHECK(j["results"]["degenerate_draws"].get<long>() > 0);
  CHECK(contains(slurp((scratch() / "d.csv").string()), ",,SineFactorZero\r\n"));
}

TEST_CASE("tau-crosscheck ODE side only") {
  auto cfg = write("x.json", R"({"theta_inf": [[0.23, 0.04], [-0.23, -0.04]], "a_t": [0.3, 0], "a_1": [0.4, 0],
    "t0": [0.05, 0], "t_max": 0.02, "t_min": 0.01, "points": 3, "seed": 3})");
  auto csv = (scratch() / "x.csv").string();
  auto r = run_cli({"tau-crosscheck", "--config", cfg, "--side", "ode-only", "--out", csv});
  INFO(r.err);
  REQUIRE(r.code == 0);
  std::string text = slurp(csv);
  CHECK(text.rfind("t_re,t_im,log_tau_re,log_tau_im,ode_re,ode_im\r\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  auto j = ojson::parse(r.out);
  CHECK(j["results"]["side"] == "ode-only");
  CHECK(j["checks"].empty());
}

TEST_CASE("monodromy and tau-ode commands") {
  auto r = run_cli({"monodromy", "--config", config("monodromy_n4_explicit.json")});
  INFO(r.err);
  CHECK(r.code == 0);
  auto cfg = write("o.json", R"({"theta_inf": [[0.23, 0.04], [-0.23, -0.04]], "a_t": [0.3, 0], "a_1": [0.4, 0],
    "t0": [0.05, 0], "t_path": [[0.2, 0]], "checkpoints": 2, "seed": 3})");
  r = run_cli({"tau-ode", "--config", cfg});
  INFO(r.err);
  CHECK(r.code == 0);
  auto j = ojson::parse(r.out);
  CHECK(j["command"] == "tau-ode");
  CHECK(j["status"] == "pass");
}
