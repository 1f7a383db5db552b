// End-to-end checks of the fidlab binary: JSON on stdout, diagnostics on
// stderr, exit codes, reproducibility, config plumbing.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#ifndef FIDLAB_CLI
#error "FIDLAB_CLI must point at the fidlab binary"
#endif
#ifndef FIDLAB_FIXTURES
#error "FIDLAB_FIXTURES must point at the fixtures directory"
#endif

namespace {

using Json = nlohmann::json;

struct RunResult {
  int exit_code;
  std::string out;
};

std::string fixture(const std::string& name) {
  return std::string(FIDLAB_FIXTURES) + "/" + name;
}

// stdout only; stderr goes to the test log
RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(FIDLAB_CLI) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    out.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  return RunResult{WEXITSTATUS(status), out};
}

Json parse(const RunResult& r) {
  Json j = Json::parse(r.out, nullptr, false);
  REQUIRE_FALSE(j.is_discarded());
  return j;
}

}  // namespace

TEST_CASE("fidelity of equal states across all routes") {
  RunResult r = run("fidelity --sigma " + fixture("state-mixed-m2.json") +
                    " --rho " + fixture("state-mixed-m2.json") + " --routes all");
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  CHECK(j["fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  for (const char* route : {"direct", "mu", "block", "var1", "var2"}) {
    CHECK(j["routes"][route].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(j["max_disagreement"].get<double>() <= 1e-6);
  CHECK(j["bures"].get<double>() == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("fidelity of an orthogonal pair vanishes on every route") {
  RunResult r = run("fidelity --sigma " + fixture("state-e1-m2.json") + " --rho " +
                    fixture("state-e2-m2.json") + " --routes all");
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  for (const char* route : {"direct", "mu", "block"}) {
    CHECK(std::abs(j["routes"][route].get<double>()) <= 1e-12);
  }
  for (const char* route : {"var1", "var2"}) {
    CHECK(std::abs(j["routes"][route].get<double>()) <= 1e-6);
  }
}

TEST_CASE("fidelity of the |0>,|+> pair") {
  RunResult r = run("fidelity --sigma " + fixture("state-e1-m2.json") + " --rho " +
                    fixture("state-plus-m2.json") + " --routes all");
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  for (const char* route : {"direct", "mu", "block", "var1", "var2"}) {
    CHECK(j["routes"][route].get<double>() ==
          doctest::Approx(0.7071067811865476).epsilon(1e-6));
  }
}

TEST_CASE("bures subcommand") {
  RunResult r = run("bures --sigma " + fixture("state-e1-m2.json") + " --rho " +
                    fixture("state-mixed-m2.json"));
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  CHECK(j["fidelity"].get<double>() ==
        doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(j["bures"].get<double>() ==
        doctest::Approx(std::sqrt(1.0 - 0.7071067811865476)).epsilon(1e-12));
}

TEST_CASE("channel apply") {
  RunResult r = run("channel apply --channel " + fixture("channel-pauli-x-m2.json") +
                    " --state " + fixture("state-e1-m2.json"));
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  // X |0><0| X = |1><1|
  CHECK(j["blocks"][0][1][1][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["blocks"][0][0][0][0].get<double>() == doctest::Approx(0.0));

  RunResult depol = run("channel apply --channel " +
                        fixture("channel-depolarizing-10-m2.json") + " --state " +
                        fixture("state-e1-m2.json"));
  Json dj = parse(depol);
  CHECK(dj["blocks"][0][0][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dj["blocks"][0][1][1][0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("order subcommand reproduces the divergence verdicts") {
  RunResult omega = run("order --input " + fixture("predual-omega.json"));
  CHECK(omega.exit_code == 0);
  Json jo = parse(omega);
  CHECK(jo["predual_positive"].get<bool>());
  CHECK_FALSE(jo["operator_matrix_psd"].get<bool>());
  CHECK(std::abs(jo["choi_min_eig"].get<double>()) <= 1e-12);
  CHECK(jo["operator_min_eig"].get<double>() == doctest::Approx(-1.0).epsilon(1e-13));

  RunResult delta = run("order --input " + fixture("predual-delta.json"));
  CHECK(delta.exit_code == 0);
  Json jd = parse(delta);
  CHECK_FALSE(jd["predual_positive"].get<bool>());
  CHECK(jd["operator_matrix_psd"].get<bool>());
  CHECK(jd["choi_min_eig"].get<double>() < -0.5);
  CHECK(std::abs(jd["operator_min_eig"].get<double>()) <= 1e-13);

  RunResult single = run("order --input " + fixture("predual-n1-psd.json"));
  Json js = parse(single);
  CHECK(js["predual_positive"].get<bool>());
  CHECK(js["operator_matrix_psd"].get<bool>());
}

TEST_CASE("sweep monotonicity is deterministic and passes") {
  const std::string args = "--seed 7 sweep monotonicity -d 2 -n 100";
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);  // byte-identical stdout
  Json j = parse(a);
  CHECK(j["pass"].get<bool>());
  CHECK(j["min_margin"].get<double>() >= -1e-9);
  CHECK_FALSE(j.contains("runtime_ms"));

  RunResult c = run("--seed 8 sweep monotonicity -d 2 -n 100");
  CHECK(c.out != a.out);

  // the serial engine must agree byte-for-byte with the parallel one
  RunResult serial = run("--serial " + args);
  CHECK(serial.out == a.out);

  // an explicit flag overrides the seed from a config file
  const std::string cfg = "cli_seed_config_test.json";
  {
    std::ofstream out(cfg);
    out << "{\"seed\": 3}";
  }
  RunResult flagged = run("--config " + cfg + " " + args);
  CHECK(flagged.out == a.out);
  std::remove(cfg.c_str());
}

TEST_CASE("fidelity output is byte-identical across runs") {
  const std::string args = "fidelity --sigma " + fixture("state-e1-m2.json") +
                           " --rho " + fixture("state-plus-m2.json") +
                           " --routes all --seed 5";
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("sweep preserve classifies the bundled channel zoo") {
  RunResult uni = run("--seed 5 sweep preserve --channel " +
                      fixture("channel-pauli-x-m2.json") + " -n 32");
  CHECK(uni.exit_code == 0);
  Json ju = parse(uni);
  CHECK(ju["verdict"].get<std::string>() == "preserving");
  CHECK(ju["recovery"]["ok"].get<bool>());

  RunResult depol = run("--seed 5 sweep preserve --channel " +
                        fixture("channel-depolarizing-05-m2.json") + " -n 32");
  CHECK(depol.exit_code == 0);  // classification, not failure
  Json jd = parse(depol);
  CHECK(jd["verdict"].get<std::string>() == "strictly_increasing_somewhere");
  CHECK_FALSE(jd["witness"].is_null());

  RunResult damp = run("--seed 5 sweep preserve --channel " +
                       fixture("channel-amplitude-damping-05-m2.json") + " -n 32");
  Json ja = parse(damp);
  CHECK(ja["verdict"].get<std::string>() == "strictly_increasing_somewhere");
}

TEST_CASE("car subcommand") {
  RunResult r = run("--seed 11 car --level 1 --depth 3");
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  REQUIRE(j["values"].size() == 4);
  CHECK(j["max_spread"].get<double>() <= 1e-10);

  RunResult bad = run("car --level 40");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("csv export") {
  const std::string csv = "cli_margins_test.csv";
  RunResult r = run("--seed 7 sweep metric -d 2 -n 20 --csv " + csv);
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "trial_index,margin,seed");
  in.close();
  std::remove(csv.c_str());
}

TEST_CASE("validation errors exit with code 2 and name the field") {
  const std::string bad = "cli_bad_state_test.json";
  {
    std::ofstream out(bad);
    out << "{\"algebra\": {\"blocks\": [{\"dim\": 2, \"weight\": 1.0}]}}";
  }
  RunResult r = run("fidelity --sigma " + bad + " --rho " + bad + " 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("blocks") != std::string::npos);
  std::remove(bad.c_str());

  RunResult missing = run("fidelity --sigma does_not_exist.json --rho " +
                          fixture("state-e1-m2.json") + " 2>&1");
  CHECK(missing.exit_code == 2);

  // a non-density input is rejected
  RunResult notdensity = run("fidelity --sigma " + fixture("predual-omega.json") +
                             " --rho " + fixture("state-e1-m2.json") + " 2>&1");
  CHECK(notdensity.exit_code == 2);

  RunResult badflags = run("sweep bogus 2>&1");
  CHECK(badflags.exit_code == 2);
}

TEST_CASE("selftest runs the sanity criterion and honors config sabotage") {
  RunResult ok = run("selftest --criteria sanity");
  CHECK(ok.exit_code == 0);
  Json j = parse(ok);
  CHECK(j["pass"].get<bool>());
  CHECK(j["criteria"][0]["id"].get<std::string>() == "sanity");

  // a corrupted tolerance must be detected and fail the suite
  const std::string cfg = "cli_sabotage_config_test.json";
  {
    std::ofstream out(cfg);
    out << "{\"psd_tol\": 1e2}";
  }
  RunResult sabotaged = run("--config " + cfg + " selftest --criteria sanity");
  CHECK(sabotaged.exit_code == 1);
  Json js = parse(sabotaged);
  CHECK_FALSE(js["pass"].get<bool>());

  // the same config through the environment variable
  RunResult via_env = run("selftest --criteria sanity", "FIDLAB_CONFIG=" + cfg);
  CHECK(via_env.exit_code == 1);
  std::remove(cfg.c_str());
}

TEST_CASE("selftest covers the fast criteria") {
  RunResult r = run("--seed 3 selftest --criteria sanity,predual,schwarz_gap");
  CHECK(r.exit_code == 0);
  Json j = parse(r);
  CHECK(j["criteria"].size() == 3);
  CHECK(j["pass"].get<bool>());
}
