// Behavioral tests for the focksim binary itself: exit-code taxonomy, the
// no-files-on-error guarantee, config/flag precedence, and output shape.
// The binary path arrives via the FOCKSIM_BIN environment variable (set by
// the ctest registration); everything runs in a scratch directory under the
// system temp path.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "focksim/serialize.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* bin = std::getenv("FOCKSIM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "FOCKSIM_BIN must point at the focksim binary");
  return bin;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "focksim_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      "\"" + cli_binary() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("cli: help and usage errors follow the exit-code taxonomy") {
  const fs::path dir = scratch("taxonomy");
  CHECK(run_cli("--help", dir / "help.log") == 0);
  CHECK(run_cli("homodyne --help", dir / "sub_help.log") == 0);
  CHECK(run_cli("", dir / "nosub.log") == 2);
  CHECK(run_cli("no-such-subcommand", dir / "badsub.log") == 2);
  CHECK(run_cli("homodyne --no-such-flag 3", dir / "badflag.log") == 2);
  CHECK(run_cli("homodyne --phi-steps notanint", dir / "badint.log") == 2);
}

TEST_CASE("cli: malformed configs exit 2 and write no output files") {
  const fs::path dir = scratch("badconfig");
  const fs::path out = dir / "out";

  auto expect_rejected = [&](const std::string& label, const std::string& config_text) {
    CAPTURE(label);
    const fs::path cfg = dir / (label + ".json");
    std::ofstream(cfg) << config_text;
    const int rc = run_cli("homodyne --config \"" + cfg.string() + "\" --out \"" +
                               out.string() + "\"",
                           dir / (label + ".log"));
    CHECK(rc == 2);
    CHECK(!fs::exists(out));
  };

  expect_rejected("syntax", "{ not json");
  expect_rejected("unknown_key", R"({"alfa": 1})");
  expect_rejected("bad_range", R"({"moments": 9})");
  expect_rejected("not_object", R"([1, 2, 3])");

  // Out-of-range flag values and infeasible cutoffs are usage errors too.
  CHECK(run_cli("homodyne --moments 7 --out \"" + out.string() + "\"",
                dir / "flagrange.log") == 2);
  CHECK(run_cli("homodyne --alpha 2 --cutoff 3 --out \"" + out.string() + "\"",
                dir / "cutoff.log") == 2);
  CHECK(run_cli("localize --n 4 --k 9 --out \"" + out.string() + "\"",
                dir / "depletion.log") == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("cli: phi sweep emits one ordered row per grid point") {
  const fs::path dir = scratch("sweep");
  const fs::path out = dir / "out";
  CHECK(run_cli("homodyne --phi-steps 64 --out \"" + out.string() + "\"",
                dir / "run.log") == 0);
  const auto lines = read_lines(out / "homodyne.csv");
  REQUIRE(lines.size() == 65);  // header + 64 data rows
  CHECK(lines[0].rfind("phi,factist_mean,fictionist_mean,abs_diff", 0) == 0);
  double prev = -1.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double phi = std::stod(lines[i].substr(0, lines[i].find(',')));
    CHECK(phi > prev);
    CHECK(phi < 2 * 3.14159265358979);
    prev = phi;
  }
  const auto manifest = focksim::load_json((out / "manifest.json").string());
  CHECK(manifest.at("pass").get<bool>());
  CHECK(manifest.at("config").at("phi-steps").get<int>() == 64);
  CHECK(manifest.at("assertions").size() == 1);
}

TEST_CASE("cli: flags override config file values") {
  const fs::path dir = scratch("precedence");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"alpha": "1+1i", "phi-steps": 4, "moments": 2})";
  const fs::path out = dir / "out";
  CHECK(run_cli("homodyne --config \"" + cfg.string() + "\" --phi-steps 2 --out \"" +
                    out.string() + "\"",
                dir / "run.log") == 0);
  const auto manifest = focksim::load_json((out / "manifest.json").string());
  CHECK(manifest.at("config").at("phi-steps").get<int>() == 2);    // flag wins
  CHECK(manifest.at("config").at("moments").get<int>() == 2);      // config applies
  CHECK(manifest.at("config").at("alpha").get<std::string>() == "1+1i");
  CHECK(read_lines(out / "homodyne.csv").size() == 3);
}

TEST_CASE("cli: reruns with identical config and seed are byte-identical") {
  const fs::path dir = scratch("rerun");
  const std::string args = "theorem-check --specs 2 --trials 1 --seed 42";
  CHECK(run_cli(args + " --out \"" + (dir / "a").string() + "\"", dir / "a.log") == 0);
  CHECK(run_cli(args + " --out \"" + (dir / "b").string() + "\"", dir / "b.log") == 0);
  for (const char* f : {"theorem.csv", "manifest.json"}) {
    std::ifstream fa(dir / "a" / f, std::ios::binary), fb(dir / "b" / f, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    REQUIRE(!sa.str().empty());
    CHECK(sa.str() == sb.str());
  }
}

TEST_CASE("cli: manifest records assertion failures and exit code 1") {
  const fs::path dir = scratch("assertfail");
  const fs::path out = dir / "out";
  // Heavy depletion of a small source: late detections push the posterior
  // entropy back up past the per-step slack, so the run's assertion fails
  // while its outputs are still written in full.
  const int rc = run_cli("localize --n 6 --k 9 --seeds 20 --out \"" + out.string() + "\"",
                         dir / "run.log");
  CHECK(rc == 1);
  const auto manifest = focksim::load_json((out / "manifest.json").string());
  CHECK(!manifest.at("pass").get<bool>());
  bool found_failing = false;
  for (const auto& a : manifest.at("assertions"))
    if (a.at("name") == "mean_entropy_non_increasing" && !a.at("pass").get<bool>())
      found_failing = true;
  CHECK(found_failing);
  CHECK(fs::exists(out / "entropy.csv"));
  CHECK(fs::exists(out / "visibility.csv"));
  CHECK(fs::exists(out / "samples.csv"));
}
