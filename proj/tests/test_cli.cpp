#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "beltrami/field.hpp"
#include "beltrami/maps.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BELTRAMI_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("beltrami_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

std::string summary_field(const std::string& csv, const std::string& column) {
  const auto nl = csv.find('\n');
  const std::string header = csv.substr(0, nl), row = csv.substr(nl + 1);
  std::size_t col = 0, pos = 0;
  while (true) {
    const auto next = header.find(',', pos);
    if (header.substr(pos, next - pos) == column) break;
    REQUIRE(next != std::string::npos);
    pos = next + 1;
    ++col;
  }
  pos = 0;
  for (std::size_t i = 0; i < col; ++i) pos = row.find(',', pos) + 1;
  return row.substr(pos, row.find_first_of(",\n", pos) - pos);
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("solve --help").code == 0);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("solve --map kabs:0.3 --bogus 1").code == 1);
  const Run bad = run("solve --map kabs:zz --out /tmp/unused_beltrami");
  CHECK(bad.code == 1);
  CHECK(bad.output.find("bad map token") != std::string::npos);
}

TEST_CASE("solve: identity writes every artifact") {
  Scratch s("identity");
  const Run r = run("solve --map linear:0,0,0,0 --grid 32 --out " + s / "out");
  REQUIRE(r.code == 0);
  for (const char* f : {"solution.bfld", "report.csv", "summary.csv", "dz.pgm", "manifest.json"})
    CHECK_MESSAGE(fs::exists(s.dir / "out" / f), f);
  const json m = json::parse(slurp(s.dir / "out" / "manifest.json"));
  CHECK(m["command"] == "solve");
  CHECK(m["config"]["map"] == "linear:0,0,0,0");
  CHECK(m["config"]["grid"] == 32);
  CHECK(m["outputs"]["converged"] == true);
  CHECK(m["outputs"]["heatmap"]["quantity"] == "|f_z|");
  const beltrami::GridField f = beltrami::read_field(s / "out/solution.bfld");
  CHECK(f.c() == beltrami::cplx(1, 0));
  CHECK(slurp(s.dir / "out" / "dz.pgm").rfind("P5\n32 32\n255\n", 0) == 0);
}

TEST_SUITE("solve") {
  TEST_CASE("kabs with a forcing file contracts at rate k") {
    Scratch s("kabs");
    const beltrami::GridSpec spec = beltrami::GridSpec::make(128);
    beltrami::write_field(beltrami::sample_forcing("mode:0.1,0,1,0", spec), s / "h.bfld");
    const Run r = run("solve --map kabs:0.3 --grid 128 --h " + s / "h.bfld" + " --mean 1,0 --tol 1e-10 --out " +
                      s / "out");
    REQUIRE(r.code == 0);
    const std::string summary = slurp(s.dir / "out" / "summary.csv");
    CHECK(std::stod(summary_field(summary, "contraction_ratio")) <= 0.32);
    CHECK(summary_field(summary, "converged") == "1");
  }

  TEST_CASE("forcing file on the wrong grid is a usage error") {
    Scratch s("wronggrid");
    beltrami::write_field(beltrami::GridField::zeros(beltrami::GridSpec::make(64)), s / "h.bfld");
    CHECK(run("solve --map kabs:0.3 --grid 128 --h " + s / "h.bfld" + " --out " + s / "out").code == 1);
  }

  TEST_CASE("ellipticity violation exits 1 with the message") {
    Scratch s("ellip");
    const Run r = run("solve --map linear:2,0,0,0 --grid 32 --out " + s / "out");
    CHECK(r.code == 1);
    CHECK(r.output.find("ellipticity violated: |a|+|b| = 2 ≥ 1") != std::string::npos);
  }

  TEST_CASE("non-convergence exits 2 and still writes the report") {
    Scratch s("noconv");
    const Run r = run("solve --map kabs:0.9 --h bump:0.5,0,0.3 --grid 32 --tol 1e-15 --max-iter 3 --out " + s / "out");
    CHECK(r.code == 2);
    const std::string summary = slurp(s.dir / "out" / "summary.csv");
    CHECK(summary_field(summary, "converged") == "0");
    CHECK(summary_field(summary, "iterations") == "3");
  }

  TEST_CASE("linear solver selection") {
    Scratch s("linsel");
    CHECK(run("solve --map linear:0.3,0,0.2,0 --h mode:0.1,0,1,0 --grid 32 --solver changevar --out " + s / "a").code ==
          0);
    CHECK(run("solve --map linear:0.3,0,0.2,0 --h mode:0.1,0,1,0 --grid 32 --solver neumann --out " + s / "b").code ==
          0);
    CHECK(run("solve --map kabs:0.3 --grid 32 --solver neumann --out " + s / "c").code == 1);
    CHECK(run("solve --map kabs:0.3 --grid 32 --solver other --out " + s / "d").code == 1);
  }

  TEST_CASE("full map with damping") {
    Scratch s("full");
    const Run r = run("solve --map linear:0.3,0,0,0+wterm:0.05 --grid 32 --damping 0.5 --out " + s / "out");
    CHECK(r.code == 0);
    CHECK(summary_field(slurp(s.dir / "out" / "summary.csv"), "method") == "full-picard");
  }

  TEST_CASE("seeded runs are byte-identical") {
    Scratch s("determinism");
    const std::string args = " --map kabs:0.3 --h bump:0.5,0,0.3 --grid 64 --seed 5 --out ";
    REQUIRE(run("solve" + args + s / "a").code == 0);
    REQUIRE(run("solve" + args + s / "b").code == 0);
    for (const char* f : {"solution.bfld", "report.csv", "summary.csv", "dz.pgm"})
      CHECK_MESSAGE(slurp(s.dir / "a" / f) == slurp(s.dir / "b" / f), f);
  }
}

TEST_SUITE("probe") {
  TEST_CASE("identity ladder") {
    Scratch s("probe_id");
    const Run r = run("probe --builtin identity --grid 16 --out " + s / "out");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("p_critical=inf") != std::string::npos);
    CHECK(slurp(s.dir / "out" / "regularity.csv").rfind("record,p,n,norm,p_critical,fit_r2,distortion_max\n", 0) ==
          0);
  }

  TEST_CASE("radial extremal with K = 2") {
    Scratch s("probe_radial");
    const Run r = run("probe --builtin radial:2 --grid 128 --levels 3 --out " + s / "out");
    REQUIRE(r.code == 0);
    const auto pos = r.output.find("p_critical=");
    REQUIRE(pos != std::string::npos);
    const double p = std::stod(r.output.substr(pos + 11));
    CHECK(p >= 3.6);
    CHECK(p <= 4.4);
  }

  TEST_CASE("ladder files") {
    Scratch s("probe_ladder");
    std::string list;
    for (int n : {16, 32, 64}) {
      const std::string path = s / ("f" + std::to_string(n) + ".bfld");
      beltrami::write_field(beltrami::GridField::zeros(beltrami::GridSpec::make(n)).with_affine(1.0, 0.0), path);
      list += (list.empty() ? "" : ",") + path;
    }
    const Run r = run("probe --ladder " + list + " --second-order --k 0.5 --p 1,2,2.9 --out " + s / "out");
    CHECK(r.code == 0);
    CHECK(r.output.find("stable_below_threshold=1") != std::string::npos);
    CHECK(run("probe --ladder " + list.substr(0, list.rfind(',')) + " --out " + s / "out2").code != 0);
  }

  TEST_CASE("smoothsat re-solve ladder is stable up to p = 10") {
    Scratch s("probe_solve");
    const Run r = run("probe --map smoothsat:0.3,0,0.2,0,0.1 --h bump:0.5,0,0.3 --grid 64 --levels 3 --out " +
                      s / "out");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("p_critical=inf") != std::string::npos);
  }
}

TEST_SUITE("verify-transform") {
  TEST_CASE("one-sided coefficient takes the numeric root") {
    Scratch s("vt");
    const Run r = run("verify-transform --a 0.5,0 --b 0,0 --out " + s / "out");
    CHECK(r.code == 0);
    CHECK(r.output.find("path=numeric-root") != std::string::npos);
    CHECK(r.output.find("mu=-0.5,") != std::string::npos);
    CHECK(fs::exists(s.dir / "out" / "transform.csv"));
    const json m = json::parse(slurp(s.dir / "out" / "manifest.json"));
    CHECK(m["outputs"]["pass"] == true);
  }

  TEST_CASE("non-elliptic coefficients exit 1") {
    Scratch s("vt_bad");
    CHECK(run("verify-transform --a 0.6,0 --b 0.5,0 --out " + s / "out").code == 1);
  }
}

TEST_SUITE("analysis commands") {
  TEST_CASE("coefficients, hodograph and report on a forced kabs solve") {
    Scratch s("analysis");
    const std::string src = " --map kabs:0.3 --h bump:0.5,0,0.3 --grid 64 --forcing-free --out ";
    const Run c = run("coefficients" + src + s / "c");
    REQUIRE(c.code == 0);
    CHECK(fs::exists(s.dir / "c" / "mu.bfld"));
    CHECK(fs::exists(s.dir / "c" / "coefficients.csv"));
    const Run h = run("hodograph" + src + s / "h" + " --jacobian-min 0.1 --samples 20");
    REQUIRE(h.code == 0);
    CHECK(fs::exists(s.dir / "h" / "hodograph.csv"));
    const Run r = run("report" + src + s / "r");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(s.dir / "r" / "distortion.csv"));
    CHECK(fs::exists(s.dir / "r" / "dz.pgm"));
  }

  TEST_CASE("report on a field file") {
    Scratch s("report_file");
    beltrami::write_field(beltrami::GridField::zeros(beltrami::GridSpec::make(16)).with_affine(1.0, 0.5), s / "f.bfld");
    const Run r = run("report --field " + s / "f.bfld" + " --out " + s / "r");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("distortion_max=3") != std::string::npos);
  }

  TEST_CASE("missing inputs are usage errors") {
    Scratch s("missing");
    CHECK(run("report --out " + s / "r").code == 1);
    CHECK(run("hodograph --field nofile.bfld --out " + s / "r").code == 1);
    CHECK(run("report --field " + s / "nofile.bfld" + " --out " + s / "r").code == 1);
  }
}
