#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "viscospec/basis_io.hpp"
#include "viscospec/viscospec.hpp"

using namespace viscospec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("viscospec_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool states_identical(const SimState& a, const SimState& b) {
  if (a.t != b.t || a.eps != b.eps || !(a.grid() == b.grid())) return false;
  for (int i = 0; i < a.grid().d; ++i)
    if (a.u[i].spec() != b.u[i].spec()) return false;
  for (int i = 0; i < a.grid().d; ++i)
    for (int j = 0; j < a.grid().d; ++j)
      if (a.F(i, j).spec() != b.F(i, j).spec()) return false;
  return true;
}

}  // namespace

TEST_CASE("taylor_green initial data matches the closed form") {
  Scenario sc;
  sc.generator = "taylor_green";
  sc.n = 32;
  sc.amplitude = 0.7;
  auto s = make_initial(sc);
  const Grid& g = s.grid();
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto idx = g.unravel(p);
    double x = g.x(idx[0]), y = g.x(idx[1]);
    CHECK(s.u[0].phys()[p] ==
          Catch::Approx(0.7 * std::sin(x) * std::cos(y)).margin(1e-13));
    CHECK(s.u[1].phys()[p] ==
          Catch::Approx(-0.7 * std::cos(x) * std::sin(y)).margin(1e-13));
  }
  CHECK(norm(divergence_vec(s.u)) < 1e-13);
  CHECK(norm(s.F) == 0.0);
}

TEST_CASE("identity_plus_perturbation with delta zero gives F = I") {
  Scenario sc;
  sc.generator = "identity_plus_perturbation";
  sc.n = 16;
  sc.amplitude = 0.4;
  sc.delta = 0.0;
  auto s = make_initial(sc);
  const Grid& g = s.grid();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (std::size_t p = 0; p < g.size(); ++p)
        CHECK(s.F(i, j).phys()[p] ==
              Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
  CHECK(max_abs(s.u) > 0.0);
  CHECK(max_abs(s.u) <= 0.4 + 1e-12);
}

TEST_CASE("random scenarios are deterministic in the seed") {
  Scenario sc;
  sc.generator = "random_divfree";
  sc.n = 16;
  sc.amplitude = 0.8;
  sc.seed = 424242;
  auto a = make_initial(sc);
  auto b = make_initial(sc);
  CHECK(states_identical(a, b));
  sc.seed = 424243;
  auto c = make_initial(sc);
  CHECK_FALSE(states_identical(a, c));

  // Initial data is projected and dealiased.
  CHECK(norm(divergence_vec(a.u)) < 1e-12 * norm(a.u));
  CHECK(norm(divergence_tensor(a.F)) < 1e-12 * norm(a.F));
}

TEST_CASE("unknown generator is rejected") {
  Scenario sc;
  sc.generator = "vortex_sheet";
  CHECK_THROWS_AS(make_initial(sc), UnknownGenerator);
}

TEST_CASE("snapshot round trip is bit identical") {
  TempDir tmp;
  Scenario sc;
  sc.generator = "random_divfree";
  sc.n = 16;
  sc.amplitude = 0.3;
  sc.seed = 5;
  sc.eps = 0.05;
  auto s = make_initial(sc);
  s.t = 0.375;
  s.eps = 0.05;

  save_snapshot(tmp.file("a.bin"), s);
  auto r = load_snapshot(tmp.file("a.bin"));
  CHECK(states_identical(s, r));

  // Re-saving the loaded state reproduces the file byte for byte.
  save_snapshot(tmp.file("b.bin"), r);
  CHECK(slurp(tmp.file("a.bin")) == slurp(tmp.file("b.bin")));
}

TEST_CASE("snapshot loader rejects corrupt files") {
  TempDir tmp;
  Scenario sc;
  sc.generator = "taylor_green";
  sc.n = 16;
  auto s = make_initial(sc);
  save_snapshot(tmp.file("good.bin"), s);
  std::string bytes = slurp(tmp.file("good.bin"));

  SECTION("wrong magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(tmp.file("bad.bin"), std::ios::binary) << bad;
    CHECK_THROWS_AS(load_snapshot(tmp.file("bad.bin")), BadMagic);
  }
  SECTION("unsupported version") {
    std::string bad = bytes;
    bad[8] = 99;
    std::ofstream(tmp.file("bad.bin"), std::ios::binary) << bad;
    CHECK_THROWS_AS(load_snapshot(tmp.file("bad.bin")), VersionUnsupported);
  }
  SECTION("truncated payload") {
    std::ofstream(tmp.file("bad.bin"), std::ios::binary)
        << bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(load_snapshot(tmp.file("bad.bin")), TruncatedPayload);
  }
}

TEST_CASE("basis file round trip") {
  TempDir tmp;
  RectGrid g(6, 5, 1.0, 2.0);
  auto basis = eigensolve(g, 6);
  save_basis(tmp.file("basis.bin"), g, basis);
  RectGrid g2(1, 1);
  auto loaded = load_basis(tmp.file("basis.bin"), g2);
  REQUIRE(loaded.size() == basis.size());
  CHECK(g2.nx == g.nx);
  CHECK(g2.ny == g.ny);
  CHECK(g2.lx == g.lx);
  CHECK(g2.ly == g.ly);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    CHECK(loaded[m].lambda == basis[m].lambda);
    for (int c = 0; c < 4; ++c)
      CHECK((loaded[m].phi[c] - basis[m].phi[c]).norm() == 0.0);
  }
}

TEST_CASE("scenario parsing") {
  std::istringstream in(
      "# comment line\n"
      "name = demo\n"
      "d = 2\n"
      "n = 24\n"
      "generator = single_mode\n"
      "amplitude = 0.5   # trailing comment\n"
      "mode = 2 1\n"
      "seed = 77\n"
      "eps = 0.125\n"
      "dt = 0.002\n"
      "t_end = 0.75\n"
      "snapshot_every = 10\n");
  Scenario sc = parse_scenario(in);
  CHECK(sc.name == "demo");
  CHECK(sc.n == 24);
  CHECK(sc.generator == "single_mode");
  CHECK(sc.amplitude == 0.5);
  CHECK(sc.mode == std::array<int, 3>{2, 1, 0});
  CHECK(sc.seed == 77);
  CHECK(sc.eps == 0.125);
  CHECK(sc.integrator.dt == 0.002);
  CHECK(sc.integrator.t_end == 0.75);
  CHECK(sc.integrator.snapshot_every == 10);
}

TEST_CASE("scenario parse errors carry line context") {
  {
    std::istringstream in("n = 16\nbogus_key = 3\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  {
    std::istringstream in("just some words\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  {
    std::istringstream in("amplitude = fast\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("csv output is locale independent and round trips") {
  TempDir tmp;
  {
    CsvWriter csv(tmp.file("t.csv"), {"t", "value"});
    csv.row({0.1, 1.0 / 3.0});
    csv.row({2.5e-17, -4031.25});
  }
  std::string text = slurp(tmp.file("t.csv"));
  std::istringstream lines(text);
  std::string header, r1, r2;
  std::getline(lines, header);
  std::getline(lines, r1);
  std::getline(lines, r2);
  CHECK(header == "t,value");
  CHECK(r1 == "0.10000000000000001," + fmt_double(1.0 / 3.0));
  CHECK(text.find(';') == std::string::npos);

  // 17 significant digits reparse to the identical double.
  CHECK(std::stod(fmt_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(fmt_double(2.5e-17)) == 2.5e-17);
  CHECK(std::stod(fmt_double(-4031.25)) == -4031.25);

  CsvWriter bad(tmp.file("u.csv"), {"a", "b"});
  CHECK_THROWS_AS(bad.row({1.0}), std::logic_error);
}
