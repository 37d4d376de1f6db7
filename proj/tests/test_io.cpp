#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "prlab/flows.hpp"
#include "prlab/io.hpp"

using namespace prlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "prlab_test_io";
  fs::create_directories(dir);
  return dir / name;
}

State sample_state() {
  const PeriodicGrid g(1.5, 8);
  State s(g);
  s.u = random_solenoidal(g, 2, 1.0, 1);
  s.d = random_vector(g, 2, 1.0, 2);
  s.p = random_scalar(g, 2, 1.0, 3);
  s.t = 0.125;
  return s;
}

ErrorCode read_error(const std::string& path) {
  try {
    read_snapshot(path);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("snapshot round trip") {
  const State s = sample_state();
  const std::string path = scratch("a.prlb").string();
  write_snapshot(s, path);
  const State r = read_snapshot(path);
  CHECK(r.grid() == s.grid());
  CHECK(r.t == s.t);
  CHECK((r.u.values() == s.u.values()).all());
  CHECK((r.d.values() == s.d.values()).all());
  CHECK((r.p.values() == s.p.values()).all());
}

TEST_CASE("corrupt snapshots are refused") {
  const State s = sample_state();
  const std::string path = scratch("b.prlb").string();
  write_snapshot(s, path);
  const auto size = fs::file_size(path);

  fs::resize_file(path, size - 8);
  try {
    read_snapshot(path);
    FAIL("truncated snapshot was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
    CHECK(std::string(e.what()).find("payload") != std::string::npos);
  }

  fs::resize_file(path, 10);
  CHECK(read_error(path) == ErrorCode::Format);

  write_snapshot(s, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint32_t next = kSnapshotVersion + 1;
    f.write(reinterpret_cast<const char*>(&next), sizeof next);
  }
  try {
    read_snapshot(path);
    FAIL("future version was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VersionMismatch);
    CHECK(std::string(e.what()).find("regenerate") != std::string::npos);
  }

  write_snapshot(s, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(std::streamoff(size - 3));
    f.put('\x7f');
  }
  CHECK(read_error(path) == ErrorCode::Format);

  std::ofstream(scratch("c.prlb"), std::ios::binary) << "NOPE and more bytes than a header needs";
  CHECK(read_error(scratch("c.prlb").string()) == ErrorCode::Format);
  CHECK(read_error(scratch("missing.prlb").string()) == ErrorCode::Io);
}

TEST_CASE("trajectory directory round trip") {
  AnalyticFlowConfig c;
  c.extent = 1.0;
  c.t_first = 0.0;
  const Trajectory t = AnalyticFlow(c).trajectory(PeriodicGrid(1.0, 8), 0.0, 0.01, 4);
  const std::string dir = scratch("traj").string();
  fs::remove_all(dir);
  write_trajectory(t, dir);
  CHECK(fs::exists(fs::path(dir) / "run.json"));
  CHECK(fs::exists(fs::path(dir) / "energy.csv"));
  const Trajectory r = read_trajectory(dir);
  REQUIRE(r.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(r[i].t == t[i].t);
    CHECK(testing_util::max_diff(r[i].u, t[i].u) == 0.0);
  }
  CHECK(r.metadata().extent == t.metadata().extent);
}

TEST_CASE("run configuration schema") {
  const Json j = Json::parse(R"({"solver": {"resolution": 16, "dt": 0.001, "t_end": 0.01},
                                 "initial": {"velocity": "random", "seed": 3},
                                 "detector": {"q": 5.5, "sigma": 5.75},
                                 "output": {"directory": "x"}})");
  const RunConfig c = parse_run_config(j);
  CHECK(c.solver.resolution == 16);
  CHECK(c.initial.velocity == "random");
  CHECK(c.initial.seed == 3);
  CHECK(c.detector.q == 5.5);
  CHECK(c.output.directory == "x");
  const RunConfig again = parse_run_config(to_json(c));
  CHECK(to_json(again) == to_json(c));

  const auto code_of = [](const char* text) {
    try {
      validate(parse_run_config(Json::parse(text)));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of(R"({"solver": {"resoluton": 16}})") == ErrorCode::Schema);
  CHECK(code_of(R"({"extra": {}})") == ErrorCode::Schema);
  CHECK(code_of(R"({"initial": {"velocity": "vortex"}})") == ErrorCode::Schema);
  CHECK(code_of(R"({"solver": {"dt": "fast"}})") == ErrorCode::Schema);
  CHECK(code_of(R"({"detector": {"q": 7}})") == ErrorCode::Schema);
  CHECK(code_of(R"({})") == ErrorCode::Io);
}

TEST_CASE("error records and exit codes") {
  CHECK(exit_code(ErrorCode::Schema) == 2);
  CHECK(exit_code(ErrorCode::UnderResolved) == 3);
  CHECK(exit_code(ErrorCode::WindowViolation) == 4);
  CHECK(exit_code(ErrorCode::VersionMismatch) == 5);
  CHECK(exit_code(ErrorCode::BlowUp) == 6);
  const Json r = error_record(Error(ErrorCode::UnderResolved, "radius too small"));
  CHECK(r["error"] == "UnderResolved");
  CHECK(r["exit_code"] == 3);
  CHECK(r["message"] == "radius too small");
}

TEST_CASE("CSV emitters") {
  std::vector<GlobalEnergyRecord> e{{0.0, 1.0, 2.0}, {0.1, 0.9, 1.5}};
  const fs::path p = scratch("sub/energy.csv");
  fs::remove_all(p.parent_path());
  write_energy_csv(e, p.string());
  std::ifstream in(p);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "t,E,D");
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == 2);
}
