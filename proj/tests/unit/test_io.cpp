#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "pemfc/errors.hpp"
#include "pemfc/io.hpp"
#include "pemfc/synthdata.hpp"

using namespace pemfc;
namespace fs = std::filesystem;

namespace {

// Scratch directory per test case, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pemfc_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

GroundTruth small_truth() {
  GroundTruth gt;
  gt.horizon = 2000;  // keep round-trip files small
  gt.t_break = 1200.0;
  gt.t_max = 2500.0;
  return gt;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void patch_file(const fs::path& p, const std::string& from, const std::string& to) {
  std::string text = slurp(p);
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("format_double") {
    CHECK(format_double(38000.0) == "38000");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(0.08) == "0.08");
    CHECK(format_double(1e-06) == "1e-06");
    // Shortest representation still round-trips exactly.
    const double v = 0.6246916317942112;
    CHECK(std::stod(format_double(v)) == v);
  }

  TEST_CASE("atomic write leaves only the final file") {
    TempDir dir;
    const fs::path target = dir.path / "out.txt";
    write_file_atomic(target, "hello\n");
    CHECK(slurp(target) == "hello\n");
    int n_entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++n_entries;
    CHECK(n_entries == 1);  // no stray temp files
    // Overwrite works too.
    write_file_atomic(target, "world\n");
    CHECK(slurp(target) == "world\n");
  }

  TEST_CASE("database round trip is exact") {
    TempDir dir;
    const Database db = generate_database(small_truth());
    write_database(dir.path, db);
    const Database back = read_database(dir.path);
    REQUIRE(back.curves.size() == db.curves.size());
    REQUIRE(back.voltage_hourly.size() == db.voltage_hourly.size());
    for (size_t i = 0; i < db.curves.size(); ++i) {
      CHECK(back.curves[i].t == db.curves[i].t);
      REQUIRE(back.curves[i].points.size() == db.curves[i].points.size());
      REQUIRE(back.curves[i].r_ohm_profile.size() == db.curves[i].r_ohm_profile.size());
      for (size_t k = 0; k < db.curves[i].points.size(); ++k) {
        CHECK(back.curves[i].points[k] == db.curves[i].points[k]);  // bit-exact
      }
      for (size_t k = 0; k < db.curves[i].r_ohm_profile.size(); ++k) {
        CHECK(back.curves[i].r_ohm_profile[k] == db.curves[i].r_ohm_profile[k]);
      }
    }
    for (size_t t = 0; t < db.voltage_hourly.size(); ++t) {
      CHECK(back.voltage_hourly[t] == db.voltage_hourly[t]);
    }
  }

  TEST_CASE("database writes are byte-stable") {
    TempDir a, b;
    const Database db = generate_database(small_truth());
    write_database(a.path, db);
    write_database(b.path, db);
    for (const char* name : {"polarization.csv", "r_ohm.csv", "voltage.csv"}) {
      CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
  }

  TEST_CASE("reader rejects malformed databases") {
    TempDir dir;
    CHECK_THROWS_AS(read_database(dir.path / "missing"), IoError);

    const Database db = generate_database(small_truth());
    write_database(dir.path, db);

    SUBCASE("wrong header") {
      patch_file(dir.path / "voltage.csv", "t_h,u_V", "time,volts");
      CHECK_THROWS_AS(read_database(dir.path), IoError);
    }
    SUBCASE("unparseable number") {
      patch_file(dir.path / "voltage.csv", "0,", "zero,");
      CHECK_THROWS_AS(read_database(dir.path), IoError);
    }
    SUBCASE("gap in the hourly series") {
      // Drop the second voltage row: hours are no longer contiguous.
      std::string text = slurp(dir.path / "voltage.csv");
      const auto first_nl = text.find('\n', text.find('\n') + 1);
      const auto second_nl = text.find('\n', first_nl + 1);
      text.erase(first_nl + 1, second_nl - first_nl);
      std::ofstream out(dir.path / "voltage.csv", std::ios::binary | std::ios::trunc);
      out << text;
      out.close();
      CHECK_THROWS_AS(read_database(dir.path), IoError);
    }
  }

  TEST_CASE("truth json round trip") {
    TempDir dir;
    GroundTruth gt = small_truth();
    gt.k0 = 1.27;
    gt.jlim_accel = 1.62;
    const fs::path p = dir.path / "truth.json";
    write_truth_json(p, gt);
    const GroundTruth back = read_truth_json(p);
    CHECK(back.a0 == gt.a0);
    CHECK(back.k0 == gt.k0);
    CHECK(back.an == gt.an);
    CHECK(back.kn == gt.kn);
    CHECK(back.r_ohm0 == gt.r_ohm0);
    CHECK(back.k_ohm == gt.k_ohm);
    CHECK(back.beta == gt.beta);
    CHECK(back.jlim_a == gt.jlim_a);
    CHECK(back.jlim_b == gt.jlim_b);
    CHECK(back.jlim_c == gt.jlim_c);
    CHECK(back.t_break == gt.t_break);
    CHECK(back.jlim_accel == gt.jlim_accel);
    CHECK(back.t_max == gt.t_max);
    CHECK(back.cadence == gt.cadence);
    CHECK(back.horizon == gt.horizon);
    CHECK(back.j_op == gt.j_op);
  }

  TEST_CASE("truth json is strict about its schema") {
    TempDir dir;
    const fs::path p = dir.path / "truth.json";
    write_truth_json(p, small_truth());

    SUBCASE("unknown key") {
      patch_file(p, "\"a0\"", "\"a0_typo\"");
      CHECK_THROWS_AS(read_truth_json(p), IoError);
    }
    SUBCASE("missing file") {
      CHECK_THROWS_AS(read_truth_json(dir.path / "nope.json"), IoError);
    }
    SUBCASE("syntax error") {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      out << "{ not json";
      out.close();
      CHECK_THROWS_AS(read_truth_json(p), IoError);
    }
  }
}
