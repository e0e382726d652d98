#include <catch_amalgamated.hpp>

#include <random>
#include <string>

#include "pgsd/fcidump.hpp"

using namespace pgsd;
using Catch::Approx;

namespace {
const std::string kFixtures = PGSD_FIXTURE_DIR;
}

TEST_CASE("two-electron record lands at the zero-based canonical index", "[fcidump]") {
  const auto d = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,/\n0.5 1 1 1 1\n");
  CHECK(d.norb() == 2);
  CHECK(d.nelec() == 2);
  CHECK(d.ms2() == 0);
  CHECK(d.g2(0, 0, 0, 0) == 0.5);
  CHECK(d.g2(1, 1, 1, 1) == 0.0);
}

TEST_CASE("all-zero indices set the core energy", "[fcidump]") {
  const auto d = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,/\n-1.0 0 0 0 0\n");
  CHECK(d.e_core() == -1.0);
}

TEST_CASE("one-electron record is stored symmetrically", "[fcidump]") {
  const auto d = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,/\n0.3 2 1 0 0\n");
  CHECK(d.h1(1, 0) == 0.3);
  CHECK(d.h1(0, 1) == 0.3);
}

TEST_CASE("&END terminator, multi-line header and commas", "[fcidump]") {
  const auto d = parse_fcidump(
      " &FCI NORB=  3,NELEC=2,\n  MS2=0,\n  ORBSYM=1,1,2,\n  ISYM=1,\n &END\n 0.25, 2, 1, 3, 3\n -2.5 3 3 0 0\n");
  CHECK(d.norb() == 3);
  CHECK(d.orbsym() == std::vector<int>{1, 1, 2});
  CHECK(d.g2(1, 0, 2, 2) == 0.25);
  CHECK(d.g2(2, 2, 0, 1) == 0.25);
  CHECK(d.h1(2, 2) == -2.5);
}

TEST_CASE("later duplicates overwrite earlier records", "[fcidump]") {
  const auto d = parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1,/\n0.1 1 1 0 0\n0.2 1 1 0 0\n");
  CHECK(d.h1(0, 0) == 0.2);
}

TEST_CASE("malformed input is rejected with a location", "[fcidump][errors]") {
  SECTION("missing NORB") {
    try {
      parse_fcidump("&FCI NELEC=2,MS2=0,/\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
    }
  }
  SECTION("missing NELEC") { CHECK_THROWS_AS(parse_fcidump("&FCI NORB=2,MS2=0,/\n"), ParseError); }
  SECTION("non-numeric value") {
    try {
      parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,/\n0.5 1 1 1 1\nabc 1 1 0 0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SECTION("index beyond NORB") {
    CHECK_THROWS_AS(parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,/\n0.5 3 1 1 1\n"), ValidationError);
  }
  SECTION("spin projection inconsistent with electron count") {
    CHECK_THROWS_AS(parse_fcidump("&FCI NORB=2,NELEC=2,MS2=1,/\n"), ValidationError);
  }
}

TEST_CASE("fixture round-trips through serialization exactly", "[fcidump]") {
  for (const char* f : {"/h2/h2_0.735.fcidump", "/h2o/h2o_0.958.fcidump", "/o2/o2_1.2075.fcidump"}) {
    const auto a = read_fcidump(kFixtures + f);
    const auto b = parse_fcidump(serialize_fcidump(a));
    CHECK(a.norb() == b.norb());
    CHECK(a.nelec() == b.nelec());
    CHECK(a.ms2() == b.ms2());
    CHECK(a.e_core() == b.e_core());
    CHECK(a.h1_packed() == b.h1_packed());
    CHECK(a.g2_packed() == b.g2_packed());
  }
}

TEST_CASE("all eight permutation images agree", "[fcidump]") {
  const auto d = read_fcidump(kFixtures + "/h2o/h2o_0.958.fcidump");
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> idx(0, d.norb() - 1);
  for (int t = 0; t < 200; ++t) {
    const int p = idx(rng), q = idx(rng), r = idx(rng), s = idx(rng);
    const double v = d.g2(p, q, r, s);
    CHECK(d.g2(q, p, r, s) == v);
    CHECK(d.g2(p, q, s, r) == v);
    CHECK(d.g2(q, p, s, r) == v);
    CHECK(d.g2(r, s, p, q) == v);
    CHECK(d.g2(s, r, p, q) == v);
    CHECK(d.g2(r, s, q, p) == v);
    CHECK(d.g2(s, r, q, p) == v);
    CHECK(d.h1(p, q) == d.h1(q, p));
  }
}

TEST_CASE("missing file is reported", "[fcidump][errors]") {
  CHECK_THROWS(read_fcidump(kFixtures + "/does_not_exist.fcidump"));
}
