#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "rng.hpp"

using revclt::RngStream;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known-answer vectors") {
  using B = RngStream::Block;
  CHECK(RngStream::philox(B{0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(RngStream::philox(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(RngStream::philox(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("identical seeds reproduce, distinct seeds diverge") {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 1000; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  CHECK(std::set<std::uint64_t>(va.begin(), va.end()).size() == va.size());
}

TEST_CASE("uniform ranges") {
  RngStream r(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = r.uniform();
    const double v = r.uniform_open();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
  // sd of the mean is sqrt(1/12 / kN) ~ 6.5e-4
  CHECK(sum / kN == doctest::Approx(0.5).epsilon(0.006));
}

TEST_CASE("seed accessors") {
  RngStream r(0xdeadbeefcafeULL, 99);
  CHECK(r.master_seed() == 0xdeadbeefcafeULL);
  CHECK(r.stream_index() == 99);
}

}
