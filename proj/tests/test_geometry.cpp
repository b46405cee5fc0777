#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "thickpoints/geometry.hpp"
#include "thickpoints/rng.hpp"

using namespace thickpoints;

TEST_CASE("grid partition on the unit square") {
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  SUBCASE("n=1 gives 4 half squares") {
    const auto p = grid_partition(D, 1);
    int squares = 0;
    for (const auto& c : p.cells)
      if (c.square) ++squares;
    CHECK(squares == 4);
    CHECK(p.cells.size() == 4);
    for (const auto& c : p.cells) CHECK(c.x1 - c.x0 == doctest::Approx(0.5));
  }
  SUBCASE("n=0 gives the whole square") {
    const auto p = grid_partition(D, 0);
    CHECK(p.cells.size() == 1);
    CHECK(p.cells[0].square);
    CHECK(p.cells[0].x0 == doctest::Approx(0.0));
    CHECK(p.cells[0].x1 == doctest::Approx(1.0));
  }
  SUBCASE("area conservation, several levels") {
    for (int n : {1, 2, 3, 5}) {
      const auto p = grid_partition(D, n);
      double area = 0.0;
      for (const auto& c : p.cells) area += (c.x1 - c.x0) * (c.y1 - c.y0);
      CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("resource guard") {
    CHECK_THROWS_AS(grid_partition(D, 20), ConfigError);
  }
}

TEST_CASE("grid partition on the unit disk") {
  const auto D = NiceDomain::unit_disk();
  const auto p = grid_partition(D, 2);
  const auto c = cell_of(p, Point(0.1, 0.1));
  REQUIRE(c.has_value());
  CHECK(c->x0 == doctest::Approx(0.0));
  CHECK(c->y0 == doctest::Approx(0.0));
  CHECK(c->x1 == doctest::Approx(0.25));
  CHECK(c->y1 == doctest::Approx(0.25));
  CHECK(c->square);

  // area conservation within quadrature tolerance
  double area = 0.0;
  for (const auto& cc : p.cells)
    area += clipped_cell_area(D, cc.x0, cc.y0, cc.x1, cc.y1);
  CHECK(area == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("cell_of") {
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  SUBCASE("interior point at n=1") {
    const auto c = cell_of(grid_partition(D, 1), Point(0.3, 0.3));
    REQUIRE(c.has_value());
    CHECK(c->x0 == doctest::Approx(0.0));
    CHECK(c->x1 == doctest::Approx(0.5));
  }
  SUBCASE("grid line gives none") {
    CHECK(!cell_of(grid_partition(D, 1), Point(0.5, 0.3)).has_value());
  }
  SUBCASE("n=0 whole square") {
    const auto c = cell_of(grid_partition(D, 0), Point(0.3, 0.3));
    REQUIRE(c.has_value());
    CHECK(c->x1 - c->x0 == doctest::Approx(1.0));
  }
}

TEST_CASE("refinement nesting") {
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point offset(0.001220703125, 0.0006103515625);  // multiples of 2^-14
  const auto pn = grid_partition(D, 2, offset);
  const auto pf = grid_partition(D, 3, offset);
  for (const auto& f : pf.cells) {
    int owners = 0;
    for (const auto& c : pn.cells) {
      if (f.x0 >= c.x0 - 1e-12 && f.x1 <= c.x1 + 1e-12 &&
          f.y0 >= c.y0 - 1e-12 && f.y1 <= c.y1 + 1e-12)
        ++owners;
    }
    CHECK(owners == 1);
  }
}

TEST_CASE("is_suitable") {
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.123456, 0.54321), zp(0.87654, 0.23456);
  CHECK(!is_suitable(Point(0.25, 0.1), D, z, zp, 2));
  CHECK(is_suitable(Point(1.0 / 3, 1.0 / 3), D, z, zp, 12));
  CHECK(!is_suitable(z, D, z, zp, 3));
}

TEST_CASE("mobius maps") {
  SUBCASE("identity at the origin") {
    const auto m = mobius_to_origin(NiceDomain::unit_disk(), Point(0, 0));
    CHECK(std::abs(m.map(Point(0.3, 0.4)) - Point(0.3, 0.4)) < 1e-15);
  }
  SUBCASE("sends a to 0 with the closed-form derivative") {
    const auto m = mobius_to_origin(NiceDomain::unit_disk(), Point(0.5, 0.0));
    CHECK(std::abs(m.map(Point(0.5, 0.0))) < 1e-15);
    CHECK(std::abs(m.derivative(Point(0.5, 0.0))) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("round trip on 1e4 random points") {
    Rng rng(11);
    const MobiusMap m(Point(0.31, -0.22), std::polar(1.0, 0.7));
    for (int i = 0; i < 10000; ++i) {
      const double r = std::sqrt(rng.uniform());
      const double th = kTwoPi * rng.uniform();
      const Point w = std::polar(r * 0.999, th);
      CHECK(std::abs(m.inverse(m.map(w)) - w) < 1e-12);
      CHECK(std::abs(m.inverted().map(m.map(w)) - w) < 1e-12);
    }
  }
  SUBCASE("boundary errors") {
    CHECK_THROWS(mobius_to_origin(NiceDomain::unit_disk(), Point(1.0, 0.0)));
  }
}

TEST_CASE("junction boundary classification") {
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const auto D1 = NiceDomain::rect(0, 0, 0.5, 1);
  CHECK(junction_boundary(D, D1, Point(0.0, 0.5)));
  CHECK(!junction_boundary(D, D1, Point(0.5, 0.0)));
  CHECK_THROWS_AS(junction_boundary(D, D1, Point(0.5, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("domain json round trip") {
  for (const auto& d :
       {NiceDomain::unit_disk(), NiceDomain::disk(Point(0.2, -0.1), 0.7),
        NiceDomain::rect(-1, 0, 2, 3),
        NiceDomain::mobius_image(
            NiceDomain::unit_disk(),
            MobiusMap(Point(0.3, 0.1), std::polar(1.0, 0.4)))}) {
    const auto back = NiceDomain::from_json(d.to_json());
    CHECK(back.kind() == d.kind());
    CHECK(back.to_json() == d.to_json());
  }
}

TEST_CASE("segment boundary hit") {
  const auto D = NiceDomain::unit_disk();
  const auto hit = D.segment_boundary_hit(Point(0, 0), Point(2, 0));
  REQUIRE(hit.has_value());
  CHECK(hit->first == doctest::Approx(0.5));
  CHECK(hit->second.real() == doctest::Approx(1.0));

  const auto R = NiceDomain::rect(0, 0, 1, 1);
  const auto hr = R.segment_boundary_hit(Point(0.5, 0.5), Point(1.5, 0.5));
  REQUIRE(hr.has_value());
  CHECK(hr->second.real() == doctest::Approx(1.0));
  CHECK(!R.segment_boundary_hit(Point(0.4, 0.4), Point(0.6, 0.6)).has_value());
}
