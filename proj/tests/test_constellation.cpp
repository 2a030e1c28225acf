#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <set>

#include "core/constellation.hpp"
#include "core/errors.hpp"
#include "core/frame.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"

using namespace evs;

namespace {

// Independent decision: full scan, ties to the smaller index.
std::size_t brute_nearest(const Constellation& c, const cx& z) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const double d = std::norm(z - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double mean_energy(const Constellation& c) {
    double e = 0.0;
    for (const cx& p : c.points) e += std::norm(p);
    return e / static_cast<double>(c.points.size());
}

}  // namespace

TEST_CASE("BPSK and QPSK point sets") {
    const Constellation b = make_constellation(2);
    REQUIRE(b.points.size() == 2);
    CHECK(b.points[0] == cx(-1.0, 0.0));
    CHECK(b.points[1] == cx(1.0, 0.0));

    const Constellation q = make_constellation(4);
    REQUIRE(q.points.size() == 4);
    const double s = 1.0 / std::sqrt(2.0);
    std::set<std::pair<double, double>> got, want;
    for (const cx& p : q.points) got.insert({p.real(), p.imag()});
    for (double re : {-s, s})
        for (double im : {-s, s}) want.insert({re, im});
    CHECK(got == want);
}

TEST_CASE("16-QAM energy by enumeration") {
    const Constellation c = make_constellation(16);
    REQUIRE(c.points.size() == 16);
    // every point on the {+-1, +-3}^2 grid scaled by 1/sqrt(10)
    const double s = 1.0 / std::sqrt(10.0);
    for (const cx& p : c.points) {
        const double re = std::abs(p.real()) / s;
        const double im = std::abs(p.imag()) / s;
        CHECK((std::abs(re - 1.0) < 1e-12 || std::abs(re - 3.0) < 1e-12));
        CHECK((std::abs(im - 1.0) < 1e-12 || std::abs(im - 3.0) < 1e-12));
    }
    CHECK(mean_energy(c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all constellations: unit energy, distinct points") {
    for (int order : {2, 4, 16, 64}) {
        const Constellation c = make_constellation(order);
        CHECK(c.points.size() == static_cast<std::size_t>(order));
        CHECK(std::abs(mean_energy(c) - 1.0) <= 1e-12);
        double min_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < c.points.size(); ++i)
            for (std::size_t j = i + 1; j < c.points.size(); ++j)
                min_d = std::min(min_d, std::abs(c.points[i] - c.points[j]));
        CHECK(min_d > 0.0);
    }
}

TEST_CASE("unsupported order rejected") {
    CHECK_THROWS_AS(make_constellation(8), InvalidInput);
    CHECK_THROWS_AS(make_constellation(0), InvalidInput);
    CHECK_THROWS_AS(make_constellation(256), InvalidInput);
}

TEST_CASE("quantize agrees with a full nearest-point scan") {
    RngStream rng(99);
    for (int order : {2, 4, 16, 64}) {
        const Constellation c = make_constellation(order);
        for (int t = 0; t < 2000; ++t) {
            const cx z(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6));
            CHECK(c.quantize(z) == brute_nearest(c, z));
        }
    }
}

TEST_CASE("quantize resolves exact ties like the scan") {
    // BPSK: re == 0 is equidistant; the smaller canonical index (-1) wins.
    const Constellation b = make_constellation(2);
    CHECK(b.points[b.quantize(cx(0.0, 0.4))] == cx(-1.0, 0.0));

    // midpoints of every adjacent level pair, both axes
    for (int order : {4, 16, 64}) {
        const Constellation c = make_constellation(order);
        std::set<double> levels;
        for (const cx& p : c.points) levels.insert(p.real());
        std::vector<double> lv(levels.begin(), levels.end());
        for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
            const double mid = 0.5 * (lv[i] + lv[i + 1]);
            for (double other : {lv[0], mid, lv.back()}) {
                const cx z1(mid, other);
                const cx z2(other, mid);
                CHECK(c.quantize(z1) == brute_nearest(c, z1));
                CHECK(c.quantize(z2) == brute_nearest(c, z2));
            }
        }
    }
}

TEST_CASE("random payload respects alphabet, pilots and determinism") {
    const SubcarrierGrid grid = default_grid();
    const FrameLayout layout = default_layout();

    RngStream r1(1234), r2(1234);
    const CMat a = random_df_payload(layout, grid, 2, r1);
    const CMat b = random_df_payload(layout, grid, 2, r2);
    CHECK(a.v == b.v);  // same seed, identical matrices

    for (std::size_t k = 0; k < a.rows; ++k) {
        const int idx = grid.occupied[k];
        for (std::size_t n = 0; n < a.cols; ++n) {
            if (grid.is_pilot(idx)) continue;
            CHECK((a.at(k, n) == cx(1.0, 0.0) || a.at(k, n) == cx(-1.0, 0.0)));
        }
    }

    // pilot rows carry pilot_ref exactly, independent of order
    for (int order : {2, 4, 16, 64}) {
        RngStream r(55);
        const CMat m = random_df_payload(layout, grid, order, r);
        const Constellation c = make_constellation(order);
        for (std::size_t p = 0; p < grid.pilot_set.size(); ++p) {
            const std::size_t row = static_cast<std::size_t>(grid.row_of(grid.pilot_set[p]));
            for (std::size_t n = 0; n < m.cols; ++n)
                CHECK(m.at(row, n) == cx(layout.pilot_ref[p], 0.0));
        }
        // data cells are constellation points
        for (std::size_t k = 0; k < m.rows; ++k) {
            if (grid.is_pilot(grid.occupied[k])) continue;
            for (std::size_t n = 0; n < m.cols; ++n) {
                bool found = false;
                for (const cx& pt : c.points) found |= (m.at(k, n) == pt);
                CHECK(found);
            }
        }
    }
}
