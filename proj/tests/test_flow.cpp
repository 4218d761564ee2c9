#include <doctest.h>

#include <numbers>
#include <random>

#include "helivort/error.hpp"
#include "helivort/flow.hpp"
#include "helivort/kernel.hpp"
#include "helivort/sim.hpp"
#include "oracles.hpp"

using namespace helivort;
using doctest::Approx;

namespace {

const HelixParams unit_pitch{1.0};

ParticleSystem make_system(double delta, double radius = 2.0) {
    return ParticleSystem(unit_pitch, DiskDomain{radius}, 0.01, delta);
}

ParticleSystem random_system(int n, double delta, std::uint64_t seed) {
    ParticleSystem sys = make_system(delta);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < n; ++k) sys.add({u(rng), u(rng)}, u(rng), k % 2);
    return sys;
}

// Term-by-term regularized gradient built from the kernel module, no pair sums.
Vec2 reference_velocity(const ParticleSystem &sys, const Point2 &x) {
    const HelixParams &p = sys.params;
    Vec2 v;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const Point2 &y = sys.positions[j];
        const Vec2 d = kernel::diffeo(x, p) - kernel::diffeo(y, p);
        const double q = norm2(d) + sys.delta * sys.delta;
        const Vec2 grad = 0.5 * std::log(q) * kernel::grad_h_weight(x, y, p) +
                          (kernel::h_weight(x, y, p) / q) * (kernel::diffeo_jacobian(x, p) * d);
        v += sys.weights[j] * perp(grad);
    }
    return v;
}

double max_diff(const std::vector<Vec2> &a, const std::vector<Vec2> &b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, norm(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("single particle at its own position moves tangentially through the self log term") {
    ParticleSystem sys = make_system(0.01);
    sys.add({1.0, 0.0}, 1.0, 0);
    const auto v = flow::velocity_direct(sys);
    // v = x^perp/(2|X|^2) * H(x,x) ln(delta), H(x,x) = sqrt(2)/(2 pi).
    CHECK(v[0].x == Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(v[0].y == Approx(-0.25913186607033333924).epsilon(1e-13));
    const std::vector<Point2> at{{1.0, 0.0}};
    const auto w = flow::velocity_direct(sys, at);
    CHECK(w[0].x == Approx(v[0].x).scale(1.0).epsilon(1e-15));
    CHECK(w[0].y == Approx(v[0].y).epsilon(1e-14));
}

TEST_CASE("direct velocity matches a term-by-term reference and the curl of the regularized stream") {
    const ParticleSystem sys = random_system(37, 0.05, 7);
    std::vector<Point2> pts{{0.3, -0.2}, {-0.7, 0.9}, {1.2, 0.1}, sys.positions[3]};
    const auto v = flow::velocity_direct(sys, pts);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Vec2 ref = reference_velocity(sys, pts[k]);
        CHECK(norm(v[k] - ref) <= 1e-12 * (1.0 + norm(ref)));

        const auto psi = [&](Vec2 x) {
            double acc = 0.0;
            for (std::size_t j = 0; j < sys.size(); ++j) {
                acc += sys.weights[j] * flow::regularized_green(x, sys.positions[j], sys.params, sys.delta);
            }
            return acc;
        };
        const Vec2 fd = perp(test::fd_gradient(psi, pts[k], 1e-5));
        CHECK(norm(v[k] - fd) <= 1e-6 * (1.0 + norm(fd)));
    }

    const auto self = flow::velocity_direct(sys);
    const auto general = flow::velocity_direct(sys, sys.positions);
    CHECK(max_diff(self, general) <= 1e-11);
}

TEST_CASE("two equal particles symmetric about the origin have opposite velocities") {
    ParticleSystem sys = make_system(0.02);
    sys.add({0.6, 0.3}, 1.0, 0);
    sys.add({-0.6, -0.3}, 1.0, 0);
    const auto v = flow::velocity_direct(sys);
    CHECK(v[1].x == Approx(-v[0].x).epsilon(1e-13));
    CHECK(v[1].y == Approx(-v[0].y).epsilon(1e-13));
}

TEST_CASE("regularized velocity approaches the singular kernel like delta^2") {
    const Point2 x{0.9, 0.2};
    const Point2 y{0.1, -0.5};
    const Vec2 exact = kernel::grad_perp_green_free(x, y, unit_pitch);
    std::vector<double> err;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        ParticleSystem sys = make_system(delta);
        sys.add(y, 1.0, 0);
        err.push_back(norm(flow::velocity_direct(sys, std::vector<Point2>{x})[0] - exact));
    }
    MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2]);
    CHECK(err[0] / err[1] == Approx(100.0).epsilon(0.01));
    CHECK(err[1] / err[2] == Approx(100.0).epsilon(0.05));
}

TEST_CASE("rotating every particle and evaluation point rotates the velocity") {
    const ParticleSystem sys = random_system(25, 0.03, 11);
    ParticleSystem turned = sys;
    const double theta = 0.7;
    for (Point2 &p : turned.positions) p = rotate(p, theta);
    const auto v = flow::velocity_direct(sys);
    const auto w = flow::velocity_direct(turned);
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(norm(rotate(v[k], theta) - w[k]) <= 1e-12 * (1.0 + norm(v[k])));
}

TEST_CASE("velocity_split") {
    SUBCASE("v_L at (1,0) with psi = -1") {
        ParticleSystem sys = make_system(0.01);
        sys.add({0.5, 0.5}, 1.0, 0);
        const std::vector<Point2> pts{{1.0, 0.0}};
        const std::vector<double> psi{-1.0};
        const auto s = flow::velocity_split(sys, pts, psi);
        CHECK(s.v_l[0].x == Approx(0.0).scale(1.0));
        CHECK(s.v_l[0].y == Approx(-0.25).epsilon(1e-15));
        CHECK_FALSE(s.v_r_available);
        CHECK(s.v_r[0] == Vec2{});
    }
    SUBCASE("v_K + v_L reproduces the direct velocity and v_L is tangential") {
        const ParticleSystem sys = random_system(31, 0.02, 5);
        const std::vector<Point2> pts{{0.2, 0.4}, {-1.1, 0.3}, sys.positions[0]};
        const auto psi = flow::stream_direct(sys, pts);
        const auto s = flow::velocity_split(sys, pts, psi);
        const auto v = flow::velocity_direct(sys, pts);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            CHECK(norm(s.v_k[k] + s.v_l[k] - v[k]) <= 1e-12 * (1.0 + norm(v[k])));
            CHECK(dot(s.v_l[k], pts[k]) == Approx(0.0).scale(1.0).epsilon(1e-14));
        }
    }
    SUBCASE("grid backend fills v_R") {
        SimConfig cfg;
        cfg.blobs = {{{1.0, 0.0}, 0.1, 1.0, 200}};
        cfg = sim::resolve(cfg);
        const ParticleSystem sys = sim::init_blobs(cfg);
        const GridBackend grid(sys.params, sys.domain, 129);
        const std::vector<Point2> pts{{1.0, 0.3}, {0.2, -0.4}};
        const auto s = flow::velocity_split(sys, pts, flow::stream_direct(sys, pts), &grid);
        CHECK(s.v_r_available);
        const auto total = grid.velocity(sys, pts);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            CHECK(norm(s.v_k[k] + s.v_l[k] + s.v_r[k] - total[k]) <= 1e-12);
            // The regular part is an O(1) correction to an O(1) field, not a blow-up.
            CHECK(norm(s.v_r[k]) < 0.5);
        }
    }
    SUBCASE("length mismatch is rejected") {
        const ParticleSystem sys = random_system(3, 0.02, 1);
        const std::vector<Point2> pts{{0.1, 0.1}};
        CHECK_THROWS_AS(flow::velocity_split(sys, pts, std::vector<double>{}), ConfigError);
    }
}

TEST_CASE("exterior and own-blob fields partition the direct velocity") {
    const ParticleSystem sys = random_system(40, 0.02, 3);
    const std::vector<Point2> pts{{0.1, 0.2}, {-0.5, 0.7}, sys.positions[4]};
    const auto v = flow::velocity_direct(sys, pts);
    const auto ext = flow::exterior_field(sys, 1, pts);
    const auto own = flow::own_blob_field(sys, 1, pts);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(norm(ext[k] + own[k] - v[k]) <= 1e-13 * (1.0 + norm(v[k])));

    ParticleSystem single = make_system(0.02);
    single.add({0.3, 0.3}, 1.0, 0);
    single.add({0.35, 0.3}, 1.0, 0);
    for (const Vec2 &f : flow::exterior_field(single, 0, pts)) CHECK(f == Vec2{});
    CHECK_THROWS_AS(flow::exterior_field(single, 1, pts), ConfigError);
}

TEST_CASE("exterior field on a blob stays bounded as eps decreases") {
    std::vector<double> peaks;
    for (double eps : {0.05, 0.02, 0.01}) {
        SimConfig cfg;
        cfg.blobs = {{{1.0, 0.0}, eps, 1.0, 400}, {{-0.5, 0.0}, eps, 1.0, 400}};
        cfg = sim::resolve(cfg);
        const ParticleSystem sys = sim::init_blobs(cfg);
        std::vector<Point2> own;
        for (std::size_t k = 0; k < sys.size(); ++k) {
            if (sys.blob_id[k] == 0) own.push_back(sys.positions[k]);
        }
        double peak = 0.0;
        for (const Vec2 &f : flow::exterior_field(sys, 0, own)) peak = std::max(peak, norm(f));
        peaks.push_back(peak);
    }
    MESSAGE("max |F_1| " << peaks[0] << " " << peaks[1] << " " << peaks[2]);
    for (double p : peaks) CHECK(p < 1.0);
    CHECK(peaks[2] <= 1.05 * peaks[0]);
}

TEST_CASE("rescaled_velocity divides by |ln eps|") {
    const std::vector<Vec2> v{{1.0, -2.0}};
    CHECK(flow::rescaled_velocity(v, std::exp(-1.0))[0].y == Approx(-2.0).epsilon(1e-15));
    CHECK(flow::rescaled_velocity(v, std::exp(-10.0))[0].x == Approx(0.1).epsilon(1e-15));
    CHECK(flow::rescaled_velocity(v, 0.01)[0].x == Approx(0.21714724095162588).epsilon(1e-15));
    CHECK_THROWS_AS(flow::rescaled_velocity(v, 1.0), DomainError);
    CHECK_THROWS_AS(flow::rescaled_velocity(v, 2.0), DomainError);
    CHECK_THROWS_AS(flow::rescaled_velocity(v, 0.0), DomainError);
}

TEST_CASE("backend names") {
    CHECK(parse_backend("direct") == Backend::direct);
    CHECK(parse_backend("grid") == Backend::grid);
    CHECK(to_string(Backend::grid) == "grid");
    CHECK_THROWS_AS(parse_backend("fmm"), ConfigError);
}
