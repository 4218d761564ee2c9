#include <doctest.h>

#include <numbers>
#include <random>

#include "helivort/diagnostics.hpp"
#include "helivort/error.hpp"
#include "helivort/kernel.hpp"
#include "helivort/sim.hpp"

using namespace helivort;
using doctest::Approx;

namespace {

const HelixParams unit_pitch{1.0};

ParticleSystem fresh_blob(double eps, int particles, Point2 center = {1.0, 0.0}, double gamma = 1.0) {
    SimConfig cfg;
    cfg.blobs = {{center, eps, gamma, particles}};
    return sim::init_blobs(sim::resolve(cfg));
}

ParticleSystem random_system(int n, std::uint64_t seed) {
    ParticleSystem sys(unit_pitch, DiskDomain{2.0}, 0.01, 0.01);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < n; ++k) sys.add({u(rng), u(rng)}, 0.5 + 0.5 * u(rng), 0);
    return sys;
}

}  // namespace

TEST_CASE("centre of mass") {
    ParticleSystem sys(unit_pitch, DiskDomain{2.0}, 0.01, 0.01);
    sys.add({0.8, 0.6}, 2.0, 0);
    CHECK(diagnostics::center_of_mass(sys, 0) == Point2{0.8, 0.6});
    sys.add({0.2, -0.6}, 2.0, 0);
    CHECK(diagnostics::center_of_mass(sys, 0).x == Approx(0.5));
    CHECK(diagnostics::center_of_mass(sys, 0).y == Approx(0.0).scale(1.0));

    const ParticleSystem blob = fresh_blob(0.05, 2000, {-0.4, 0.9});
    CHECK(norm(diagnostics::center_of_mass(blob, 0) - Point2{-0.4, 0.9}) <= 1e-12);
}

TEST_CASE("inertia and radial moments") {
    ParticleSystem one(unit_pitch, DiskDomain{2.0}, 0.01, 0.01);
    one.add({0.8, 0.6}, 2.0, 0);
    CHECK(diagnostics::inertia(one, 0) == 0.0);
    CHECK(diagnostics::radial_moment(one, 0, 1) == Approx(2.0).epsilon(1e-15));
    CHECK(diagnostics::radial_moment(one, 0, 2) == Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(diagnostics::radial_moment(one, 0, 0), DomainError);

    const double eps = 0.05;
    const ParticleSystem blob = fresh_blob(eps, 2000);
    CHECK(diagnostics::inertia(blob, 0) == Approx(0.5 * eps * eps).epsilon(0.01));
    CHECK(diagnostics::radial_moment(blob, 0, 2) == Approx(1.0 + 0.5 * eps * eps).epsilon(0.01));

    SUBCASE("parallel-axis identity I = J2 - gamma |b|^2") {
        const ParticleSystem sys = random_system(100, 9);
        double gamma = 0.0;
        for (double w : sys.weights) gamma += w;
        const Point2 b = diagnostics::center_of_mass(sys, 0);
        CHECK(diagnostics::inertia(sys, 0) ==
              Approx(diagnostics::radial_moment(sys, 0, 2) - gamma * norm2(b)).epsilon(1e-12));
    }
    SUBCASE("doubling every weight doubles the moments") {
        const ParticleSystem sys = random_system(30, 2);
        ParticleSystem twice = sys;
        for (double &w : twice.weights) w *= 2.0;
        CHECK(diagnostics::inertia(twice, 0) == Approx(2.0 * diagnostics::inertia(sys, 0)).epsilon(1e-14));
        CHECK(diagnostics::radial_moment(twice, 0, 1) ==
              Approx(2.0 * diagnostics::radial_moment(sys, 0, 1)).epsilon(1e-14));
    }
    SUBCASE("rotation leaves the scalar functionals fixed and turns the centre") {
        const ParticleSystem sys = random_system(50, 4);
        ParticleSystem turned = sys;
        for (Point2 &p : turned.positions) p = rotate(p, 1.1);
        CHECK(diagnostics::inertia(turned, 0) == Approx(diagnostics::inertia(sys, 0)).epsilon(1e-12));
        CHECK(diagnostics::radial_moment(turned, 0, 2) == Approx(diagnostics::radial_moment(sys, 0, 2)).epsilon(1e-12));
        CHECK(diagnostics::energy(turned) == Approx(diagnostics::energy(sys)).epsilon(1e-12));
        CHECK(norm(diagnostics::center_of_mass(turned, 0) - rotate(diagnostics::center_of_mass(sys, 0), 1.1)) <= 1e-13);
    }
}

TEST_CASE("energy") {
    SUBCASE("two particles give -2 G_K with the regularized log") {
        ParticleSystem sys(unit_pitch, DiskDomain{2.0}, 0.01, 0.03);
        sys.add({0.7, 0.1}, 1.0, 0);
        sys.add({-0.2, 0.5}, 1.0, 0);
        const double g = flow::regularized_green(sys.positions[0], sys.positions[1], unit_pitch, 0.03);
        CHECK(diagnostics::energy(sys) == Approx(-2.0 * g).epsilon(1e-13));
    }
    SUBCASE("symmetric in the particles and blind to blob labels") {
        const ParticleSystem sys = random_system(40, 5);
        ParticleSystem shuffled(unit_pitch, DiskDomain{2.0}, 0.01, 0.01);
        for (std::size_t k = sys.size(); k-- > 0;) shuffled.add(sys.positions[k], sys.weights[k], static_cast<int>(k % 3));
        CHECK(diagnostics::energy(shuffled) == Approx(diagnostics::energy(sys)).epsilon(1e-12));
    }
    SUBCASE("the record energy equals the pair energy") {
        const ParticleSystem sys = fresh_blob(0.05, 300);
        const auto rec = diagnostics::record(sys, 0.0, {{{1.0, 0.0}, 0.05, 1.0, 300}}, 0.25);
        CHECK(rec.energy == Approx(diagnostics::energy(sys)).epsilon(1e-10));
    }
    SUBCASE("a single blob grows like H(z,z) |ln eps| gamma^2") {
        std::vector<double> e;
        const std::vector<double> eps{0.05, 0.02, 0.01};
        for (double ep : eps) e.push_back(diagnostics::energy(fresh_blob(ep, 1000)));
        const double slope = (e[2] - e[0]) / (std::log(eps[0]) - std::log(eps[2]));
        MESSAGE("energy slope " << slope);
        CHECK(slope == Approx(std::sqrt(2.0) / (2.0 * std::numbers::pi)).epsilon(0.01));
    }
    SUBCASE("grid energy equals the free-space energy minus the regular-part self interaction") {
        const double eps = 0.1;
        const ParticleSystem sys = fresh_blob(eps, 2000, {0.5, 0.0});
        const GridBackend grid(unit_pitch, sys.domain, 257);
        const double e_grid = diagnostics::energy_grid(sys, grid);
        const double e_free = diagnostics::energy(sys);
        const double s_zz = interpolate(regular_part_probe({0.5, 0.0}, grid.system()), {0.5, 0.0});
        MESSAGE("E_grid " << e_grid << " E_free " << e_free << " S(z,z) " << s_zz);
        // The blob is not a point: the correction varies by O(eps^2) across it.
        CHECK(e_grid == Approx(e_free - s_zz).epsilon(0.02));
    }
}

TEST_CASE("local energy is the regularized stream") {
    ParticleSystem sys(unit_pitch, DiskDomain{2.0}, 0.01, 0.02);
    sys.add({0.4, 0.4}, 1.5, 0);
    const std::vector<Point2> pts{{1.0, 0.0}, {0.4, 0.4}};
    const auto psi = diagnostics::local_energy(sys, pts);
    CHECK(psi[0] == Approx(1.5 * flow::regularized_green(pts[0], sys.positions[0], unit_pitch, 0.02)).epsilon(1e-14));
    CHECK(psi[1] < 0.0);
}

TEST_CASE("mass outside a disk") {
    const double eps = 0.05;
    const ParticleSystem blob = fresh_blob(eps, 2000, {1.0, 0.0}, 1.5);
    CHECK(diagnostics::mass_outside(blob, 0, {1.0, 0.0}, eps) == 0.0);
    CHECK(diagnostics::mass_outside(blob, 0, {1.0, 0.0}, 1e-9) == Approx(1.5).epsilon(1e-12));
    double previous = 2.0;
    for (double r : {0.001, 0.01, 0.02, 0.03, 0.04, 0.05}) {
        const double m = diagnostics::mass_outside(blob, 0, {1.0, 0.0}, r);
        CHECK(m <= previous);
        previous = m;
    }
    // Uniform disk: fraction outside r is 1 - r^2/eps^2 up to the sampling.
    CHECK(diagnostics::mass_outside(blob, 0, {1.0, 0.0}, 0.5 * eps) == Approx(1.5 * 0.75).epsilon(0.01));
    CHECK_THROWS_AS(diagnostics::mass_outside(blob, 0, {1.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("radial deviation") {
    const ParticleSystem blob = fresh_blob(0.05, 500);
    const double r = diagnostics::max_radial_deviation(blob, 0, 1.0);
    CHECK(r <= 0.05);
    CHECK(r >= 0.045);
    ParticleSystem wider = blob;
    wider.add({1.2, 0.0}, 0.001, 0);
    CHECK(diagnostics::max_radial_deviation(wider, 0, 1.0) == Approx(0.2));
}

TEST_CASE("localization radius") {
    CHECK(diagnostics::localization_radius(0.01) == Approx(std::sqrt(std::log(std::log(100.0)) / std::log(100.0))).epsilon(1e-15));
    CHECK(diagnostics::localization_radius(0.01) == Approx(0.5758).epsilon(1e-4));
    CHECK(diagnostics::localization_radius(1e-3) < diagnostics::localization_radius(1e-2));
    CHECK_THROWS_AS(diagnostics::localization_radius(0.5), DomainError);
}

TEST_CASE("rearrangement bound") {
    CHECK(diagnostics::rearrangement_bound(1.0 / std::numbers::pi, 1.0) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(diagnostics::rearrangement_bound(0.1, 1.0), DomainError);
    CHECK_THROWS_AS(diagnostics::rearrangement_bound(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(diagnostics::rearrangement_bound(1.0, 0.0), DomainError);

    SUBCASE("M = M0 / eps^2 grows like gamma |ln eps| + O(1)") {
        const double m0 = 3.0;
        const double gamma = 0.7;
        const auto excess = [&](double eps) {
            return diagnostics::rearrangement_bound(m0 / (eps * eps), gamma) - gamma * std::abs(std::log(eps));
        };
        CHECK(excess(1e-3) == Approx(excess(1e-4)).epsilon(1e-12));
    }

    SUBCASE("no admissible density beats the disk") {
        // Densities on a cell grid, evaluated at a cell corner so no midpoint sits on the singularity.
        const double a = 0.01;
        const int n = 80;
        const double cap = 40.0;
        const double gamma = 1.0;
        const double bound = diagnostics::rearrangement_bound(cap, gamma);
        const Point2 x{0.0, 0.0};
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto cell = [&](int i, int j) { return Point2{(i - n / 2 + 0.5) * a, (j - n / 2 + 0.5) * a}; };
        double best = -1e300;
        for (int trial = 0; trial < 50; ++trial) {
            // Trial 0 is the extremal disk itself; the rest blend a noisy disk with a random profile.
            const double focus = trial == 0 ? 1.0 : u(rng);
            std::vector<double> f(static_cast<std::size_t>(n * n));
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double r = norm(cell(i, j) - x);
                    const bool inside = r < std::sqrt(gamma / (std::numbers::pi * cap));
                    const double disk = inside ? 1.0 : (trial == 0 ? 0.0 : 0.2 * u(rng));
                    f[i * n + j] = cap * (focus * disk + (1.0 - focus) * u(rng));
                }
            }
            // Scale to total mass gamma, then clip at the cap and redistribute until the mass fits.
            for (int pass = 0; pass < 100; ++pass) {
                double mass = 0.0;
                for (double v : f) mass += v * a * a;
                if (std::abs(mass - gamma) <= 1e-12 * gamma) break;
                for (double &v : f) v = std::min(cap, v * gamma / mass);
            }
            double value = 0.0;
            double mass = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double v = f[i * n + j];
                    CHECK(v <= cap * (1.0 + 1e-12));
                    value -= v * a * a * std::log(norm(cell(i, j) - x));
                    mass += v * a * a;
                }
            }
            CHECK(mass == Approx(gamma).epsilon(1e-9));
            best = std::max(best, value);
            // Midpoint-rule slack for the four cells touching x.
            CHECK(value <= bound + 4.0 * cap * a * a);
        }
        MESSAGE("largest discrete value " << best << " against the bound " << bound);
    }
}

TEST_CASE("support half width") {
    const std::vector<BlobSpec> one{{{1.0, 0.0}, 0.01, 1.0, 1}};
    CHECK(diagnostics::support_half_width(one, 2.0) == Approx(0.25));
    const std::vector<BlobSpec> two{{{1.0, 0.0}, 0.01, 1.0, 1}, {{-0.5, 0.0}, 0.01, 1.0, 1}};
    CHECK(diagnostics::support_half_width(two, 2.0) == Approx(0.125));
    CHECK(Annulus{1.0, 0.1}.contains({1.05, 0.0}));
    CHECK_FALSE(Annulus{1.0, 0.1}.contains({0.0, 1.1}));
}

TEST_CASE("record") {
    const std::vector<BlobSpec> specs{{{1.0, 0.0}, 0.05, 1.0, 200}};
    const ParticleSystem sys = fresh_blob(0.05, 200);
    const auto rec = diagnostics::record(sys, 0.25, specs, 0.25);
    CHECK(rec.t == 0.25);
    REQUIRE(rec.blobs.size() == 1);
    CHECK(rec.support_ok);
    CHECK(rec.blobs[0].mass_outside == 0.0);
    CHECK(rec.blobs[0].psi_variance >= 0.0);
    CHECK(norm(rec.blobs[0].center - Point2{1.0, 0.0}) <= 1e-12);
    const auto tight = diagnostics::record(sys, 0.0, specs, 0.01);
    CHECK_FALSE(tight.support_ok);
}

TEST_CASE("csv round trip") {
    DiagnosticsRecord r;
    r.t = 0.125;
    r.energy = -1.0 / 3.0;
    r.support_ok = false;
    r.blobs = {{{0.1, std::numbers::pi}, 1e-7, 0.3, 0.9, 0.01, 0.0, 1e-20},
               {{-0.5, 0.25}, 2e-5, 0.7, 0.4, 0.02, 0.1, 3.0}};
    const std::string row = diagnostics::csv_row(r);
    const DiagnosticsRecord back = diagnostics::parse_csv_row(row, 2);
    CHECK(diagnostics::csv_row(back) == row);
    CHECK(back.blobs[0].center.y == std::numbers::pi);
    CHECK(back.energy == -1.0 / 3.0);
    CHECK_FALSE(back.support_ok);
    CHECK(diagnostics::csv_header(1) == "t,b_x_0,b_y_0,I_0,J1_0,J2_0,R_t_0,mass_out_0,E,support_ok,psi_var_0");
    CHECK_THROWS_AS(diagnostics::parse_csv_row("1,2,3", 2), ConfigError);
    CHECK_THROWS_AS(diagnostics::parse_csv_row(row, 1), ConfigError);
}

TEST_CASE("fitted angular velocity and theory comparison") {
    const std::vector<BlobSpec> specs{{{1.0, 0.0}, 0.05, 1.0, 1}};
    const double nu = angular_frequency(specs[0], unit_pitch);

    SUBCASE("an exact helix orbit is recovered and passes") {
        std::vector<DiagnosticsRecord> series;
        for (int k = 0; k <= 40; ++k) {
            DiagnosticsRecord r;
            r.t = 0.5 * k;
            BlobDiagnostics d;
            d.center = leading_order(specs[0], unit_pitch, r.t);
            d.inertia = 1e-3;
            d.j2 = 1.0;
            r.blobs = {d};
            series.push_back(r);
        }
        CHECK(diagnostics::fitted_angular_velocity(series, 0) == Approx(nu).epsilon(1e-12));
        const auto rep = diagnostics::theory_compare(series, specs, unit_pitch);
        CHECK(rep.pass);
        CHECK(rep.blobs[0].nu_relative_error == Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(rep.blobs[0].max_center_error <= 1e-12);
        CHECK(rep.blobs[0].drift_law_residual <= 1e-3);
        CHECK(rep.summary().find("pass=1") != std::string::npos);
    }
    SUBCASE("the angle unwraps across the branch cut") {
        std::vector<DiagnosticsRecord> series;
        for (int k = 0; k <= 100; ++k) {
            DiagnosticsRecord r;
            r.t = 0.1 * k;
            BlobDiagnostics d;
            d.center = rotate(Point2{0.5, 0.0}, 3.0 * r.t);
            r.blobs = {d};
            series.push_back(r);
        }
        CHECK(diagnostics::fitted_angular_velocity(series, 0) == Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("a run of length zero compares without dividing by zero") {
        SimConfig cfg;
        cfg.blobs = specs;
        cfg.blobs[0].particles = 50;
        cfg.t_final = 0.0;
        const auto res = sim::run(cfg);
        const auto rep = diagnostics::theory_compare(res.records, res.config.blobs, unit_pitch);
        CHECK(rep.blobs[0].max_center_error <= 1e-12);
        CHECK(rep.blobs[0].max_j2_drift == 0.0);
        CHECK_FALSE(rep.table().empty());
    }
    SUBCASE("a stationary blob fails the frequency check") {
        std::vector<DiagnosticsRecord> series;
        for (int k = 0; k <= 10; ++k) {
            DiagnosticsRecord r;
            r.t = k;
            BlobDiagnostics d;
            d.center = {1.0, 0.0};
            r.blobs = {d};
            series.push_back(r);
        }
        const auto rep = diagnostics::theory_compare(series, specs, unit_pitch);
        CHECK_FALSE(rep.pass);
        CHECK(rep.blobs[0].nu_relative_error == Approx(1.0));
    }
}
