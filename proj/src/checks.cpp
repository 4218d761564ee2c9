#include "helivort/checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "helivort/domain_solver.hpp"
#include "helivort/error.hpp"
#include "helivort/format.hpp"
#include "helivort/kernel.hpp"

namespace helivort::checks {

namespace {

CheckResult at_most(std::string name, double measured, double limit, std::string note = {}) {
    return {std::move(name), measured, limit, std::isfinite(measured) && measured <= limit, std::move(note)};
}

CheckResult at_least(std::string name, double measured, double limit, std::string note = {}) {
    return {std::move(name), measured, limit, std::isfinite(measured) && measured >= limit, std::move(note)};
}

double max_entry_diff(const SymMat2 &a, const SymMat2 &b) {
    return std::max({std::abs(a.a11 - b.a11), std::abs(a.a12 - b.a12), std::abs(a.a22 - b.a22)});
}

/// Largest relative entry error of `jac` against central differences of `map`.
template <class Map>
double fd_jacobian_error(const Map &map, const Point2 &x, const SymMat2 &jac) {
    const double e = 1e-5 * std::max(1.0, norm(x));
    const Vec2 cx = (1.0 / (2.0 * e)) * (map(x + Vec2{e, 0.0}) - map(x - Vec2{e, 0.0}));
    const Vec2 cy = (1.0 / (2.0 * e)) * (map(x + Vec2{0.0, e}) - map(x - Vec2{0.0, e}));
    const double scale = std::max({std::abs(jac.a11), std::abs(jac.a12), std::abs(jac.a22)});
    const double err = std::max({std::abs(cx.x - jac.a11), std::abs(cy.x - jac.a12), std::abs(cx.y - jac.a12),
                                 std::abs(cy.y - jac.a22)});
    return err / scale;
}

std::string pitch_label(const std::string &what, double h) {
    std::ostringstream os;
    os << what << " h=" << h;
    return os.str();
}

double psi_star(const Point2 &x, double radius) {
    const double d = radius * radius - norm2(x);
    return d * d;
}

/// div(K grad psi_star): K x = (h^2/|X|^2) x turns the flux into phi(s) x
/// with phi(s) = -4h^2 (R^2 - s)/(s + h^2), s = |x|^2.
double omega_star(const Point2 &x, double radius, double h) {
    const double s = norm2(x);
    const double h2 = h * h;
    const double r2 = radius * radius;
    return -8.0 * h2 * (r2 - s) / (s + h2) + 8.0 * h2 * s * (r2 + h2) / ((s + h2) * (s + h2));
}

ScalarField gaussian_source(std::shared_ptr<const Grid> grid, const Point2 &center, double width) {
    ScalarField out{grid, std::vector<double>(grid->node_count(), 0.0)};
    for (int j = 0; j < grid->n(); ++j) {
        for (int i = 0; i < grid->n(); ++i) {
            if (grid->kind(i, j) != NodeKind::interior) continue;
            out.values[grid->index(i, j)] = std::exp(-norm2(grid->node(i, j) - center) / (2.0 * width * width)) /
                                            (2.0 * std::numbers::pi * width * width);
        }
    }
    return out;
}

}  // namespace

bool CheckReport::pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckResult &r) { return r.pass; });
}

std::string CheckReport::table() const {
    std::size_t width = 4;
    for (const CheckResult &r : rows) width = std::max(width, r.name.size());
    std::ostringstream os;
    os << std::left << std::setw(6) << "" << std::setw(static_cast<int>(width) + 2) << "check" << std::setw(24)
       << "measured" << std::setw(24) << "limit" << "note\n";
    for (const CheckResult &r : rows) {
        os << std::setw(6) << (r.pass ? "PASS" : "FAIL") << std::setw(static_cast<int>(width) + 2) << r.name
           << std::setw(24) << shortest(r.measured) << std::setw(24) << shortest(r.limit) << r.note << '\n';
    }
    return os.str();
}

CheckReport kernel_check(const KernelCheckOptions &opt) {
    if (opt.points < 1) throw ConfigError("kernel check needs at least one sample point");
    CheckReport report;
    for (double h : opt.pitches) {
        const HelixParams p{h};
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> u(-opt.radius, opt.radius);
        double eig = 0.0;
        double sqrt_k = 0.0;
        double jac = 0.0;
        double sym = 0.0;
        double bounded = 0.0;
        const auto faulty_diffeo = [&](const Point2 &z) {
            const double s = norm2(z);
            return kernel::rho(s, p) * (1.0 + opt.rho_fault * s) * z;
        };
        for (int k = 0; k < opt.points; ++k) {
            const Point2 x{u(rng), u(rng)};
            const Point2 y{u(rng), u(rng)};
            const SymMat2 K = kernel::k_matrix(x, p);
            const double mean = 0.5 * K.trace();
            const double spread = std::hypot(0.5 * (K.a11 - K.a22), K.a12);
            const double small = h * h / (norm2(x) + h * h);
            eig = std::max({eig, std::abs(mean + spread - 1.0), std::abs(mean - spread - small)});

            const SymMat2 li = kernel::lambda_inverse(x, p);
            sqrt_k = std::max(sqrt_k, max_entry_diff(commuting_product(li, li), K));

            jac = std::max(jac, fd_jacobian_error(faulty_diffeo, x, kernel::diffeo_jacobian(x, p)));

            if (norm(x - y) > 1e-8) {
                const double gxy = kernel::green_free(x, y, p);
                const double gyx = kernel::green_free(y, x, p);
                sym = std::max(sym, std::abs(gxy - gyx) / (1.0 + std::abs(gxy)));
                bounded = std::max(bounded, norm(kernel::grad_green_free(x, y, p)) * norm(x - y));
            }
        }
        report.rows.push_back(at_most(pitch_label("K eigenvalues {1, h^2/|X|^2}", h), eig, 1e-12));
        report.rows.push_back(at_most(pitch_label("(Lambda^-1)^2 = K", h), sqrt_k, 1e-12));
        report.rows.push_back(at_most(pitch_label("DT vs finite differences of T", h), jac, 1e-6, "relative"));
        report.rows.push_back(at_most(pitch_label("G_K(x,y) = G_K(y,x)", h), sym, 1e-12));

        // Approach the diagonal along (1,1)/sqrt(2) from (1,0): |grad G_K| |x - y| must settle.
        const Point2 x0{1.0, 0.0};
        std::vector<double> sweep;
        for (double d : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const Point2 y = x0 + (d / std::sqrt(2.0)) * Vec2{1.0, 1.0};
            sweep.push_back(norm(kernel::grad_green_free(x0, y, p)) * d);
        }
        const double settle = std::abs(sweep[4] - sweep[3]) / sweep[4];
        report.rows.push_back(at_most(pitch_label("|grad G_K||x-y| settles near the diagonal", h), settle, 1e-3,
                                      "relative change 1e-5 -> 1e-6"));
        // Sup over the random pairs against the near-diagonal constant H(x,x) |DT| |DT^-1| for |x| <= R sqrt 2.
        const double rmax = opt.radius * std::sqrt(2.0);
        const double lifted = std::sqrt(rmax * rmax + h * h);
        const double cap = 2.0 * lifted / (2.0 * std::numbers::pi * h) * (lifted / h) + 1.0;
        report.rows.push_back(at_most(pitch_label("sup |grad G_K||x-y| on random pairs", h), bounded, cap));
    }
    return report;
}

double manufactured_l2_error(int n, double h, double radius) {
    const auto grid = Grid::covering(DiskDomain{radius}, n);
    const EllipticSystem sys(grid, HelixParams{h});
    ScalarField omega{grid, std::vector<double>(grid->node_count(), 0.0)};
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (grid->kind(i, j) == NodeKind::interior) {
                omega.values[grid->index(i, j)] = omega_star(grid->node(i, j), radius, h);
            }
        }
    }
    const ScalarField psi = solve_stream(omega, sys);
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (grid->kind(i, j) != NodeKind::interior) continue;
            const double e = psi.at(i, j) - psi_star(grid->node(i, j), radius);
            err += e * e;
        }
    }
    return std::sqrt(err) * grid->spacing();
}

double convergence_order(const std::vector<int> &sizes, const std::vector<double> &errors) {
    const std::size_t m = sizes.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        mx += std::log(sizes[k] - 1.0) / m;
        my += std::log(errors[k]) / m;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double dx = std::log(sizes[k] - 1.0) - mx;
        sxy += dx * (std::log(errors[k]) - my);
        sxx += dx * dx;
    }
    return -sxy / sxx;
}

CheckReport solver_check(const SolverCheckOptions &opt) {
    if (opt.sizes.size() < 2) throw ConfigError("solver check needs at least two grid sizes");
    std::vector<int> sizes = opt.sizes;
    std::sort(sizes.begin(), sizes.end());
    for (int n : sizes) {
        if (n < min_check_grid) {
            throw ConfigError("grid size n=" + std::to_string(n) + " is too small for the solver check (need n >= " +
                              std::to_string(min_check_grid) + ")");
        }
    }
    CheckReport report;
    std::vector<double> errors;
    for (int n : sizes) {
        errors.push_back(manufactured_l2_error(n, opt.h, opt.radius));
        report.rows.push_back(
            at_most("manufactured L2 error n=" + std::to_string(n), errors.back(), 1.0, "informational"));
    }
    report.rows.push_back(at_least("manufactured convergence order", convergence_order(sizes, errors), 1.9,
                                   "least squares over all sizes"));

    const auto grid = Grid::covering(DiskDomain{opt.radius}, sizes.front());
    const EllipticSystem sys(grid, HelixParams{opt.h});
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    double asym = 0.0;
    bool positive = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(grid->node_count(), 0.0);
        std::vector<double> v(grid->node_count(), 0.0);
        for (std::size_t q = 0; q < u.size(); ++q) {
            if (grid->mask()[q] != NodeKind::interior) continue;
            u[q] = nd(rng);
            v[q] = nd(rng);
        }
        const auto au = sys.apply(u);
        const auto av = sys.apply(v);
        double uav = 0.0, vau = 0.0, uau = 0.0, nau = 0.0, nv = 0.0;
        for (std::size_t q = 0; q < u.size(); ++q) {
            uav += au[q] * v[q];
            vau += av[q] * u[q];
            uau += au[q] * u[q];
            nau += au[q] * au[q];
            nv += v[q] * v[q];
        }
        asym = std::max(asym, std::abs(uav - vau) / std::sqrt(nau * nv));
        positive = positive && uau > 0.0;
    }
    report.rows.push_back(at_most("operator symmetry |u.Av - v.Au|", asym, 1e-12, "relative, 20 random pairs"));
    report.rows.push_back({"operator positivity u.Au > 0", positive ? 1.0 : 0.0, 1.0, positive, "20 random vectors"});

    const int probe_n = *std::find_if(sizes.rbegin(), sizes.rend(), [&](int n) { return n <= 129 || n == sizes.front(); });
    const auto probe_grid = Grid::covering(DiskDomain{opt.radius}, probe_n);
    const EllipticSystem probe_sys(probe_grid, HelixParams{opt.h});
    const Point2 x0{-0.2 * opt.radius, 0.3 * opt.radius};
    const Point2 y0{0.5 * opt.radius, 0.0};
    const double sxy = interpolate(regular_part_probe(y0, probe_sys), x0);
    const double syx = interpolate(regular_part_probe(x0, probe_sys), y0);
    report.rows.push_back(at_most("regular part symmetry S(x0,y0) = S(y0,x0)", std::abs(sxy - syx) / std::abs(sxy),
                                  0.02, "relative, n=" + std::to_string(probe_n)));
    return report;
}

GreenCheck green_decomposition_check(int n, double h, const Point2 &y0, double width) {
    const HelixParams p{h};
    const auto grid = Grid::covering(DiskDomain{2.0}, n);
    const EllipticSystem sys(grid, p);
    const ScalarField s_y0 = regular_part_probe(y0, sys);

    GreenCheck out;
    std::vector<Point2> rings;
    for (double r : {0.5, 0.8, 1.0, 1.2, 1.5}) {
        for (int k = 0; k < 64; ++k) rings.push_back(rotate({r, 0.0}, 2.0 * std::numbers::pi * k / 64.0));
    }
    const auto grad_perp = curl_interp(s_y0, rings);
    for (std::size_t k = 0; k < rings.size(); ++k) {
        out.max_s = std::max(out.max_s, std::abs(interpolate(s_y0, rings[k])));
        out.max_grad_s = std::max(out.max_grad_s, norm(grad_perp[k]));
    }

    const Point2 x0{-0.4, 0.6};
    const double sxy = interpolate(s_y0, x0);
    const double syx = interpolate(regular_part_probe(x0, sys), y0);
    out.symmetry = std::abs(sxy - syx) / std::abs(sxy);

    const ScalarField omega = gaussian_source(grid, y0, width);
    const ScalarField psi = solve_stream(omega, sys);
    const double area = grid->spacing() * grid->spacing();
    for (const Point2 &x : rings) {
        if (norm(x - y0) < 0.25) continue;
        double singular = 0.0;
        for (int j = 0; j < grid->n(); ++j) {
            for (int i = 0; i < grid->n(); ++i) {
                const double w = omega.at(i, j);
                if (w < 1e-14) continue;
                singular += kernel::green_free(x, grid->node(i, j), p) * w * area;
            }
        }
        out.mismatch = std::max(out.mismatch, std::abs(interpolate(psi, x) - singular - interpolate(s_y0, x)));
    }
    out.pass = std::isfinite(out.max_s) && std::isfinite(out.max_grad_s) && out.mismatch <= 0.05 * out.max_s &&
               out.symmetry <= 0.02;
    return out;
}

}  // namespace helivort::checks
