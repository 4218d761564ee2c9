#include "helivort/domain_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "helivort/error.hpp"
#include "helivort/kernel.hpp"

namespace helivort {

namespace {

constexpr int kMinGridNodes = 9;

std::size_t stencil_slot(int di, int dj) { return static_cast<std::size_t>((dj + 1) * 3 + (di + 1)); }

/// Fixed-block dot product: the summation order does not depend on the thread count.
double dot_blocked(std::span<const double> a, std::span<const double> b) {
    constexpr std::ptrdiff_t kBlocks = 64;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
    std::array<double, kBlocks> partial{};
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < kBlocks; ++blk) {
        const std::ptrdiff_t lo = n * blk / kBlocks;
        const std::ptrdiff_t hi = n * (blk + 1) / kBlocks;
        double s = 0.0;
        for (std::ptrdiff_t k = lo; k < hi; ++k) s += a[k] * b[k];
        partial[blk] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

struct CellLocation {
    int i;
    int j;
    double fx;
    double fy;
};

/// Cell containing x with fractional offsets; cells are limited to [lo, n-2-lo].
CellLocation locate(const Grid &grid, const Point2 &x, int lo, const char *what) {
    const double gx = (x.x - grid.origin().x) / grid.spacing();
    const double gy = (x.y - grid.origin().y) / grid.spacing();
    const int hi = grid.n() - 1 - lo;
    if (!(gx >= lo && gx <= hi && gy >= lo && gy <= hi)) {
        throw DomainError(std::string(what) + ": point (" + std::to_string(x.x) + ", " +
                          std::to_string(x.y) + ") outside the grid");
    }
    int i = std::min(static_cast<int>(gx), hi - 1);
    int j = std::min(static_cast<int>(gy), hi - 1);
    return {i, j, gx - i, gy - j};
}

}  // namespace

Grid::Grid(double radius, int n) : n_(n), radius_(radius) {
    spacing_ = 2.0 * radius / (n - 5);
    origin_ = {-radius - 2.0 * spacing_, -radius - 2.0 * spacing_};
    mask_.assign(node_count(), NodeKind::exterior);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (norm2(node(i, j)) < radius * radius) mask_[index(i, j)] = NodeKind::interior;
        }
    }
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            if (mask_[index(i, j)] == NodeKind::interior) continue;
            bool touches = false;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    touches = touches || mask_[index(i + di, j + dj)] == NodeKind::interior;
                }
            }
            if (touches) mask_[index(i, j)] = NodeKind::boundary;
        }
    }
}

std::shared_ptr<const Grid> Grid::covering(const DiskDomain &domain, int n) {
    if (n < kMinGridNodes) {
        throw ConfigError("grid needs at least " + std::to_string(kMinGridNodes) +
                          " nodes per side, got " + std::to_string(n));
    }
    return std::shared_ptr<const Grid>(new Grid(domain.radius(), n));
}

ScalarField deposit(const ParticleSystem &particles, std::shared_ptr<const Grid> grid) {
    ScalarField out{grid, std::vector<double>(grid->node_count(), 0.0)};
    const double inv_area = 1.0 / (grid->spacing() * grid->spacing());
    for (std::size_t k = 0; k < particles.size(); ++k) {
        const CellLocation c = locate(*grid, particles.positions[k], 0, "deposit");
        const double w = particles.weights[k] * inv_area;
        out.values[grid->index(c.i, c.j)] += w * (1.0 - c.fx) * (1.0 - c.fy);
        out.values[grid->index(c.i + 1, c.j)] += w * c.fx * (1.0 - c.fy);
        out.values[grid->index(c.i, c.j + 1)] += w * (1.0 - c.fx) * c.fy;
        out.values[grid->index(c.i + 1, c.j + 1)] += w * c.fx * c.fy;
    }
    return out;
}

EllipticSystem::EllipticSystem(std::shared_ptr<const Grid> grid, HelixParams params)
    : grid_(std::move(grid)), params_(params) {
    const Grid &g = *grid_;
    const int n = g.n();
    const double s = g.spacing();
    const double inv_s2 = 1.0 / (s * s);
    stencil_.assign(g.node_count(), std::array<double, 9>{});

    const auto add = [&](int i, int j, int di, int dj, double v) {
        stencil_[g.index(i, j)][stencil_slot(di, dj)] += v * inv_s2;
    };

    // Face terms a (u_q - u_p)^2.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const Point2 mid = g.node(i, j) + Vec2{0.5 * s, 0.0};
            const double a = kernel::k_matrix(mid, params_).a11;
            add(i, j, 0, 0, a);
            add(i + 1, j, 0, 0, a);
            add(i, j, 1, 0, -a);
            add(i + 1, j, -1, 0, -a);
        }
    }
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point2 mid = g.node(i, j) + Vec2{0.0, 0.5 * s};
            const double a = kernel::k_matrix(mid, params_).a22;
            add(i, j, 0, 0, a);
            add(i, j + 1, 0, 0, a);
            add(i, j, 0, 1, -a);
            add(i, j + 1, 0, -1, -a);
        }
    }
    // Mixed cell terms (a12/2) Dx Dy, corners ordered (0,0), (1,0), (0,1), (1,1).
    constexpr std::array<int, 4> ci{0, 1, 0, 1};
    constexpr std::array<int, 4> cj{0, 0, 1, 1};
    constexpr std::array<double, 4> dx{-1.0, 1.0, -1.0, 1.0};
    constexpr std::array<double, 4> dy{-1.0, -1.0, 1.0, 1.0};
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const Point2 centre = g.node(i, j) + Vec2{0.5 * s, 0.5 * s};
            const double a12 = kernel::k_matrix(centre, params_).a12;
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 4; ++l) {
                    const double v = 0.25 * a12 * (dx[k] * dy[l] + dy[k] * dx[l]);
                    add(i + ci[k], j + cj[k], ci[l] - ci[k], cj[l] - cj[k], v);
                }
            }
        }
    }
}

std::vector<double> EllipticSystem::apply(std::span<const double> u) const {
    const Grid &g = *grid_;
    const int n = g.n();
    std::vector<double> out(g.node_count(), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t p = g.index(i, j);
            if (g.mask()[p] != NodeKind::interior) continue;
            const auto &r = stencil_[p];
            double acc = 0.0;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    acc += r[stencil_slot(di, dj)] * u[g.index(i + di, j + dj)];
                }
            }
            out[p] = acc;
        }
    }
    return out;
}

double EllipticSystem::energy(std::span<const double> u) const {
    const Grid &g = *grid_;
    const int n = g.n();
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto &r = stencil_[g.index(i, j)];
            double row = 0.0;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di;
                    const int jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                    row += r[stencil_slot(di, dj)] * u[g.index(ii, jj)];
                }
            }
            acc += u[g.index(i, j)] * row;
        }
        rows[static_cast<std::size_t>(j)] = acc;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total * g.spacing() * g.spacing();
}

std::vector<double> EllipticSystem::solve(std::span<const double> rhs,
                                          std::span<const double> dirichlet, double tolerance,
                                          int max_iterations) const {
    const Grid &g = *grid_;
    const std::size_t nodes = g.node_count();
    if (rhs.size() != nodes || (!dirichlet.empty() && dirichlet.size() != nodes)) {
        throw ConfigError("EllipticSystem::solve: field size does not match the grid");
    }
    if (max_iterations <= 0) max_iterations = 50 * g.n();
    const auto &mask = g.mask();

    std::vector<double> u(nodes, 0.0);
    if (!dirichlet.empty()) {
        for (std::size_t p = 0; p < nodes; ++p) {
            if (mask[p] != NodeKind::interior) u[p] = dirichlet[p];
        }
    }

    // b = rhs - A_IB u_B on interior nodes.
    std::vector<double> b(nodes, 0.0);
    {
        const std::vector<double> boundary_part = apply(u);
        for (std::size_t p = 0; p < nodes; ++p) {
            if (mask[p] == NodeKind::interior) b[p] = rhs[p] - boundary_part[p];
        }
    }
    for (std::size_t p = 0; p < nodes; ++p) {
        if (mask[p] != NodeKind::interior) u[p] = 0.0;
    }

    last_iterations_ = 0;
    const double b_norm = std::sqrt(dot_blocked(b, b));
    std::vector<double> residuals;
    if (b_norm == 0.0) {
        if (!dirichlet.empty()) {
            for (std::size_t p = 0; p < nodes; ++p) {
                if (mask[p] != NodeKind::interior) u[p] = dirichlet[p];
            }
        }
        return u;
    }

    std::vector<double> inv_diag(nodes, 0.0);
    for (std::size_t p = 0; p < nodes; ++p) {
        if (mask[p] == NodeKind::interior) inv_diag[p] = 1.0 / stencil_[p][stencil_slot(0, 0)];
    }

    std::vector<double> r = b;
    std::vector<double> z(nodes);
    for (std::size_t p = 0; p < nodes; ++p) z[p] = inv_diag[p] * r[p];
    std::vector<double> d = z;
    double rz = dot_blocked(r, z);

    bool converged = false;
    for (int it = 1; it <= max_iterations; ++it) {
        const std::vector<double> ad = apply(d);
        const double alpha = rz / dot_blocked(d, ad);
        for (std::size_t p = 0; p < nodes; ++p) {
            u[p] += alpha * d[p];
            r[p] -= alpha * ad[p];
        }
        const double rel = std::sqrt(dot_blocked(r, r)) / b_norm;
        residuals.push_back(rel);
        last_iterations_ = it;
        if (rel <= tolerance) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < nodes; ++p) z[p] = inv_diag[p] * r[p];
        const double rz_next = dot_blocked(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t p = 0; p < nodes; ++p) d[p] = z[p] + beta * d[p];
    }
    if (!converged) {
        const std::string message = "conjugate gradient did not reach relative residual " +
                                    std::to_string(tolerance) + " in " + std::to_string(max_iterations) +
                                    " iterations (last " + std::to_string(residuals.back()) + ")";
        throw SolverError(message, std::move(residuals));
    }
    if (!dirichlet.empty()) {
        for (std::size_t p = 0; p < nodes; ++p) {
            if (mask[p] != NodeKind::interior) u[p] = dirichlet[p];
        }
    }
    return u;
}

ScalarField solve_stream(const ScalarField &omega, const EllipticSystem &system) {
    if (omega.grid != system.grid()) {
        throw ConfigError("solve_stream: vorticity lives on a different grid");
    }
    const auto &mask = omega.grid->mask();
    std::vector<double> rhs(omega.values.size(), 0.0);
    for (std::size_t p = 0; p < rhs.size(); ++p) {
        if (!std::isfinite(omega.values[p])) throw ConfigError("solve_stream: non-finite vorticity");
        if (mask[p] == NodeKind::interior) rhs[p] = -omega.values[p];
    }
    return {omega.grid, system.solve(rhs)};
}

std::vector<Vec2> curl_interp(const ScalarField &psi, std::span<const Point2> positions) {
    const Grid &g = *psi.grid;
    const int n = g.n();
    const double inv2s = 0.5 / g.spacing();
    std::vector<Vec2> node_v(g.node_count());
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const double d1 = (psi.at(i + 1, j) - psi.at(i - 1, j)) * inv2s;
            const double d2 = (psi.at(i, j + 1) - psi.at(i, j - 1)) * inv2s;
            node_v[g.index(i, j)] = {-d2, d1};
        }
    }
    std::vector<Vec2> out(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const CellLocation c = locate(g, positions[k], 1, "curl_interp");
        const Vec2 &v00 = node_v[g.index(c.i, c.j)];
        const Vec2 &v10 = node_v[g.index(c.i + 1, c.j)];
        const Vec2 &v01 = node_v[g.index(c.i, c.j + 1)];
        const Vec2 &v11 = node_v[g.index(c.i + 1, c.j + 1)];
        out[k] = (1.0 - c.fx) * (1.0 - c.fy) * v00 + c.fx * (1.0 - c.fy) * v10 +
                 (1.0 - c.fx) * c.fy * v01 + c.fx * c.fy * v11;
    }
    return out;
}

double interpolate(const ScalarField &field, const Point2 &x) {
    const Grid &g = *field.grid;
    const CellLocation c = locate(g, x, 0, "interpolate");
    return (1.0 - c.fx) * (1.0 - c.fy) * field.at(c.i, c.j) + c.fx * (1.0 - c.fy) * field.at(c.i + 1, c.j) +
           (1.0 - c.fx) * c.fy * field.at(c.i, c.j + 1) + c.fx * c.fy * field.at(c.i + 1, c.j + 1);
}

double divergence_k_grad_q(const Point2 &x, const HelixParams &params) {
    // q = sqrt(|X|/h) is radial: K grad q = phi(s) x, phi = h^{3/2} (s+h^2)^{-7/4} / 2.
    const double h = params.h();
    const double s = norm2(x);
    const double l2 = s + h * h;
    const double phi = 0.5 * h * std::sqrt(h) * std::pow(l2, -1.75);
    return 2.0 * phi * (1.0 - 1.75 * s / l2);
}

ScalarField regular_part_probe(const Point2 &y, const EllipticSystem &system) {
    const Grid &g = *system.grid();
    const HelixParams &p = system.params();
    if (!(norm(y) < g.disk_radius() - 2.0 * g.spacing())) {
        throw DomainError("regular_part_probe: source point must lie inside the disk, away from the boundary");
    }
    const int n = g.n();
    const double s = g.spacing();
    const Point2 ty = kernel::diffeo(y, p);
    const double qy = std::sqrt(kernel::diffeo_jacobian(y, p).det()) / kernel::radial_factor(y, p);
    const double prefactor = -qy / (2.0 * std::numbers::pi);

    // Cell-averaged log for nodes next to the singularity (midpoint rule on a sub-grid).
    const auto log_distance = [&](const Point2 &x) {
        if (norm(x - y) >= 2.0 * s) return std::log(norm(kernel::diffeo(x, p) - ty));
        constexpr int kSub = 16;
        double acc = 0.0;
        for (int b = 0; b < kSub; ++b) {
            for (int a = 0; a < kSub; ++a) {
                const Point2 z = x + Vec2{((a + 0.5) / kSub - 0.5) * s, ((b + 0.5) / kSub - 0.5) * s};
                acc += std::log(norm(kernel::diffeo(z, p) - ty));
            }
        }
        return acc / (kSub * kSub);
    };

    std::vector<double> rhs(g.node_count(), 0.0);
    std::vector<double> boundary(g.node_count(), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t idx = g.index(i, j);
            const Point2 x = g.node(i, j);
            switch (g.mask()[idx]) {
            case NodeKind::interior:
                // A approximates -L, hence the sign flip.
                rhs[idx] = -prefactor * log_distance(x) * divergence_k_grad_q(x, p);
                break;
            case NodeKind::boundary:
                boundary[idx] = -kernel::green_free(x, y, p);
                break;
            case NodeKind::exterior:
                break;
            }
        }
    }
    return {system.grid(), system.solve(rhs, boundary)};
}

void write_field_csv(const ScalarField &field, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << "index,x1,x2,value\n" << std::setprecision(17);
    const Grid &g = *field.grid;
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            const Point2 x = g.node(i, j);
            out << g.index(i, j) << ',' << x.x << ',' << x.y << ',' << field.at(i, j) << '\n';
        }
    }
}

}  // namespace helivort
