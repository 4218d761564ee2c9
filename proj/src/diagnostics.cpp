#include "helivort/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "helivort/detail/pair_sums.hpp"
#include "helivort/error.hpp"
#include "helivort/format.hpp"
#include "helivort/kernel.hpp"

namespace helivort::diagnostics {

namespace {

double blob_circulation(const ParticleSystem &sys, int blob) {
    const double gamma = sys.circulation(blob);
    if (gamma == 0.0) throw DomainError("blob " + std::to_string(blob) + " has zero circulation");
    return gamma;
}

// sum_i s_i^2 ln(delta^2)/2: the self pairs that stream_direct includes and the energy excludes.
double self_pair_log(const ParticleSystem &sys) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const double s = sys.weights[i];
        acc += s * s * kernel::lifted_norm(sys.positions[i], sys.params);
    }
    return acc * std::log(sys.delta);
}

double unwrap(double angle, double previous) {
    const double two_pi = 2.0 * std::numbers::pi;
    return angle + two_pi * std::round((previous - angle) / two_pi);
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Point2 center_of_mass(const ParticleSystem &sys, int blob) {
    const double gamma = blob_circulation(sys, blob);
    Vec2 acc;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        if (sys.blob_id[k] == blob) acc += sys.weights[k] * sys.positions[k];
    }
    return (1.0 / gamma) * acc;
}

double inertia(const ParticleSystem &sys, int blob) {
    const Point2 b = center_of_mass(sys, blob);
    double acc = 0.0;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        if (sys.blob_id[k] == blob) acc += sys.weights[k] * norm2(sys.positions[k] - b);
    }
    return acc;
}

double radial_moment(const ParticleSystem &sys, int blob, int k) {
    if (k < 1) throw DomainError("radial moment order must be >= 1");
    double acc = 0.0;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        if (sys.blob_id[j] != blob) continue;
        const double r = norm(sys.positions[j]);
        acc += sys.weights[j] * (k == 2 ? r * r : std::pow(r, k));
    }
    return acc;
}

double energy(const ParticleSystem &sys) {
    const double pairs = detail::pair_log_energy(detail::flattened_sources(sys), sys.delta * sys.delta);
    return -2.0 * pairs / (2.0 * std::numbers::pi * sys.params.h());
}

double energy_grid(const ParticleSystem &sys, const GridBackend &grid) { return grid.energy(sys); }

std::vector<double> local_energy(const ParticleSystem &sys, std::span<const Point2> points) {
    return flow::stream_direct(sys, points);
}

double mass_outside(const ParticleSystem &sys, int blob, const Point2 &center, double radius) {
    if (!(radius > 0.0)) throw DomainError("mass_outside needs a positive radius");
    double acc = 0.0;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        if (sys.blob_id[k] == blob && norm(sys.positions[k] - center) >= radius) acc += sys.weights[k];
    }
    return acc;
}

double max_radial_deviation(const ParticleSystem &sys, int blob, double r0) {
    double m = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        if (sys.blob_id[k] != blob) continue;
        m = std::max(m, std::abs(norm(sys.positions[k]) - r0));
        any = true;
    }
    if (!any) throw DomainError("blob " + std::to_string(blob) + " has no particles");
    return m;
}

double localization_radius(double eps) {
    if (!(eps > 0.0 && eps < std::exp(-1.0))) throw DomainError("r_eps needs 0 < eps < 1/e");
    const double l = std::abs(std::log(eps));
    return std::sqrt(std::log(l) / l);
}

double rearrangement_bound(double density_cap, double mass) {
    if (!(density_cap > 0.0) || !(mass > 0.0)) throw DomainError("rearrangement_bound needs M > 0 and gamma > 0");
    const double r = std::sqrt(mass / (std::numbers::pi * density_cap));
    if (r > 1.0) throw DomainError("rearrangement_bound: R = " + std::to_string(r) + " > 1");
    if (r == 0.0) return 0.0;
    return 2.0 * std::numbers::pi * density_cap * (0.25 * r * r - 0.5 * r * r * std::log(r));
}

double support_half_width(const std::vector<BlobSpec> &specs, double disk_radius) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double ri = norm(specs[i].center);
        m = std::min(m, disk_radius - ri);
        for (std::size_t j = 0; j < i; ++j) m = std::min(m, std::abs(ri - norm(specs[j].center)));
    }
    return 0.25 * m;
}

DiagnosticsRecord record(const ParticleSystem &sys, double t, const std::vector<BlobSpec> &initial, double eta0) {
    DiagnosticsRecord rec;
    rec.t = t;
    const int nb = static_cast<int>(initial.size());
    // r_eps only exists for eps < 1/e; larger eps reports NaN masses.
    const double r_eps = sys.eps < std::exp(-1.0) ? localization_radius(sys.eps) : 0.0;
    const std::vector<double> psi = flow::stream_direct(sys);

    double pairs = 0.0;
    for (std::size_t k = 0; k < sys.size(); ++k) pairs += sys.weights[k] * psi[k];
    const double self = self_pair_log(sys) / (2.0 * std::numbers::pi * sys.params.h());
    rec.energy = -(pairs - self);

    for (int i = 0; i < nb; ++i) {
        BlobDiagnostics d;
        const double r0 = norm(initial[i].center);
        const double gamma = blob_circulation(sys, i);
        d.center = center_of_mass(sys, i);
        d.inertia = inertia(sys, i);
        d.j1 = radial_moment(sys, i, 1);
        d.j2 = radial_moment(sys, i, 2);
        d.radial_deviation = max_radial_deviation(sys, i, r0);
        d.mass_outside = r_eps > 0.0 ? mass_outside(sys, i, d.center, r_eps) : std::numeric_limits<double>::quiet_NaN();
        double mean = 0.0;
        for (std::size_t k = 0; k < sys.size(); ++k) {
            if (sys.blob_id[k] == i) mean += sys.weights[k] * psi[k];
        }
        for (std::size_t k = 0; k < sys.size(); ++k) {
            if (sys.blob_id[k] != i) continue;
            const double dev = gamma * psi[k] - mean;
            d.psi_variance += sys.weights[k] * dev * dev;
        }
        const Annulus a{r0, eta0};
        for (std::size_t k = 0; k < sys.size(); ++k) {
            if (sys.blob_id[k] == i && !a.contains(sys.positions[k])) rec.support_ok = false;
        }
        rec.blobs.push_back(d);
    }
    return rec;
}

double fitted_angular_velocity(std::span<const DiagnosticsRecord> series, int blob) {
    if (series.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> theta(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Point2 b = series[k].blobs.at(blob).center;
        const double a = std::atan2(b.y, b.x);
        theta[k] = k == 0 ? a : unwrap(a, theta[k - 1]);
    }
    const double t_half = 0.5 * (series.front().t + series.back().t);
    double st = 0.0, sa = 0.0, stt = 0.0, sta = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].t < t_half) continue;
        st += series[k].t;
        sa += theta[k];
        stt += series[k].t * series[k].t;
        sta += series[k].t * theta[k];
        ++n;
    }
    const double den = n * stt - st * st;
    if (n < 2 || den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sta - st * sa) / den;
}

TheoryReport theory_compare(std::span<const DiagnosticsRecord> series, const std::vector<BlobSpec> &specs,
                            const HelixParams &p, const Tolerances &tol) {
    if (series.empty()) throw ConfigError("theory_compare: empty time series");
    TheoryReport report;
    report.support_ok = series.back().support_ok;
    bool all = report.support_ok;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const BlobSpec &spec = specs[i];
        const int bi = static_cast<int>(i);
        BlobReport b;
        b.nu_theory = angular_frequency(spec, p);
        b.nu_fit = fitted_angular_velocity(series, bi);
        b.nu_relative_error = std::abs(b.nu_fit - b.nu_theory) / std::abs(b.nu_theory);
        const BlobDiagnostics &first = series.front().blobs.at(i);
        b.inertia_initial = first.inertia;
        for (const DiagnosticsRecord &r : series) {
            const BlobDiagnostics &d = r.blobs.at(i);
            b.max_center_error = std::max(b.max_center_error, norm(d.center - leading_order(spec, p, r.t)));
            b.max_inertia = std::max(b.max_inertia, d.inertia);
            b.max_radial_deviation = std::max(b.max_radial_deviation, d.radial_deviation);
            if (!std::isnan(d.mass_outside)) b.max_mass_outside = std::max(b.max_mass_outside, std::abs(d.mass_outside));
            b.max_j2_drift = std::max(b.max_j2_drift, std::abs(d.j2 - first.j2));
            b.max_psi_variance = std::max(b.max_psi_variance, d.psi_variance);
        }
        b.final_radial_deviation = series.back().blobs.at(i).radial_deviation;

        if (series.size() >= 3) {
            const double h = p.h();
            const double r0 = norm(spec.center);
            const double c = -spec.circulation * std::sqrt(r0 * r0 + h * h) / (4.0 * std::numbers::pi * h);
            double worst = 0.0, scale = 0.0;
            for (std::size_t k = 1; k + 1 < series.size(); ++k) {
                const Point2 prev = series[k - 1].blobs.at(i).center;
                const Point2 next = series[k + 1].blobs.at(i).center;
                const Point2 bk = series[k].blobs.at(i).center;
                const Vec2 rate = (1.0 / (series[k + 1].t - series[k - 1].t)) * (next - prev);
                const Vec2 law = (c / (norm2(bk) + h * h)) * perp(bk);
                worst = std::max(worst, norm(rate - law));
                scale = std::max(scale, norm(law));
            }
            b.drift_law_residual = scale > 0.0 ? worst / scale : std::numeric_limits<double>::quiet_NaN();
        }

        const bool frequency_ok = std::isnan(b.nu_fit) || b.nu_relative_error <= tol.frequency;
        const bool inertia_ok = b.inertia_initial == 0.0 || b.max_inertia <= tol.inertia_growth * b.inertia_initial;
        const bool mass_ok = !(b.max_mass_outside > tol.mass_outside * std::abs(spec.circulation));
        b.pass = frequency_ok && inertia_ok && mass_ok;
        all = all && b.pass;
        report.blobs.push_back(b);
    }
    report.pass = all;
    return report;
}

std::string TheoryReport::summary() const {
    std::ostringstream os;
    os << "pass=" << (pass ? 1 : 0) << "\n";
    os << "support_ok=" << (support_ok ? 1 : 0) << "\n";
    os << "blobs=" << blobs.size() << "\n";
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        const BlobReport &b = blobs[i];
        const std::string k = "blob" + std::to_string(i) + ".";
        os << k << "nu_theory=" << shortest(b.nu_theory) << "\n"
           << k << "nu_fit=" << shortest(b.nu_fit) << "\n"
           << k << "nu_relative_error=" << shortest(b.nu_relative_error) << "\n"
           << k << "max_center_error=" << shortest(b.max_center_error) << "\n"
           << k << "inertia_initial=" << shortest(b.inertia_initial) << "\n"
           << k << "max_inertia=" << shortest(b.max_inertia) << "\n"
           << k << "max_radial_deviation=" << shortest(b.max_radial_deviation) << "\n"
           << k << "final_radial_deviation=" << shortest(b.final_radial_deviation) << "\n"
           << k << "max_mass_outside=" << shortest(b.max_mass_outside) << "\n"
           << k << "max_j2_drift=" << shortest(b.max_j2_drift) << "\n"
           << k << "drift_law_residual=" << shortest(b.drift_law_residual) << "\n"
           << k << "max_psi_variance=" << shortest(b.max_psi_variance) << "\n"
           << k << "pass=" << (b.pass ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string TheoryReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(6) << "blob" << std::right << std::setw(14) << "nu_theory" << std::setw(14)
       << "nu_fit" << std::setw(10) << "rel_err" << std::setw(12) << "max|b-z|" << std::setw(12) << "max I/I0"
       << std::setw(12) << "max R_t" << std::setw(12) << "max m_out" << std::setw(12) << "drift_res"
       << std::setw(6) << "ok" << "\n";
    os << std::setprecision(5);
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        const BlobReport &b = blobs[i];
        const double growth = b.inertia_initial > 0.0 ? b.max_inertia / b.inertia_initial : 0.0;
        os << std::left << std::setw(6) << i << std::right << std::setw(14) << b.nu_theory << std::setw(14)
           << b.nu_fit << std::setw(10) << b.nu_relative_error << std::setw(12) << b.max_center_error
           << std::setw(12) << growth << std::setw(12) << b.max_radial_deviation << std::setw(12)
           << b.max_mass_outside << std::setw(12) << b.drift_law_residual << std::setw(6)
           << (b.pass ? "yes" : "NO") << "\n";
    }
    os << "support condition " << (support_ok ? "held" : "VIOLATED") << "; overall " << (pass ? "PASS" : "FAIL")
       << "\n";
    return os.str();
}

std::string csv_header(int blob_count) {
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < blob_count; ++i) {
        for (const char *c : {"b_x", "b_y", "I", "J1", "J2", "R_t", "mass_out"}) os << "," << c << "_" << i;
    }
    os << ",E,support_ok";
    for (int i = 0; i < blob_count; ++i) os << ",psi_var_" << i;
    return os.str();
}

std::string csv_row(const DiagnosticsRecord &r) {
    std::ostringstream os;
    os << shortest(r.t);
    for (const BlobDiagnostics &d : r.blobs) {
        os << "," << shortest(d.center.x) << "," << shortest(d.center.y) << "," << shortest(d.inertia) << "," << shortest(d.j1) << "," << shortest(d.j2) << ","
           << shortest(d.radial_deviation) << "," << shortest(d.mass_outside);
    }
    os << "," << shortest(r.energy) << "," << (r.support_ok ? 1 : 0);
    for (const BlobDiagnostics &d : r.blobs) os << "," << shortest(d.psi_variance);
    return os.str();
}

DiagnosticsRecord parse_csv_row(const std::string &line, int blob_count) {
    const auto cells = split(line);
    const std::size_t expected = 3 + 8 * static_cast<std::size_t>(blob_count);
    if (cells.size() != expected) {
        throw ConfigError("diagnostics row has " + std::to_string(cells.size()) + " columns, expected " +
                          std::to_string(expected));
    }
    std::size_t c = 0;
    const auto next = [&]() {
        try {
            std::size_t used = 0;
            const double v = std::stod(cells[c], &used);
            if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
            ++c;
            return v;
        } catch (const std::exception &) {
            throw ConfigError("malformed number '" + cells[c] + "' in diagnostics row");
        }
    };
    DiagnosticsRecord r;
    r.t = next();
    r.blobs.resize(blob_count);
    for (BlobDiagnostics &d : r.blobs) {
        d.center.x = next();
        d.center.y = next();
        d.inertia = next();
        d.j1 = next();
        d.j2 = next();
        d.radial_deviation = next();
        d.mass_outside = next();
    }
    r.energy = next();
    r.support_ok = next() != 0.0;
    for (BlobDiagnostics &d : r.blobs) d.psi_variance = next();
    return r;
}

}  // namespace helivort::diagnostics
