#include "helivort/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "helivort/checks.hpp"
#include "helivort/config.hpp"
#include "helivort/diagnostics.hpp"
#include "helivort/domain_solver.hpp"
#include "helivort/error.hpp"
#include "helivort/format.hpp"
#include "helivort/io.hpp"
#include "helivort/reconstruct3d.hpp"
#include "helivort/sim.hpp"

#ifndef HELIVORT_VERSION
#define HELIVORT_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace helivort {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int apply_threads(std::optional<int> requested) {
#ifdef _OPENMP
    if (requested) omp_set_num_threads(*requested);
    return omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

std::string joined(const std::vector<std::string> &args) {
    std::string out = "helivort";
    for (const std::string &a : args) out += " " + a;
    return out;
}

struct SimulateArgs {
    std::string config;
    std::string out = "helivort-run";
    std::optional<double> eps;
    std::optional<double> dt;
    std::optional<std::string> backend;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_final;
    std::optional<int> snapshot_every;
    bool dump_grid = false;
    bool overwrite = false;
};

int cmd_simulate(const SimulateArgs &a, int threads, const std::string &command, std::ostream &out,
                 std::ostream &err) {
    const auto t_start = Clock::now();
    RunConfig rc = load_config(a.config);
    SimConfig &cfg = rc.sim;
    if (a.eps) override_eps(cfg, *a.eps);
    if (a.dt) cfg.dt = *a.dt;
    if (a.backend) cfg.backend = parse_backend(*a.backend);
    if (a.grid_n) cfg.grid_n = *a.grid_n;
    if (a.seed) cfg.seed = *a.seed;
    if (a.t_final) cfg.t_final = *a.t_final;
    if (a.snapshot_every) rc.snapshot_every = *a.snapshot_every;
    if (rc.snapshot_every < 0) throw ConfigError("--snapshot-every must be >= 0");

    const fs::path dir(a.out);
    fs::create_directories(dir);
    if (fs::exists(dir / io::manifest_file) && !a.overwrite) {
        throw ConfigError("'" + a.out + "' already holds a run; pick another --out or pass --overwrite");
    }

    const sim::Plan plan = sim::plan(cfg);
    rc.sim = plan.config;
    const SimConfig &run_cfg = rc.sim;
    const auto path = [&](const char *name) { return (dir / name).string(); };

    io::RunManifest manifest;
    manifest.set("version", HELIVORT_VERSION);
    manifest.set("command", command);
    manifest.set("config_source", a.config);
    manifest.set("status", "running");
    manifest.set("threads", std::to_string(threads));
    manifest.set("seed", std::to_string(run_cfg.seed));
    manifest.set("h", run_cfg.h);
    manifest.set("eps", run_cfg.eps);
    manifest.set("delta", run_cfg.delta);
    manifest.set("dt", plan.dt);
    manifest.set("steps", std::to_string(plan.steps));
    manifest.set("t_final", run_cfg.t_final);
    manifest.set("backend", to_string(run_cfg.backend));
    manifest.set("grid_n", std::to_string(run_cfg.grid_n));
    manifest.set("r_u", run_cfg.r_u);
    manifest.set("eta0", run_cfg.eta0);
    manifest.set("blobs", std::to_string(run_cfg.blobs.size()));
    manifest.set("output.config", path(io::config_file));
    manifest.set("output.diagnostics", path(io::diagnostics_file));
    manifest.set("output.particles", path(io::particles_file));
    if (a.dump_grid) manifest.set("output.grid_stream", path("grid_stream.csv"));
    io::write_manifest(path(io::manifest_file), manifest);
    io::write_text(path(io::config_file), format_config(rc));

    io::DiagnosticsWriter diag(path(io::diagnostics_file), static_cast<int>(run_cfg.blobs.size()));
    io::SnapshotWriter snaps(path(io::particles_file));
    long record_index = 0;
    const auto observer = [&](const ParticleSystem &sys, const DiagnosticsRecord &r) {
        diag.write(r);
        const bool last = r.t == run_cfg.t_final;
        if (record_index == 0 || last || (rc.snapshot_every > 0 && record_index % rc.snapshot_every == 0)) {
            snaps.write(sys, r.t);
        }
        ++record_index;
    };

    out << "simulate: " << run_cfg.blobs.size() << " blob(s), " << plan.steps << " steps of dt=" << shortest(plan.dt)
        << " to T=" << shortest(run_cfg.t_final) << ", delta=" << shortest(run_cfg.delta) << ", backend "
        << to_string(run_cfg.backend) << ", " << threads << " thread(s)\n";
    const auto t_run = Clock::now();
    try {
        const sim::RunResult res = sim::run(run_cfg, observer);
        manifest.set("status", "ok");
        manifest.set("records", std::to_string(res.records.size()));
        manifest.set("support_ok", res.first_violation ? "0" : "1");
        if (res.first_violation) manifest.set("first_support_violation", *res.first_violation);
        if (a.dump_grid) {
            const GridBackend grid(res.final_state.params, res.final_state.domain, run_cfg.grid_n);
            write_field_csv(grid.stream(res.final_state), path("grid_stream.csv"));
        }
    } catch (const NumericalError &e) {
        manifest.set("status", std::string("aborted: ") + e.what());
        manifest.set("records", std::to_string(record_index));
        manifest.set("wall_seconds.run", seconds_since(t_run));
        manifest.set("wall_seconds.total", seconds_since(t_start));
        io::write_manifest(path(io::manifest_file), manifest);
        err << "simulate: numerical abort: " << e.what() << "\n";
        if (const auto *s = dynamic_cast<const StabilityError *>(&e)) {
            err << "simulate: retry with --dt " << shortest(s->suggested_dt()) << " or smaller\n";
        }
        return exit_numerical;
    }
    manifest.set("wall_seconds.setup", std::chrono::duration<double>(t_run - t_start).count());
    manifest.set("wall_seconds.run", seconds_since(t_run));
    manifest.set("wall_seconds.total", seconds_since(t_start));
    io::write_manifest(path(io::manifest_file), manifest);
    out << "simulate: wrote " << record_index << " records to " << path(io::diagnostics_file) << "\n";
    return exit_ok;
}

int cmd_kernel_check(const checks::KernelCheckOptions &opt, std::ostream &out) {
    const checks::CheckReport r = checks::kernel_check(opt);
    out << r.table();
    out << "kernel-check: " << (r.pass() ? "PASS" : "FAIL") << "\n";
    return r.pass() ? exit_ok : exit_check_failed;
}

int cmd_solver_check(const checks::SolverCheckOptions &opt, bool green, std::ostream &out) {
    checks::CheckReport r = checks::solver_check(opt);
    if (green) {
        const int n = std::min(*std::max_element(opt.sizes.begin(), opt.sizes.end()), 129);
        const checks::GreenCheck g = checks::green_decomposition_check(n, opt.h, {1.0, 0.0}, 0.05);
        r.rows.push_back({"Green decomposition mismatch / max|S|", g.mismatch / g.max_s, 0.05,
                          g.mismatch <= 0.05 * g.max_s, "Gaussian source at (1,0), n=" + std::to_string(n)});
        r.rows.push_back({"max|grad S| on interior rings", g.max_grad_s, 2.0, g.max_grad_s <= 2.0, "bounded"});
    }
    out << r.table();
    out << "solver-check: " << (r.pass() ? "PASS" : "FAIL") << "\n";
    return r.pass() ? exit_ok : exit_check_failed;
}

struct RunDir {
    fs::path dir;
    RunConfig config;

    explicit RunDir(const std::string &path) : dir(path) {
        if (!fs::is_directory(dir)) throw ConfigError("run directory '" + path + "' does not exist");
        if (!fs::exists(dir / io::config_file)) {
            throw ConfigError("'" + path + "' is not a run directory (no " + io::config_file + ")");
        }
        config = load_config((dir / io::config_file).string());
    }

    std::string file(const char *name) const { return (dir / name).string(); }
};

int cmd_compare_theory(const std::string &run_dir, const diagnostics::Tolerances &tol, std::ostream &out) {
    const RunDir run(run_dir);
    const auto series = io::read_diagnostics(run.file(io::diagnostics_file));
    if (series.empty()) throw ConfigError("'" + run.file(io::diagnostics_file) + "' has no rows");
    const SimConfig &cfg = run.config.sim;
    if (series.front().blobs.size() != cfg.blobs.size()) {
        throw ConfigError("diagnostics and config disagree on the number of blobs");
    }
    const diagnostics::TheoryReport rep = diagnostics::theory_compare(series, cfg.blobs, HelixParams{cfg.h}, tol);
    io::write_text(run.file("theory_report.txt"), rep.table());
    io::write_text(run.file("theory_summary.txt"), rep.summary());
    out << rep.table();
    out << "compare-theory: " << (rep.pass ? "PASS" : "FAIL") << " (summary in " << run.file("theory_summary.txt")
        << ")\n";
    return rep.pass ? exit_ok : exit_check_failed;
}

struct ReconstructArgs {
    std::string run_dir;
    double time = 0.0;
    int samples = 41;
    int layers = 8;
    double half_width = 0.0;
    int filament_samples = 200;
};

int cmd_reconstruct3d(const ReconstructArgs &a, std::ostream &out) {
    const RunDir run(a.run_dir);
    const SimConfig &cfg = run.config.sim;
    const HelixParams p{cfg.h};
    const std::string particles = run.file(io::particles_file);
    const ParticleSystem sys = io::read_snapshot(particles, a.time, cfg);

    std::vector<Point2> centers;
    double radius = 0.0;
    for (int i = 0; i < sys.blob_count(); ++i) centers.push_back(diagnostics::center_of_mass(sys, i));
    for (const BlobSpec &b : cfg.blobs) radius = std::max(radius, b.radius);
    const double half_width = a.half_width > 0.0 ? a.half_width : 2.0 * radius + 4.0 * cfg.delta;

    const reconstruct::VorticityDensity omega(sys, cfg.delta);
    const auto samples = reconstruct::helical_samples(centers, half_width, a.samples, a.layers, p);
    const auto field = reconstruct::vorticity3d(samples, omega, p);
    const std::string cloud = run.file(("vorticity3d_t" + shortest(a.time) + ".csv").c_str());
    reconstruct::write_point_cloud(cloud, samples, field);

    const auto times = io::snapshot_times(particles);
    std::vector<double> sigma(a.filament_samples);
    for (int k = 0; k < a.filament_samples; ++k) {
        sigma[k] = 4.0 * std::numbers::pi * k / std::max(1, a.filament_samples - 1);
    }
    const std::string filaments = run.file("filaments.csv");
    reconstruct::write_filaments(filaments, cfg.blobs, p, times, sigma);

    // Lift checks on the first layer: exact parallelism and symmetry, O(step^2) divergence.
    const std::size_t first_layer = samples.size() / static_cast<std::size_t>(a.layers);
    const std::span<const Point3> probe(samples.data(), std::min<std::size_t>(first_layer, 400));
    const double step = 0.25 * cfg.delta;
    const reconstruct::LiftCheck c = reconstruct::check_lift(probe, omega, p, step);
    const double div_limit = (step / cfg.delta) * (step / cfg.delta) * c.derivative_scale;
    const bool ok = c.parallel_defect <= 1e-12 && c.symmetry_defect <= 1e-12 && c.divergence <= div_limit;
    out << "reconstruct3d: t=" << shortest(a.time) << ", " << samples.size() << " samples -> " << cloud << "\n";
    out << "reconstruct3d: " << times.size() << " filament time(s) -> " << filaments << "\n";
    out << "reconstruct3d: parallel defect " << shortest(c.parallel_defect) << ", helical symmetry defect "
        << shortest(c.symmetry_defect) << ", max |div| " << shortest(c.divergence) << " (limit "
        << shortest(div_limit) << ")\n";
    out << "reconstruct3d: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? exit_ok : exit_check_failed;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"helivort: helical vortex filaments by the 2D blob method", "helivort"};
    app.require_subcommand(1);
    std::optional<int> threads;
    app.add_option("--threads", threads, "worker threads (default: HELIVORT_THREADS, else all cores)")
        ->envname("HELIVORT_THREADS")
        ->check(CLI::PositiveNumber);
    app.set_version_flag("--version", HELIVORT_VERSION);

    SimulateArgs sim_args;
    auto *simulate = app.add_subcommand("simulate", "run the particle simulation and write a run directory");
    simulate->add_option("--config", sim_args.config, "configuration file")->required();
    simulate->add_option("--out", sim_args.out, "run directory")->capture_default_str();
    simulate->add_option("--eps", sim_args.eps, "override every blob radius and the rescaling eps");
    simulate->add_option("--dt", sim_args.dt, "rescaled time step (default: from the initial speed)");
    simulate->add_option("--backend", sim_args.backend, "direct or grid");
    simulate->add_option("--grid-n", sim_args.grid_n, "grid nodes per side for the grid backend");
    simulate->add_option("--seed", sim_args.seed, "seed for the initial jitter");
    simulate->add_option("--t-final", sim_args.t_final, "final rescaled time");
    simulate->add_option("--snapshot-every", sim_args.snapshot_every, "particle snapshot every N records");
    simulate->add_flag("--dump-grid", sim_args.dump_grid, "write the final grid stream function as CSV");
    simulate->add_flag("--overwrite", sim_args.overwrite, "reuse a directory that already holds a run");

    checks::KernelCheckOptions kopt;
    auto *kernel = app.add_subcommand("kernel-check", "closed-form kernel identities at random points");
    kernel->add_option("--points", kopt.points, "random points per pitch")->capture_default_str();
    kernel->add_option("--seed", kopt.seed, "sampling seed")->capture_default_str();
    kernel->add_option("--pitches", kopt.pitches, "helix pitches h")->delimiter(',')->capture_default_str();
    kernel->add_option("--inject-rho-fault", kopt.rho_fault, "perturb rho by (1 + a s) in the reference");

    checks::SolverCheckOptions sopt;
    bool green = true;
    auto *solver = app.add_subcommand("solver-check", "manufactured-solution convergence and operator checks");
    solver->add_option("--grid-n", sopt.sizes, "grid sizes, comma separated")->delimiter(',')->capture_default_str();
    solver->add_option("--pitch", sopt.h, "helix pitch h")->capture_default_str();
    solver->add_flag("!--no-green", green, "skip the Green decomposition check");

    std::string compare_dir;
    diagnostics::Tolerances tol;
    auto *compare = app.add_subcommand("compare-theory", "compare a run with the leading-order helix motion");
    compare->add_option("run_dir", compare_dir, "run directory")->required();
    compare->add_option("--nu-tol", tol.frequency, "relative tolerance on the angular velocity")
        ->capture_default_str();
    compare->add_option("--inertia-growth", tol.inertia_growth, "allowed max I / I(0)")->capture_default_str();
    compare->add_option("--mass-tol", tol.mass_outside, "allowed mass outside r_eps / |gamma|")
        ->capture_default_str();

    ReconstructArgs rec;
    auto *recon = app.add_subcommand("reconstruct3d", "lift a particle snapshot to the 3D vorticity field");
    recon->add_option("run_dir", rec.run_dir, "run directory")->required();
    recon->add_option("--time", rec.time, "snapshot time")->required();
    recon->add_option("--samples", rec.samples, "cross-section grid points per side")->capture_default_str();
    recon->add_option("--layers", rec.layers, "heights per pitch period")->capture_default_str();
    recon->add_option("--half-width", rec.half_width, "half-width of the sampled square around each centre");
    recon->add_option("--filament-samples", rec.filament_samples, "points per predicted filament")
        ->capture_default_str();

    for (CLI::App *sub : {simulate, kernel, solver, compare, recon}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    const int nthreads = apply_threads(threads);
    try {
        if (*simulate) return cmd_simulate(sim_args, nthreads, joined(args), out, err);
        if (*kernel) return cmd_kernel_check(kopt, out);
        if (*solver) return cmd_solver_check(sopt, green, out);
        if (*compare) return cmd_compare_theory(compare_dir, tol, out);
        if (*recon) {
            if (rec.samples < 2 || rec.layers < 1 || rec.filament_samples < 2) {
                throw ConfigError("--samples and --filament-samples must be >= 2 and --layers >= 1");
            }
            return cmd_reconstruct3d(rec, out);
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalError &e) {
        err << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const DomainError &e) {
        err << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const fs::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace helivort
