#include <doctest.h>

#include <cmath>

#include "helivort/checks.hpp"
#include "helivort/error.hpp"

using namespace helivort;
using namespace helivort::checks;
using doctest::Approx;

TEST_CASE("kernel check passes on the real kernel") {
    const CheckReport r = kernel_check({});
    MESSAGE(r.table());
    CHECK(r.pass());
    CHECK(r.rows.size() == 18);
}

TEST_CASE("a perturbed rho fails only the Jacobian check") {
    KernelCheckOptions opt;
    opt.pitches = {1.0};
    opt.points = 500;
    opt.rho_fault = 1e-3;
    const CheckReport r = kernel_check(opt);
    CHECK_FALSE(r.pass());
    for (const CheckResult &row : r.rows) {
        const bool jacobian = row.name.find("DT vs finite differences") != std::string::npos;
        CHECK(row.pass == !jacobian);
    }
    CHECK(r.table().find("FAIL") != std::string::npos);
}

TEST_CASE("convergence order is the least-squares slope per doubling") {
    const std::vector<int> sizes{33, 65, 129};
    std::vector<double> errors;
    for (int n : sizes) errors.push_back(3.0 * std::pow(n - 1.0, -2.0));
    CHECK(convergence_order(sizes, errors) == Approx(2.0).epsilon(1e-12));
    errors[1] *= 1.1;
    CHECK(convergence_order(sizes, errors) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("solver check") {
    SolverCheckOptions opt;
    opt.sizes = {33, 65, 129};
    const CheckReport r = solver_check(opt);
    MESSAGE(r.table());
    CHECK(r.pass());

    opt.sizes = {9, 65};
    try {
        solver_check(opt);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("n=9") != std::string::npos);
    }
    opt.sizes = {65};
    CHECK_THROWS_AS(solver_check(opt), ConfigError);
}

TEST_CASE("Green decomposition check at moderate resolution") {
    const GreenCheck g = green_decomposition_check(129, 1.0, {1.0, 0.0}, 0.05);
    MESSAGE("max|S| " << g.max_s << " max|grad S| " << g.max_grad_s << " mismatch " << g.mismatch << " symmetry "
                      << g.symmetry);
    CHECK(g.pass);
}
