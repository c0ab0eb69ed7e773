#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "ta/oracles.hpp"
#include "ta/solver.hpp"

using namespace ta;

namespace {

DenseMatrix random_matrix(int m, int n, std::uint64_t seed) {
    DenseMatrix A(m, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    for (double& v : A.data) v = d(rng);
    return A;
}

Vector random_vector(int n, std::uint64_t seed) {
    Vector v(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    for (double& t : v) t = d(rng);
    return v;
}

struct CapturedTrace {
    struct Row {
        long iter;
        double gap, radius, alpha;
        std::string event;
    };
    std::vector<Row> rows;
    TraceSink sink() {
        return [this](const TraceRecord& r) {
            rows.push_back({r.iter, r.gap, r.radius, r.alpha, r.event});
        };
    }
};

}  // namespace

TEST_CASE("radius_update examples") {
    CHECK(radius_update(1.0, {2, 0}, {1, 0}, {1, 0}) == 2.0);
    CHECK(radius_update(1.0, {5, 0}, {4, 0}, {1, 0}) == 5.0);  // jump term dominates
    CHECK(radius_update(3.0, {4, 0}, {3, 0}, {1, 0}) == 6.0);  // doubling dominates
    CHECK_THROWS_AS(radius_update(1.0, {1, 0}, {0, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("delta_lower_bound examples") {
    auto d1 = delta_lower_bound({0, 1}, {0, 0}, 0.01);
    REQUIRE(d1.has_value());
    CHECK(*d1 == doctest::Approx(std::sqrt(0.99) / 2).epsilon(1e-12));

    // (p-p')^T p == eps exactly: 0.125^2 and 2^-6 are both dyadic
    CHECK(!delta_lower_bound({0, 0.125}, {0, 0}, 0.015625).has_value());

    auto d3 = delta_lower_bound({0, std::sqrt(0.08)}, {0, 0}, 0.04);
    REQUIRE(d3.has_value());
    CHECK(*d3 == doctest::Approx(0.1).epsilon(1e-12));  // exactly sqrt(eps)/2
}

TEST_CASE("solve walks the identity doubling example exactly") {
    CapturedTrace tr;
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.r0 = 1.0;
    cfg.trace = tr.sink();
    SolveOutcome out = solve(DenseMatrix::identity(2), {2, 0}, cfg);

    CHECK(out.tag == SolveTag::EpsSolution);
    CHECK(out.x == Vector{2, 0});
    CHECK(out.residual <= 1e-12);
    CHECK(out.iterations == 3);
    REQUIRE(out.radius_history.size() == 2);
    CHECK(out.radius_history[0] == 1.0);
    CHECK(out.radius_history[1] == 2.0);

    REQUIRE(tr.rows.size() == 5);
    CHECK(tr.rows[0].event == "pivot");
    CHECK(tr.rows[0].iter == 1);
    CHECK(tr.rows[0].gap == doctest::Approx(2).epsilon(1e-12));
    CHECK(tr.rows[0].radius == 1.0);
    CHECK(tr.rows[0].alpha == 1.0);
    CHECK(tr.rows[1].event == "witness");
    CHECK(tr.rows[1].iter == 2);
    CHECK(tr.rows[1].gap == doctest::Approx(1).epsilon(1e-12));
    CHECK(tr.rows[2].event == "radius_update");
    CHECK(tr.rows[2].radius == 2.0);
    CHECK(tr.rows[3].event == "pivot");
    CHECK(tr.rows[3].iter == 3);
    CHECK(tr.rows[3].alpha == 1.0);
    CHECK(tr.rows[4].event == "near_point");
    CHECK(tr.rows[4].gap <= 1e-12);
}

TEST_CASE("solve certifies the rank-1 inconsistent system unsolvable") {
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    SolveOutcome out = solve(DenseMatrix(2, 2, {1, 0, 0, 0}), {0, 1}, cfg);
    CHECK(out.tag == SolveTag::Unsolvable);
    REQUIRE(out.delta_lower_bound.has_value());
    CHECK(*out.delta_lower_bound == doctest::Approx(0.05).epsilon(1e-12));
    // the oracle distance dominates the certified bound
    auto ls = least_squares_direct(DenseMatrix(2, 2, {1, 0, 0, 0}), {0, 1});
    CHECK(ls.delta >= *out.delta_lower_bound);
    CHECK(out.normal_residual <= cfg.epsilon);
}

TEST_CASE("solve stays within the 2x min-norm bound on a rank-deficient diagonal") {
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    SolveOutcome out = solve(DenseMatrix::diagonal({1, 1, 0}), {0.3, 0.4, 0}, cfg);
    CHECK(out.tag == SolveTag::EpsSolution);
    CHECK(out.residual <= cfg.epsilon);
    CHECK(norm2(out.x) <= 2 * 0.5 + 0.05);
}

TEST_CASE("solve short-circuits b = 0") {
    SolveOutcome out = solve(random_matrix(3, 4, 1), {0, 0, 0});
    CHECK(out.tag == SolveTag::EpsSolution);
    CHECK(out.x == Vector(4, 0.0));
    CHECK(out.iterations == 0);
    CHECK(out.radius_history.empty());
    CHECK(out.residual == 0.0);
}

TEST_CASE("solve validates its configuration") {
    DenseMatrix I = DenseMatrix::identity(2);
    Vector b = {1, 0};
    SolverConfig cfg;
    cfg.epsilon = 0;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    cfg.epsilon = 1;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    cfg = {};
    cfg.r0 = -1;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    cfg = {};
    cfg.r0 = 2;
    cfg.radius_cap = 1;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    cfg = {};
    cfg.max_iters_total = 0;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    cfg = {};
    cfg.sigma_star_hint = -2.0;
    CHECK_THROWS_AS(solve(I, b, cfg), std::invalid_argument);
    CHECK_THROWS_AS(solve(I, {1, 0, 0}, SolverConfig{}), std::invalid_argument);
}

TEST_CASE("tightened side conditions suppress Unsolvable in favor of NormalEq") {
    DenseMatrix A(2, 2, {1, 0, 0, 0});
    Vector b = {0, 1};
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.unsolvable_dot_threshold = 1e300;  // (p-p')^T p can never reach this
    SolveOutcome out = solve(A, b, cfg);
    CHECK(out.tag == SolveTag::NormalEqEpsSolution);
    CHECK(!out.delta_lower_bound.has_value());
    CHECK(out.normal_residual <= cfg.epsilon);
}

TEST_CASE("exhausted budgets yield Inconclusive with the best iterate") {
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.r0 = 1.0;
    cfg.max_iters_total = 1;
    SolveOutcome out = solve(DenseMatrix::identity(2), {2, 0}, cfg);
    CHECK(out.tag == SolveTag::Inconclusive);
    CHECK(out.iterations == 1);
    CHECK(out.x == Vector{1, 0});  // the single pivot it managed

    // Radius cap too small to certify anything: terminal witness with ||c|| large.
    SolverConfig cfg2;
    cfg2.epsilon = 0.01;
    cfg2.r0 = 1.0;
    cfg2.radius_cap = 1.0;
    SolveOutcome out2 = solve(DenseMatrix::identity(2), {2, 0}, cfg2);
    CHECK(out2.tag == SolveTag::Inconclusive);
}

TEST_CASE("radius history doubles or jumps, monotonically") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        DenseMatrix A = random_matrix(6, 5, 200 + seed);
        Vector x_true = random_vector(5, 300 + seed);
        Vector b = matvec(A, x_true);
        SolverConfig cfg;
        cfg.epsilon = 1e-4;
        cfg.r0 = 1e-3;  // force several escalations
        SolveOutcome out = solve(A, b, cfg);
        REQUIRE(out.tag == SolveTag::EpsSolution);
        REQUIRE(out.radius_history.size() >= 2);
        const double cap = norm2(b) * norm2(b) / cfg.epsilon;
        for (std::size_t i = 1; i < out.radius_history.size(); ++i) {
            const double prev = out.radius_history[i - 1], cur = out.radius_history[i];
            CHECK(cur > prev);
            CHECK((cur >= 2 * prev * (1 - 1e-12) || cur == cap));
        }
    }
}

TEST_CASE("witness jump radius is a certified exclusion bound") {
    // Identity case: the witness at r = 1 certifies no radius below 2 contains b.
    auto res = run_membership(DenseMatrix::identity(2), {2, 0}, 1.0, 0.01);
    REQUIRE(res.tag == MembershipTag::Witness);
    const double rlb = res.certificate->radius_lower_bound;
    CHECK(rlb == doctest::Approx(2).epsilon(1e-12));
    for (double frac : {0.3, 0.6, 0.9}) {
        auto proj = project_to_ellipsoid(DenseMatrix::identity(2), {2, 0}, frac * rlb);
        CHECK(proj.delta_r > 1e-10);
    }
    // Random instance: same exclusion property.
    DenseMatrix A = random_matrix(5, 3, 91);
    Vector b = random_vector(5, 92);
    auto res2 = run_membership(A, b, 0.05, 1e-3);
    REQUIRE(res2.tag == MembershipTag::Witness);
    const double rlb2 = res2.certificate->radius_lower_bound;
    REQUIRE(std::isfinite(rlb2));
    CHECK(rlb2 >= 0.05);
    for (double frac : {0.3, 0.6, 0.9}) {
        auto proj = project_to_ellipsoid(A, b, frac * rlb2);
        CHECK(proj.delta_r > 1e-10);
    }
}

TEST_CASE("outcome soundness against the oracles (small instances)") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        DenseMatrix A = random_matrix(8, 5, 400 + seed);
        const bool consistent = seed % 2 == 0;
        Vector b;
        if (consistent) {
            b = matvec(A, random_vector(5, 500 + seed));
        } else {
            b = random_vector(8, 500 + seed);  // generic b is inconsistent for 8x5
        }
        SolverConfig cfg;
        cfg.epsilon = 1e-2;
        SolveOutcome out = solve(A, b, cfg);
        INFO("seed ", seed, " tag ", solve_tag_name(out.tag));
        switch (out.tag) {
            case SolveTag::EpsSolution: {
                Vector resid = matvec(A, out.x);
                for (int i = 0; i < 8; ++i) resid[i] -= b[i];
                CHECK(norm2(resid) <= cfg.epsilon);
                break;
            }
            case SolveTag::NormalEqEpsSolution:
                CHECK(out.normal_residual <= cfg.epsilon);
                break;
            case SolveTag::Unsolvable:
                CHECK(least_squares_direct(A, b).delta >= *out.delta_lower_bound);
                break;
            case SolveTag::Inconclusive:
                FAIL("inconclusive on a tiny instance");
        }
    }
}

TEST_CASE("consistent solve with small r0 stays within the norm bound") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        DenseMatrix A = random_matrix(7, 4, 700 + seed);
        Vector b = matvec(A, random_vector(4, 800 + seed));
        auto ls = least_squares_direct(A, b);
        const double xs = norm2(ls.x_star);
        SolverConfig cfg;
        cfg.epsilon = 1e-3;
        cfg.r0 = xs / 4;  // guarantees at least one witness en route
        SolveOutcome out = solve(A, b, cfg);
        REQUIRE(out.tag == SolveTag::EpsSolution);
        CHECK(norm2(out.x) <= 2 * xs + 0.05);
    }
}

TEST_CASE("solve is deterministic apart from wall time") {
    DenseMatrix A = random_matrix(6, 4, 1234);
    Vector b = matvec(A, random_vector(4, 4321));
    SolverConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.r0 = 0.01;
    SolveOutcome a = solve(A, b, cfg), c = solve(A, b, cfg);
    CHECK(a.tag == c.tag);
    CHECK(a.iterations == c.iterations);
    CHECK(a.radius_history == c.radius_history);
    CHECK(std::memcmp(a.x.data(), c.x.data(), a.x.size() * sizeof(double)) == 0);
    CHECK(a.residual == c.residual);
}

TEST_CASE("min_norm_refine brackets the minimum norm") {
    SolverConfig cfg;
    cfg.epsilon = 1e-3;
    MinNormResult r1 = min_norm_refine(DenseMatrix::identity(2), {2, 0}, cfg, 4.0, 0.1);
    CHECK(r1.r_high >= 2.0 - 1e-9);
    CHECK(r1.r_high <= 2.1);
    CHECK(r1.r_high - r1.r_low <= 0.1);
    CHECK(r1.residual <= cfg.epsilon);
    CHECK(r1.x[0] == doctest::Approx(2).epsilon(1e-2));

    MinNormResult r2 = min_norm_refine(DenseMatrix::diagonal({2, 1}), {2, 0}, cfg, 4.0, 0.1);
    CHECK(r2.r_high >= 1.0 - 1e-9);
    CHECK(r2.r_high <= 1.1);
    CHECK(norm2(r2.x) <= r2.r_high * (1 + 1e-9));
}

TEST_CASE("min_norm_refine edge cases") {
    SolverConfig cfg;
    cfg.epsilon = 1e-3;
    // width >= r_feasible stops after the feasibility probe
    MinNormResult r = min_norm_refine(DenseMatrix::identity(2), {2, 0}, cfg, 4.0, 5.0);
    CHECK(r.r_low == 0.0);
    CHECK(r.r_high == 4.0);
    CHECK(r.residual <= cfg.epsilon);

    CHECK_THROWS_AS(min_norm_refine(DenseMatrix::identity(2), {2, 0}, cfg, 4.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(min_norm_refine(DenseMatrix::identity(2), {2, 0}, cfg, -1.0, 0.1),
                    std::invalid_argument);
    // r_feasible that does not admit an eps-solution is rejected
    CHECK_THROWS_AS(min_norm_refine(DenseMatrix::identity(2), {2, 0}, cfg, 0.5, 0.1),
                    std::invalid_argument);
}

TEST_CASE("outcome JSON carries the full report schema") {
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.r0 = 1.0;
    auto j = to_json(solve(DenseMatrix::identity(2), {2, 0}, cfg));
    CHECK(j["tag"] == "EpsSolution");
    CHECK(j["delta_lower_bound"].is_null());
    CHECK(j["radius_history"].size() == 2);
    CHECK(j.contains("residual"));
    CHECK(j.contains("normal_residual"));
    CHECK(j.contains("iterations"));
    CHECK(j.contains("wall_time_ms"));

    auto ju = to_json(solve(DenseMatrix(2, 2, {1, 0, 0, 0}), {0, 1}, cfg));
    CHECK(ju["tag"] == "Unsolvable");
    CHECK(ju["delta_lower_bound"].get<double>() == doctest::Approx(0.05));
}
