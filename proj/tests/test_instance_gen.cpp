#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "ta/instance_gen.hpp"
#include "ta/matrix_market.hpp"
#include "ta/oracles.hpp"

using namespace ta;

namespace {

struct TempPrefix {
    std::string prefix;
    explicit TempPrefix(const std::string& stem) : prefix("/tmp/ta_gen_" + stem) {}
    ~TempPrefix() {
        for (const char* suffix : {"_A.mtx", "_b.mtx", "_x.mtx", ".json"})
            std::remove((prefix + suffix).c_str());
    }
};

}  // namespace

TEST_CASE("uniform instances are uniform, consistent, and reproducible") {
    InstanceSpec spec{InstanceKind::GeneralUniform, 20, 15, 7, true};
    Instance inst = generate(spec);
    CHECK(inst.A.rows == 20);
    CHECK(inst.A.cols == 15);
    for (double v : inst.A.data) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
    REQUIRE(inst.x_true.has_value());
    Vector resid = matvec(inst.A, *inst.x_true);
    for (std::size_t i = 0; i < inst.b.size(); ++i) resid[i] -= inst.b[i];
    CHECK(norm2(resid) == 0.0);  // b is computed, not drawn

    Instance again = generate(spec);
    CHECK(std::memcmp(inst.A.data.data(), again.A.data.data(),
                      inst.A.data.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(inst.b.data(), again.b.data(), inst.b.size() * sizeof(double)) == 0);

    Instance other = generate({InstanceKind::GeneralUniform, 20, 15, 8, true});
    CHECK(inst.A.data != other.A.data);
}

TEST_CASE("gaussian instances differ from uniform and leave the unit box") {
    Instance inst = generate({InstanceKind::GeneralGaussian, 40, 30, 7, true});
    bool outside = false;
    for (double v : inst.A.data) outside = outside || v < 0.0 || v >= 1.0;
    CHECK(outside);
}

TEST_CASE("low-rank surgery zeroes exactly half the spectrum") {
    Instance inst = generate({InstanceKind::LowRank, 100, 100, 1, true});
    auto svd = jacobi_svd(inst.A);
    const double cutoff = 1e-12 * svd.sigma[0];
    int below = 0;
    for (double s : svd.sigma)
        if (s < cutoff) ++below;
    CHECK(below == 50);
}

TEST_CASE("ill-conditioned surgery pins the smallest singular value at 1e-3") {
    Instance inst = generate({InstanceKind::IllConditioned, 100, 100, 1, true});
    CHECK(smallest_positive_singular_value(inst.A) == doctest::Approx(0.001).epsilon(1e-6));
    auto svd = jacobi_svd(inst.A);
    CHECK(std::abs(svd.sigma.back() - 0.001) <= 1e-9);
    int pinned = 0;
    for (double s : svd.sigma)
        if (std::abs(s - 0.001) <= 1e-9) ++pinned;
    CHECK(pinned == 50);
}

TEST_CASE("rectangular surgery kinds work on both orientations") {
    for (auto [m, n] : {std::pair{30, 20}, std::pair{20, 30}}) {
        Instance inst = generate({InstanceKind::LowRank, m, n, 3, true});
        CHECK(inst.A.rows == m);
        CHECK(inst.A.cols == n);
        auto svd = jacobi_svd(inst.A);
        const double cutoff = 1e-12 * svd.sigma[0];
        int below = 0;
        for (double s : svd.sigma)
            if (s < cutoff) ++below;
        CHECK(below == 10);  // ceil(20/2)
    }
}

TEST_CASE("consistent instances have zero least-squares distance") {
    for (InstanceKind kind : {InstanceKind::GeneralUniform, InstanceKind::GeneralGaussian,
                              InstanceKind::LowRank, InstanceKind::IllConditioned}) {
        Instance inst = generate({kind, 25, 25, 42, true});
        auto ls = least_squares_direct(inst.A, inst.b);
        INFO(instance_kind_name(kind));
        CHECK(ls.delta <= 1e-10);
    }
}

TEST_CASE("inconsistent low-rank instances sit a unit away from the range") {
    Instance inst = generate({InstanceKind::LowRank, 30, 30, 5, false});
    CHECK(!inst.x_true.has_value());
    auto ls = least_squares_direct(inst.A, inst.b);
    CHECK(ls.delta >= 1.0 * (1 - 1e-8));  // z is a unit left-null vector
    CHECK(ls.delta <= 1.0 * (1 + 1e-8));
}

TEST_CASE("minimum-norm solutions obey the spectral bound") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        Instance inst = generate({InstanceKind::LowRank, 25, 25, seed, true});
        auto ls = least_squares_direct(inst.A, inst.b);
        const double sigma = smallest_positive_singular_value(inst.A);
        CHECK(norm2(ls.x_star) <= norm2(inst.b) / sigma * (1 + 1e-9));
    }
}

TEST_CASE("generate validates its spec") {
    CHECK_THROWS_AS(generate({InstanceKind::GeneralUniform, 0, 5, 1, true}),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate({InstanceKind::LowRank, 1, 5, 1, true}), std::invalid_argument);
    CHECK_THROWS_AS(generate({InstanceKind::GeneralUniform, 5, 5, 1, false}),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate({InstanceKind::IllConditioned, 5, 5, 1, false}),
                    std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
    for (InstanceKind kind : {InstanceKind::GeneralUniform, InstanceKind::GeneralGaussian,
                              InstanceKind::LowRank, InstanceKind::IllConditioned}) {
        CHECK(parse_instance_kind(instance_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_instance_kind("Sparse"), std::invalid_argument);
}

TEST_CASE("export writes matrices, vectors, and a sidecar") {
    TempPrefix tmp("export");
    InstanceSpec spec{InstanceKind::LowRank, 8, 6, 9, true};
    Instance inst = generate(spec);
    export_instance(spec, inst, tmp.prefix);

    DenseMatrix A = read_matrix_market(tmp.prefix + "_A.mtx");
    Vector b = read_vector_market(tmp.prefix + "_b.mtx");
    Vector x = read_vector_market(tmp.prefix + "_x.mtx");
    CHECK(std::memcmp(A.data.data(), inst.A.data.data(), A.data.size() * sizeof(double)) == 0);
    CHECK(b == inst.b);
    CHECK(x == *inst.x_true);

    std::ifstream side(tmp.prefix + ".json");
    REQUIRE(side.good());
    std::stringstream ss;
    ss << side.rdbuf();
    const std::string body = ss.str();
    CHECK(body.find("\"kind\"") != std::string::npos);
    CHECK(body.find("LowRank") != std::string::npos);
    CHECK(body.find("\"seed\"") != std::string::npos);

    // inconsistent instances do not write an x file
    TempPrefix tmp2("export_inc");
    InstanceSpec spec2{InstanceKind::LowRank, 8, 6, 9, false};
    export_instance(spec2, generate(spec2), tmp2.prefix);
    std::ifstream missing(tmp2.prefix + "_x.mtx");
    CHECK(!missing.good());
}
