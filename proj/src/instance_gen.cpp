#include "ta/instance_gen.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "ta/matrix_market.hpp"
#include "ta/oracles.hpp"

namespace ta {

namespace {

Vector draw(std::mt19937_64& rng, int len, bool gaussian) {
    Vector v(len);
    if (gaussian) {
        std::normal_distribution<double> d(0.0, 1.0);
        for (double& t : v) t = d(rng);
    } else {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        for (double& t : v) t = d(rng);
    }
    return v;
}

// A = U(:,1:k) diag(sigma) V(:,1:k)^T for square orthogonal U (m x m), V (n x n).
DenseMatrix compose_svd(const DenseMatrix& U, const Vector& sigma, const DenseMatrix& V) {
    const int m = U.rows, n = V.rows, k = int(sigma.size());
    DenseMatrix Vt(k, n);  // rows of Vt are the leading columns of V
    for (int j = 0; j < k; ++j)
        for (int l = 0; l < n; ++l) Vt(j, l) = V(l, j);
    DenseMatrix A(m, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (m >= 64)
#endif
    for (int i = 0; i < m; ++i) {
        double* out = A.row(i);
        for (int j = 0; j < k; ++j) {
            const double bij = sigma[j] * U(i, j);
            if (bij == 0.0) continue;
            const double* vrow = Vt.row(j);
            for (int l = 0; l < n; ++l) out[l] += bij * vrow[l];
        }
    }
    return A;
}

}  // namespace

const char* instance_kind_name(InstanceKind k) {
    switch (k) {
        case InstanceKind::GeneralUniform: return "GeneralUniform";
        case InstanceKind::GeneralGaussian: return "GeneralGaussian";
        case InstanceKind::LowRank: return "LowRank";
        case InstanceKind::IllConditioned: return "IllConditioned";
    }
    return "?";
}

InstanceKind parse_instance_kind(const std::string& name) {
    if (name == "GeneralUniform" || name == "uniform") return InstanceKind::GeneralUniform;
    if (name == "GeneralGaussian" || name == "gaussian") return InstanceKind::GeneralGaussian;
    if (name == "LowRank" || name == "lowrank") return InstanceKind::LowRank;
    if (name == "IllConditioned" || name == "illconditioned") return InstanceKind::IllConditioned;
    throw std::invalid_argument("unknown instance kind: " + name);
}

Instance generate(const InstanceSpec& spec) {
    if (spec.m < 1 || spec.n < 1)
        throw std::invalid_argument("generate: dimensions must be positive");
    const bool surgery =
        spec.kind == InstanceKind::LowRank || spec.kind == InstanceKind::IllConditioned;
    if (surgery && std::min(spec.m, spec.n) < 2)
        throw std::invalid_argument("generate: LowRank/IllConditioned need min(m,n) >= 2");
    if (!spec.consistent && spec.kind != InstanceKind::LowRank)
        throw std::invalid_argument(
            "generate: inconsistent right-hand sides need the rank-deficient LowRank kind");

    std::mt19937_64 rng(spec.seed);
    const bool gaussian = spec.kind == InstanceKind::GeneralGaussian;

    Instance inst;
    DenseMatrix U;  // left factor, kept for the inconsistent perturbation
    if (!surgery) {
        inst.A = DenseMatrix(spec.m, spec.n);
        inst.A.data = draw(rng, spec.m * spec.n, gaussian);
    } else {
        // Spectrum of a fresh uniform draw, smallest ceil(k/2) overwritten.
        DenseMatrix G(spec.m, spec.n);
        G.data = draw(rng, spec.m * spec.n, false);
        Vector sigma = jacobi_singular_values(G);
        const int k = int(sigma.size());
        const int zeroed = (k + 1) / 2;
        const double fill = spec.kind == InstanceKind::LowRank ? 0.0 : 1e-3;
        for (int j = k - zeroed; j < k; ++j) sigma[j] = fill;
        const std::uint64_t seed_u = rng();
        const std::uint64_t seed_v = rng();
        U = random_orthogonal(spec.m, seed_u);
        DenseMatrix V = random_orthogonal(spec.n, seed_v);
        inst.A = compose_svd(U, sigma, V);
    }

    Vector x = draw(rng, spec.n, gaussian);  // surgery kinds use the uniform base draw
    inst.b = matvec(inst.A, x);
    if (spec.consistent) {
        inst.x_true = std::move(x);
    } else {
        // Unit vector orthogonal to range(A): a U column paired with a zeroed
        // singular value (at least ceil(k/2) >= 1 were zeroed, so column k-1
        // qualifies).
        const int k = std::min(spec.m, spec.n);
        for (int i = 0; i < spec.m; ++i) inst.b[i] += U(i, k - 1);
    }
    return inst;
}

void export_instance(const InstanceSpec& spec, const Instance& inst, const std::string& prefix) {
    write_matrix_market(inst.A, prefix + "_A.mtx");
    write_matrix_market(inst.b, prefix + "_b.mtx");
    if (inst.x_true) write_matrix_market(*inst.x_true, prefix + "_x.mtx");
    nlohmann::json j;
    j["kind"] = instance_kind_name(spec.kind);
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["seed"] = spec.seed;
    j["consistent"] = spec.consistent;
    std::ofstream out(prefix + ".json");
    if (!out) throw std::runtime_error("export_instance: cannot write " + prefix + ".json");
    out << j.dump(2) << "\n";
}

}  // namespace ta
