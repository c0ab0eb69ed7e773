#include "ta/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace ta {

namespace {

constexpr double kBreakdown = 1e-300;

void axpy(double a, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

const char* baseline_method_name(BaselineMethod m) {
    return m == BaselineMethod::BiCGSTAB ? "BiCGSTAB" : "SteepestDescentNormal";
}

const char* baseline_tag_name(const BaselineReport& rep) {
    if (rep.converged) return "Converged";
    if (rep.breakdown) return "Breakdown";
    return "NotConverged";
}

BaselineReport bicgstab(const DenseMatrix& A, const Vector& b, double tol, long max_iters,
                        Preconditioner precond) {
    if (A.rows != A.cols) throw std::invalid_argument("bicgstab: A must be square");
    if (int(b.size()) != A.rows) throw std::invalid_argument("bicgstab: b.len != A.rows");
    if (tol <= 0) throw std::invalid_argument("bicgstab: tol must be positive");
    require_finite(b, "bicgstab: b");

    const int n = A.rows;
    Vector dinv(n, 1.0);  // Jacobi preconditioner M^{-1}; identity when disabled
    if (precond == Preconditioner::jacobi) {
        for (int i = 0; i < n; ++i) dinv[i] = A(i, i) != 0.0 ? 1.0 / A(i, i) : 1.0;
    }
    auto apply_precond = [&](const Vector& v) {
        Vector y(v.size());
        for (int i = 0; i < n; ++i) y[i] = dinv[i] * v[i];
        return y;
    };

    BaselineReport rep;
    rep.method = BaselineMethod::BiCGSTAB;
    rep.x.assign(std::size_t(n), 0.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        rep.converged = true;
        return rep;
    }
    const double target = tol * bnorm;

    Vector r = b;  // residual for x = 0
    Vector r_hat = r;
    Vector p(n, 0.0), v(n, 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    for (long it = 1; it <= max_iters; ++it) {
        const double rho_new = dot(r_hat, r);
        if (std::abs(rho_new) < kBreakdown) {
            rep.breakdown = "rho underflow";
            break;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        const Vector y = apply_precond(p);
        v = matvec(A, y);
        const double rhv = dot(r_hat, v);
        if (std::abs(rhv) < kBreakdown) {
            rep.breakdown = "rho/(r_hat.v) underflow";
            break;
        }
        alpha = rho / rhv;
        Vector s = r;
        axpy(-alpha, v, s);
        axpy(alpha, y, rep.x);
        rep.iterations = it;
        if (norm2(s) <= target) break;  // early exit on the half-step residual

        const Vector z = apply_precond(s);
        const Vector t = matvec(A, z);
        const double tt = dot(t, t);
        if (tt < kBreakdown) {
            rep.breakdown = "t.t underflow";
            break;
        }
        omega = dot(t, s) / tt;
        if (std::abs(omega) < kBreakdown) {
            rep.breakdown = "omega underflow";
            break;
        }
        axpy(omega, z, rep.x);
        r = s;
        axpy(-omega, t, r);
        if (norm2(r) <= target) break;
    }

    // Report the true residual, not the recursively updated one.
    Vector resid = matvec(A, rep.x);
    for (int i = 0; i < n; ++i) resid[i] -= b[i];
    rep.residual = norm2(resid);
    rep.converged = rep.residual <= target;
    return rep;
}

BaselineReport steepest_descent_normal(const DenseMatrix& A, const Vector& b, double tol,
                                       long max_iters) {
    if (int(b.size()) != A.rows) throw std::invalid_argument("steepest_descent_normal: size mismatch");
    if (tol <= 0) throw std::invalid_argument("steepest_descent_normal: tol must be positive");
    require_finite(b, "steepest_descent_normal: b");

    BaselineReport rep;
    rep.method = BaselineMethod::SteepestDescentNormal;
    rep.x.assign(std::size_t(A.cols), 0.0);

    Vector resid(b.size());  // A x - b
    for (std::size_t i = 0; i < b.size(); ++i) resid[i] = -b[i];

    for (long it = 0; it <= max_iters; ++it) {
        const Vector g = transpose_matvec(A, resid);  // gradient of 0.5||Ax-b||^2
        const double gn = norm2(g);
        rep.residual = gn;
        if (gn <= tol) {
            rep.converged = true;
            return rep;
        }
        if (it == max_iters) break;
        const Vector Ag = matvec(A, g);
        const double denom = dot(Ag, Ag);
        if (denom == 0.0) break;  // g in null(A): cannot happen with gn > 0
        const double step = (gn * gn) / denom;
        axpy(-step, g, rep.x);
        axpy(-step, Ag, resid);
        rep.iterations = it + 1;
    }
    return rep;
}

nlohmann::json to_json(const BaselineReport& rep, double normal_residual, double wall_time_ms) {
    nlohmann::json j;
    j["tag"] = baseline_tag_name(rep);
    j["residual"] = rep.residual;
    j["normal_residual"] = normal_residual;
    j["delta_lower_bound"] = nullptr;
    j["iterations"] = rep.iterations;
    j["radius_history"] = nlohmann::json::array();
    j["wall_time_ms"] = wall_time_ms;
    if (rep.breakdown) j["breakdown"] = *rep.breakdown;
    return j;
}

}  // namespace ta
