#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "ta/la_core.hpp"

namespace ta {

enum class BaselineMethod { BiCGSTAB, SteepestDescentNormal };
enum class Preconditioner { none, jacobi };

struct BaselineReport {
    BaselineMethod method = BaselineMethod::BiCGSTAB;
    Vector x;
    // For BiCGSTAB: ||Ax - b||. For SteepestDescentNormal: ||A^T(Ax - b)||, the
    // quantity its tolerance governs (the plain residual need not shrink on
    // inconsistent systems).
    double residual = 0;
    long iterations = 0;
    bool converged = false;
    std::optional<std::string> breakdown;
};

// Textbook BiCGSTAB on a square system; converged iff ||Ax - b|| <= tol * ||b||.
// rho/omega underflow below 1e-300 stops with a breakdown report (no restarts).
BaselineReport bicgstab(const DenseMatrix& A, const Vector& b, double tol, long max_iters,
                        Preconditioner precond = Preconditioner::none);

// Exact-line-search gradient descent on 0.5*||Ax - b||^2 (works on any shape);
// converged iff ||A^T A x - A^T b|| <= tol (absolute).
BaselineReport steepest_descent_normal(const DenseMatrix& A, const Vector& b, double tol,
                                       long max_iters);

// Same report schema as the solver's outcome JSON; radius_history is empty and
// delta_lower_bound null. normal_residual/wall time are supplied by the caller,
// which times the run and can recompute both residual flavors from x.
nlohmann::json to_json(const BaselineReport& rep, double normal_residual, double wall_time_ms);

const char* baseline_method_name(BaselineMethod m);
const char* baseline_tag_name(const BaselineReport& rep);  // Converged | Breakdown | NotConverged

}  // namespace ta
