#pragma once

#include <optional>

#include "json.hpp"
#include "ta/membership.hpp"

namespace ta {

// All zeroable fields default to "auto" (resolved from A, b, epsilon at solve time):
//   r0          -> ||b|| / operator_norm_estimate(A)
//   radius_cap  -> ||b||^2/epsilon, or (||b||/epsilon)*max{||b||, 2/sigma*} when
//                  sigma_star_hint is given (the tighter certified cap)
//   normal_eq_tol, unsolvable_closeness_tol -> epsilon
//   unsolvable_dot_threshold -> 2*epsilon
// The two unsolvable_* guards are the side conditions of the Unsolvable tag;
// raising them suppresses that tag in favor of NormalEqEpsSolution.
struct SolverConfig {
    double epsilon = 1e-3;
    double r0 = 0;
    double radius_cap = 0;
    PivotMode pivot_mode = PivotMode::standard;
    long max_iters_total = 10'000'000;
    double normal_eq_tol = 0;
    std::optional<double> sigma_star_hint;
    double unsolvable_closeness_tol = 0;
    double unsolvable_dot_threshold = 0;
    // Progress audit every stall_window passes: escalate the radius early when
    // the gap shrank by less than stall_rel_drop relative over the window, or
    // when extrapolating the window's contraction rate shows epsilon is more
    // than ~20 windows away at the current radius. A stalled gap is sinking
    // toward a positive floor, and the witness that would trigger the
    // escalation anyway is an O(1/k) tail away. The contraction rate as a
    // function of the radius is single-peaked, so each escalation is audited
    // one window later: if the rate got worse the radius falls back to the
    // previous value, and once the gain per escalation fades the ladder stops
    // and the solve grinds at the best radius found. 0 disables the audit.
    long stall_window = 25000;
    double stall_rel_drop = 1e-3;
    TraceSink trace;
};

enum class SolveTag { EpsSolution, NormalEqEpsSolution, Unsolvable, Inconclusive };

const char* solve_tag_name(SolveTag tag);

struct SolveOutcome {
    SolveTag tag = SolveTag::Inconclusive;
    Vector x;
    double residual = 0;         // ||A x - b||, recomputed fresh at exit
    double normal_residual = 0;  // ||A^T (A x - b)||, recomputed fresh at exit
    std::optional<double> delta_lower_bound;  // present iff tag == Unsolvable
    std::vector<double> radius_history;       // escalation ladder: r0 + every increase
    long iterations = 0;
    double wall_time_ms = 0;
};

struct MinNormResult {
    Vector x;
    double r_low = 0;
    double r_high = 0;
    double residual = 0;
};

// Radius escalation after a witness at radius r: max{(p-p')^T p/||c||, 2r}.
// The first term is a certified lower bound on any radius whose ellipsoid
// contains p, so the result always exceeds r. Throws on c = 0.
double radius_update(double r, const Vector& p, const Vector& p_prime, const Vector& c);

// Certified lower bound on Delta = min ||Ax - b|| from a terminal witness:
// sqrt(((p-p')^T p - epsilon)/4) when (p-p')^T p > epsilon, else absent.
// Caller must have checked ||c|| <= epsilon and |(p-p')^T p - gap^2| <= epsilon.
std::optional<double> delta_lower_bound(const Vector& p, const Vector& p_prime, double epsilon);

// Full driver: membership passes with witness-triggered radius escalation up to
// radius_cap. Outcomes:
//   EpsSolution           gap <= epsilon reached (residual recomputed <= epsilon);
//   Unsolvable            terminal witness with ||c|| <= normal_eq_tol and both
//                         side conditions met; delta_lower_bound = sqrt(eps)/2;
//   NormalEqEpsSolution   terminal witness with ||c|| <= normal_eq_tol only;
//   Inconclusive          budgets exhausted without a verdict (iteration cap,
//                         or stalled at the radius cap); best iterate attached.
//                         Never a silent wrong answer.
// A terminal witness is one at the radius cap, or any witness with c = 0
// (no radius can help: b has a component outside range(A)).
SolveOutcome solve(const DenseMatrix& A, const Vector& b, const SolverConfig& cfg = {});

// Remark-style bisection on the radius: shrink [r_low, r_high] over [0, r_feasible]
// keeping "r_high admits an eps-solution, r_low does not" until the bracket is
// narrower than width; returns the eps-solution found at r_high.
MinNormResult min_norm_refine(const DenseMatrix& A, const Vector& b, const SolverConfig& cfg,
                              double r_feasible, double width);

// {tag, residual, normal_residual, delta_lower_bound, iterations, radius_history,
//  wall_time_ms}; delta_lower_bound serializes as null when absent.
nlohmann::json to_json(const SolveOutcome& out);

}  // namespace ta
