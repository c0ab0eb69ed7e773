#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "ta/la_core.hpp"

namespace ta {

enum class PivotMode { standard, strict };

// Streamed per-iteration trace. CSV schema: iter,gap,radius,alpha,event.
struct TraceRecord {
    long iter = 0;       // loop-pass index (1-based)
    double gap = 0;      // ||p - p'|| at the start of the pass
    double radius = 0;   // radius in force for the pass
    double alpha = 0;    // step size taken (0 for non-step events)
    const char* event = "";  // pivot | witness | near_point | iteration_cap | radius_update
};
using TraceSink = std::function<void(const TraceRecord&)>;

// Live state of the membership iteration on C_{A,r} = {Ax : ||x|| <= r}.
struct MembershipState {
    Vector p;         // the target b
    Vector p_prime;   // current iterate inside C_{A,r}
    Vector x_prime;   // preimage: p_prime = A x_prime, ||x_prime|| <= r
    double r = 0;
    Vector c;         // A^T (p - p')
    double gap = 0;   // ||p - p'||
    long iterations = 0;  // passes that ended in a pivot, witness, or cap
    double p_norm_sq = 0;  // cached ||p||^2 (drives the pivot test and fp slack)
};

// A witness p' proves b lies outside C_{A,r}: the distance delta_r from b to the
// ellipsoid is bracketed by [gap/2, gap], and no radius below radius_lower_bound
// can contain b.
struct WitnessCertificate {
    Vector p_prime;
    Vector x_prime;
    double gap = 0;
    double delta_lower = 0;          // gap/2
    double delta_upper = 0;          // gap
    double radius_lower_bound = 0;   // (p-p')^T p / ||c||; +inf when c = 0
};

enum class MembershipTag { NearPoint, Witness, IterationCapReached };

struct MembershipResult {
    MembershipTag tag = MembershipTag::NearPoint;
    MembershipState state;
    std::optional<WitnessCertificate> certificate;
};

// c = A^T (p - p').
Vector direction(const DenseMatrix& A, const Vector& p, const Vector& p_prime);

// v_r = r * A * c / ||c||: image of the ball point maximizing c^T x. Throws on c = 0.
Vector pivot_point(const DenseMatrix& A, const Vector& c, double r);

enum class PivotCheck { Pivot, NoPivot };
enum class StrictPivotCheck { StrictPivot, NoStrictPivot };

// Pivot iff r||c|| >= (||p||^2 - ||p'||^2)/2, with an absolute floating-point
// slack of 1e-12*(1+||p||^2); equality counts as Pivot.
PivotCheck pivot_test(double r, const Vector& c, const Vector& p, const Vector& p_prime);

// StrictPivot iff r||c|| >= (p-p')^T p, same slack convention.
StrictPivotCheck strict_pivot_test(double r, const Vector& c, const Vector& p,
                                   const Vector& p_prime);

// One Frank-Wolfe step toward v_r: alpha = min{1, (p-p')^T(v_r-p')/||v_r-p'||^2},
// returns ((1-alpha) p' + alpha v_r, (1-alpha) x' + alpha x_v). x_v must be the
// ball preimage r c/||c|| of v_r. Throws when v_r == p'.
std::pair<Vector, Vector> step(const Vector& p, const Vector& p_prime, const Vector& v_r,
                               const Vector& x_prime, const Vector& x_v);

// Iteration budget 100*ceil((r*||A||/eps)^2), capped at 1e7.
long default_membership_iters(const DenseMatrix& A, double r, double epsilon);

// Algorithm: starting from p' = 0, pivot until ||p - p'|| <= eps (NearPoint), a
// pivot test fails or c vanishes (Witness with certificate), or the budget runs
// out (IterationCapReached, best state attached). max_iters = 0 uses the default
// budget formula.
MembershipResult run_membership(const DenseMatrix& A, const Vector& b, double r, double epsilon,
                                long max_iters = 0, PivotMode mode = PivotMode::standard,
                                const TraceSink& sink = {});

namespace detail {

enum class PassOutcome { Converged, Pivoted, WitnessFound, ZeroDirection };

// One pass of the loop body shared by run_membership and the solver driver.
// Refreshes gap and c, emits the pass's trace record, and either converges,
// takes a pivot step, or reports a witness.
PassOutcome advance(const DenseMatrix& A, MembershipState& st, double epsilon, PivotMode mode,
                    const TraceSink& sink);

MembershipState init_state(const DenseMatrix& A, const Vector& b, double r);

WitnessCertificate make_certificate(const MembershipState& st);

}  // namespace detail

}  // namespace ta
