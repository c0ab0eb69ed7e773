#include "ta/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ta {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

Vector sub(const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

struct ResolvedConfig {
    double r0, radius_cap, normal_eq_tol, unsolvable_closeness_tol, unsolvable_dot_threshold;
};

ResolvedConfig resolve(const DenseMatrix& A, const Vector& b, const SolverConfig& cfg) {
    if (!(cfg.epsilon > 0 && cfg.epsilon < 1))
        throw std::invalid_argument("solve: epsilon must lie in (0,1)");
    if (cfg.r0 < 0 || cfg.radius_cap < 0) throw std::invalid_argument("solve: negative radius");
    if (cfg.r0 > 0 && cfg.radius_cap > 0 && cfg.radius_cap < cfg.r0)
        throw std::invalid_argument("solve: radius_cap < r0");
    if (cfg.max_iters_total < 1) throw std::invalid_argument("solve: max_iters_total must be >= 1");

    ResolvedConfig rc;
    const double bn = norm2(b);
    if (cfg.r0 > 0) {
        rc.r0 = cfg.r0;
    } else {
        const double sigma = operator_norm_estimate(A);
        rc.r0 = sigma > 0 ? bn / sigma : 1.0;  // A = 0 never pivots; r0 is moot
    }
    if (cfg.radius_cap > 0) {
        rc.radius_cap = cfg.radius_cap;
    } else if (cfg.sigma_star_hint) {
        const double s = *cfg.sigma_star_hint;
        if (s <= 0) throw std::invalid_argument("solve: sigma_star_hint must be positive");
        rc.radius_cap = bn / cfg.epsilon * std::max(bn, 2.0 / s);
    } else {
        rc.radius_cap = bn * bn / cfg.epsilon;
    }
    if (rc.radius_cap < rc.r0) rc.radius_cap = rc.r0;  // harmonize auto defaults
    rc.normal_eq_tol = cfg.normal_eq_tol > 0 ? cfg.normal_eq_tol : cfg.epsilon;
    rc.unsolvable_closeness_tol =
        cfg.unsolvable_closeness_tol > 0 ? cfg.unsolvable_closeness_tol : cfg.epsilon;
    rc.unsolvable_dot_threshold =
        cfg.unsolvable_dot_threshold > 0 ? cfg.unsolvable_dot_threshold : 2.0 * cfg.epsilon;
    return rc;
}

}  // namespace

const char* solve_tag_name(SolveTag tag) {
    switch (tag) {
        case SolveTag::EpsSolution: return "EpsSolution";
        case SolveTag::NormalEqEpsSolution: return "NormalEqEpsSolution";
        case SolveTag::Unsolvable: return "Unsolvable";
        case SolveTag::Inconclusive: return "Inconclusive";
    }
    return "?";
}

double radius_update(double r, const Vector& p, const Vector& p_prime, const Vector& c) {
    const double nc = norm2(c);
    if (nc == 0.0)
        throw std::invalid_argument("radius_update: c = 0 (route to unsolvability handling)");
    const double jump = dot(sub(p, p_prime), p) / nc;
    return std::max(jump, 2.0 * r);
}

std::optional<double> delta_lower_bound(const Vector& p, const Vector& p_prime, double epsilon) {
    const double dp = dot(sub(p, p_prime), p);
    if (dp <= epsilon) return std::nullopt;
    return std::sqrt((dp - epsilon) / 4.0);
}

SolveOutcome solve(const DenseMatrix& A, const Vector& b, const SolverConfig& cfg) {
    const auto t0 = clock_type::now();
    if (int(b.size()) != A.rows) throw std::invalid_argument("solve: b.len != A.rows");
    require_finite(b, "solve: b");

    SolveOutcome out;
    out.x.assign(std::size_t(A.cols), 0.0);
    if (norm2(b) == 0.0) {  // b = 0: x = 0 solves exactly
        out.tag = SolveTag::EpsSolution;
        out.wall_time_ms = ms_since(t0);
        return out;
    }

    const ResolvedConfig rc = resolve(A, b, cfg);
    MembershipState st = detail::init_state(A, b, rc.r0);
    out.radius_history.push_back(rc.r0);

    // Progress-audit bookkeeping (reset at every witness-driven radius change).
    long stall_mark = cfg.stall_window > 0 ? cfg.stall_window : -1;
    double stall_gap = st.gap;
    double audit_prev_rate = -1;  // rate before the last audit escalation; <0 none
    double audit_prev_r = 0;      // radius before the last audit escalation
    bool audit_saturated = false;

    bool done = false;
    while (!done) {
        if (st.iterations >= cfg.max_iters_total) {
            if (cfg.trace) cfg.trace({st.iterations, st.gap, st.r, 0.0, "iteration_cap"});
            out.tag = SolveTag::Inconclusive;
            break;
        }
        if (stall_mark > 0 && st.iterations >= stall_mark) {
            // Progress audit. The terminal pivot phase speeds up with the
            // radius until the gain peaks, and the witness that would force
            // an escalation anyway is an O(1/k) tail away -- so escalate
            // whenever eps is more than ~20 windows out at the current rate.
            // One window after each escalation, settle the bill: a worse rate
            // means the ladder overshot the peak, so fall back to the radius
            // that was working; a gain under 1.3x means it has flattened out.
            // Either way stop climbing and grind. A flat window (the gap is
            // sinking toward a positive floor below which only a larger
            // ellipsoid can dig) still forces an escalation at any point.
            const double rate = std::log(stall_gap / st.gap);  // e-folds per window
            const double need = std::log(st.gap / cfg.epsilon);
            const double flat_rate = -std::log1p(-cfg.stall_rel_drop);
            const bool flat = rate < flat_rate;
            bool fell_back = false;
            if (audit_prev_rate >= 0) {
                if (rate < audit_prev_rate && audit_prev_rate > flat_rate) {
                    st.r = audit_prev_r;
                    if (cfg.trace)
                        cfg.trace({st.iterations, st.gap, st.r, 0.0, "radius_update"});
                    audit_saturated = true;
                    fell_back = true;
                } else if (rate < 1.3 * audit_prev_rate) {
                    audit_saturated = true;
                }
                audit_prev_rate = -1;
            }
            if (!fell_back && (flat || (!audit_saturated && need > 20.0 * rate))) {
                if (st.r >= rc.radius_cap) {
                    if (flat) {
                        out.tag = SolveTag::Inconclusive;  // dead at the cap
                        break;
                    }
                    audit_saturated = true;  // no headroom; grind within budget
                } else {
                    audit_prev_rate = rate;
                    audit_prev_r = st.r;
                    st.r = std::min(4.0 * st.r, rc.radius_cap);
                    out.radius_history.push_back(st.r);
                    if (cfg.trace)
                        cfg.trace({st.iterations, st.gap, st.r, 0.0, "radius_update"});
                }
            }
            stall_gap = st.gap;
            stall_mark = st.iterations + cfg.stall_window;
        }

        switch (detail::advance(A, st, cfg.epsilon, cfg.pivot_mode, cfg.trace)) {
            case detail::PassOutcome::Converged:
                if (cfg.trace) cfg.trace({st.iterations, st.gap, st.r, 0.0, "near_point"});
                out.tag = SolveTag::EpsSolution;
                done = true;
                break;
            case detail::PassOutcome::Pivoted:
                break;
            case detail::PassOutcome::ZeroDirection:
            case detail::PassOutcome::WitnessFound: {
                const double nc = norm2(st.c);
                if (nc == 0.0 || st.r >= rc.radius_cap) {
                    // Terminal witness: classify per the normal-equation and
                    // unsolvability side conditions.
                    const double dp = dot(sub(st.p, st.p_prime), st.p);
                    if (nc <= rc.normal_eq_tol) {
                        if (std::abs(dp - st.gap * st.gap) <= rc.unsolvable_closeness_tol &&
                            dp >= rc.unsolvable_dot_threshold) {
                            out.tag = SolveTag::Unsolvable;
                            out.delta_lower_bound = std::sqrt(cfg.epsilon) / 2.0;
                        } else {
                            out.tag = SolveTag::NormalEqEpsSolution;
                        }
                    } else {
                        out.tag = SolveTag::Inconclusive;  // cap too small to certify anything
                    }
                    done = true;
                    break;
                }
                const double next = std::min(radius_update(st.r, st.p, st.p_prime, st.c),
                                             rc.radius_cap);
                st.r = next;
                out.radius_history.push_back(next);
                if (cfg.trace) cfg.trace({st.iterations, st.gap, st.r, 0.0, "radius_update"});
                stall_gap = st.gap;
                if (stall_mark > 0) stall_mark = st.iterations + cfg.stall_window;
                audit_prev_rate = -1;  // fresh geometry: allow audits to escalate again
                audit_saturated = false;
                break;
            }
        }
    }

    out.x = st.x_prime;
    out.iterations = st.iterations;
    const Vector resid = sub(matvec(A, out.x), b);
    out.residual = norm2(resid);
    out.normal_residual = norm2(transpose_matvec(A, resid));
    out.wall_time_ms = ms_since(t0);
    return out;
}

MinNormResult min_norm_refine(const DenseMatrix& A, const Vector& b, const SolverConfig& cfg,
                              double r_feasible, double width) {
    if (width <= 0) throw std::invalid_argument("min_norm_refine: width must be positive");
    if (r_feasible <= 0) throw std::invalid_argument("min_norm_refine: r_feasible must be positive");

    auto probe = [&](double r) { return run_membership(A, b, r, cfg.epsilon, 0, cfg.pivot_mode); };

    MembershipResult at_high = probe(r_feasible);
    if (at_high.tag != MembershipTag::NearPoint)
        throw std::invalid_argument("min_norm_refine: r_feasible does not admit an eps-solution");

    MinNormResult res;
    res.r_low = 0.0;
    res.r_high = r_feasible;
    Vector best = at_high.state.x_prime;
    while (res.r_high - res.r_low > width) {
        const double mid = 0.5 * (res.r_low + res.r_high);
        MembershipResult pr = probe(mid);
        if (pr.tag == MembershipTag::NearPoint) {
            res.r_high = mid;
            best = pr.state.x_prime;
        } else {
            res.r_low = mid;
        }
    }
    res.x = std::move(best);
    res.residual = norm2(sub(matvec(A, res.x), b));
    return res;
}

nlohmann::json to_json(const SolveOutcome& out) {
    nlohmann::json j;
    j["tag"] = solve_tag_name(out.tag);
    j["residual"] = out.residual;
    j["normal_residual"] = out.normal_residual;
    if (out.delta_lower_bound)
        j["delta_lower_bound"] = *out.delta_lower_bound;
    else
        j["delta_lower_bound"] = nullptr;
    j["iterations"] = out.iterations;
    j["radius_history"] = out.radius_history;
    j["wall_time_ms"] = out.wall_time_ms;
    return j;
}

}  // namespace ta
