#include "ta/membership.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ta {

namespace {

double fp_slack(double p_norm_sq) { return 1e-12 * (1.0 + p_norm_sq); }

Vector sub(const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

}  // namespace

Vector direction(const DenseMatrix& A, const Vector& p, const Vector& p_prime) {
    return transpose_matvec(A, sub(p, p_prime));
}

Vector pivot_point(const DenseMatrix& A, const Vector& c, double r) {
    if (r <= 0) throw std::invalid_argument("pivot_point: r must be positive");
    const double nc = norm2(c);
    if (nc == 0.0) throw std::invalid_argument("pivot_point: c = 0 (witness; no pivot direction)");
    Vector v = matvec(A, c);
    const double s = r / nc;
    for (double& t : v) t *= s;
    return v;
}

PivotCheck pivot_test(double r, const Vector& c, const Vector& p, const Vector& p_prime) {
    const double pn2 = dot(p, p);
    const double rhs = 0.5 * (pn2 - dot(p_prime, p_prime));
    return r * norm2(c) >= rhs - fp_slack(pn2) ? PivotCheck::Pivot : PivotCheck::NoPivot;
}

StrictPivotCheck strict_pivot_test(double r, const Vector& c, const Vector& p,
                                   const Vector& p_prime) {
    const double pn2 = dot(p, p);
    const double rhs = dot(sub(p, p_prime), p);
    return r * norm2(c) >= rhs - fp_slack(pn2) ? StrictPivotCheck::StrictPivot
                                               : StrictPivotCheck::NoStrictPivot;
}

std::pair<Vector, Vector> step(const Vector& p, const Vector& p_prime, const Vector& v_r,
                               const Vector& x_prime, const Vector& x_v) {
    const Vector dv = sub(v_r, p_prime);
    const double denom = dot(dv, dv);
    if (denom == 0.0) throw std::invalid_argument("step: v_r == p' (degenerate pivot)");
    const double raw = dot(sub(p, p_prime), dv) / denom;
    const double alpha = raw < 1.0 ? raw : 1.0;
    Vector p2(p_prime.size()), x2(x_prime.size());
    for (std::size_t i = 0; i < p2.size(); ++i) p2[i] = (1 - alpha) * p_prime[i] + alpha * v_r[i];
    for (std::size_t i = 0; i < x2.size(); ++i) x2[i] = (1 - alpha) * x_prime[i] + alpha * x_v[i];
    return {std::move(p2), std::move(x2)};
}

long default_membership_iters(const DenseMatrix& A, double r, double epsilon) {
    const double ratio = r * operator_norm_estimate(A) / epsilon;
    const double raw = 100.0 * std::ceil(ratio * ratio);
    const double capped = std::min(raw, 1e7);
    return capped < 1.0 ? 1 : long(capped);
}

namespace detail {

MembershipState init_state(const DenseMatrix& A, const Vector& b, double r) {
    MembershipState st;
    st.p = b;
    st.p_prime.assign(std::size_t(A.rows), 0.0);
    st.x_prime.assign(std::size_t(A.cols), 0.0);
    st.r = r;
    st.gap = norm2(b);
    st.p_norm_sq = dot(b, b);
    return st;
}

WitnessCertificate make_certificate(const MembershipState& st) {
    WitnessCertificate cert;
    cert.p_prime = st.p_prime;
    cert.x_prime = st.x_prime;
    cert.gap = st.gap;
    cert.delta_lower = 0.5 * st.gap;
    cert.delta_upper = st.gap;
    const double nc = norm2(st.c);
    cert.radius_lower_bound = nc == 0.0 ? std::numeric_limits<double>::infinity()
                                        : dot(sub(st.p, st.p_prime), st.p) / nc;
    return cert;
}

PassOutcome advance(const DenseMatrix& A, MembershipState& st, double epsilon, PivotMode mode,
                    const TraceSink& sink) {
    Vector d = sub(st.p, st.p_prime);
    st.gap = norm2(d);
    if (st.gap <= epsilon) {
        // Candidate exit: refresh p' from x' so the reported gap is the true
        // residual ||A x' - b||, free of accumulated update drift.
        st.p_prime = matvec(A, st.x_prime);
        d = sub(st.p, st.p_prime);
        const double fresh = norm2(d);
        st.gap = fresh;
        if (fresh <= epsilon) return PassOutcome::Converged;
    }

    st.c = transpose_matvec(A, d);
    const double nc = norm2(st.c);
    if (nc == 0.0) {
        st.iterations++;
        if (sink) sink({st.iterations, st.gap, st.r, 0.0, "witness"});
        return PassOutcome::ZeroDirection;
    }

    const double dp = dot(d, st.p);
    const double slack = fp_slack(st.p_norm_sq);
    // (||p||^2 - ||p'||^2)/2 == d.p - gap^2/2, so both pivot tests need only d.p.
    const double rhs = mode == PivotMode::standard ? dp - 0.5 * st.gap * st.gap : dp;
    if (st.r * nc < rhs - slack) {
        st.iterations++;
        if (sink) sink({st.iterations, st.gap, st.r, 0.0, "witness"});
        return PassOutcome::WitnessFound;
    }

    Vector v = matvec(A, st.c);
    const double scale = st.r / nc;
    for (double& t : v) t *= scale;  // v_r = r A c / ||c||
    Vector dv = sub(v, st.p_prime);
    const double denom = dot(dv, dv);
    const double numer = dot(d, dv);
    if (denom == 0.0 || numer <= 0.0) {
        // Only reachable through the fp slack at near-equality: the pivot cannot
        // reduce the gap, which is exactly the witness situation.
        st.iterations++;
        if (sink) sink({st.iterations, st.gap, st.r, 0.0, "witness"});
        return PassOutcome::WitnessFound;
    }
    const double alpha = numer / denom < 1.0 ? numer / denom : 1.0;
    for (std::size_t i = 0; i < st.p_prime.size(); ++i)
        st.p_prime[i] = (1 - alpha) * st.p_prime[i] + alpha * v[i];
    for (int j = 0; j < A.cols; ++j)
        st.x_prime[j] = (1 - alpha) * st.x_prime[j] + alpha * scale * st.c[j];
    st.iterations++;
    if (sink) sink({st.iterations, st.gap, st.r, alpha, "pivot"});
    return PassOutcome::Pivoted;
}

}  // namespace detail

MembershipResult run_membership(const DenseMatrix& A, const Vector& b, double r, double epsilon,
                                long max_iters, PivotMode mode, const TraceSink& sink) {
    if (int(b.size()) != A.rows) throw std::invalid_argument("run_membership: b.len != A.rows");
    require_finite(b, "run_membership: b");
    if (norm2(b) == 0.0) throw std::invalid_argument("run_membership: b must be nonzero");
    if (r <= 0) throw std::invalid_argument("run_membership: r must be positive");
    if (!(epsilon > 0 && epsilon < 1))
        throw std::invalid_argument("run_membership: epsilon must lie in (0,1)");
    if (max_iters < 0) throw std::invalid_argument("run_membership: max_iters must be >= 0");
    if (max_iters == 0) max_iters = default_membership_iters(A, r, epsilon);

    MembershipResult res;
    res.state = detail::init_state(A, b, r);
    MembershipState& st = res.state;
    while (st.iterations < max_iters) {
        switch (detail::advance(A, st, epsilon, mode, sink)) {
            case detail::PassOutcome::Converged:
                if (sink) sink({st.iterations, st.gap, st.r, 0.0, "near_point"});
                res.tag = MembershipTag::NearPoint;
                return res;
            case detail::PassOutcome::Pivoted:
                break;
            case detail::PassOutcome::WitnessFound:
            case detail::PassOutcome::ZeroDirection:
                res.tag = MembershipTag::Witness;
                res.certificate = detail::make_certificate(st);
                return res;
        }
    }
    if (sink) sink({st.iterations, st.gap, st.r, 0.0, "iteration_cap"});
    res.tag = MembershipTag::IterationCapReached;
    return res;
}

}  // namespace ta
