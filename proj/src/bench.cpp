#include "ta/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "ta/baselines.hpp"
#include "ta/solver.hpp"

namespace ta {

namespace {

// Shortest round-trip formatting keeps CSV output deterministic and readable.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Display-width formatting for the summary table; CSV keeps full precision.
std::string fmt6(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ExperimentRow run_cell(const std::optional<Instance>& inst, InstanceKind kind, int dim, double eps,
                       std::uint64_t seed, BenchMethod method, const GridOptions& opt) {
    ExperimentRow row;
    row.method = method;
    row.kind = kind;
    row.m = dim;
    row.n = dim;
    row.epsilon = eps;
    row.seed = seed;
    row.residual = std::numeric_limits<double>::quiet_NaN();
    row.normal_residual = row.residual;
    row.outcome_tag = "error";
    if (!inst) return row;  // generation already failed for this seed
    try {
        Vector x;
        const auto t0 = std::chrono::steady_clock::now();
        switch (method) {
            case BenchMethod::TA: {
                SolverConfig cfg;
                cfg.epsilon = eps;
                if (opt.ta_max_iters > 0) cfg.max_iters_total = opt.ta_max_iters;
                SolveOutcome out = solve(inst->A, inst->b, cfg);
                x = std::move(out.x);
                row.iterations = out.iterations;
                row.outcome_tag = solve_tag_name(out.tag);
                break;
            }
            case BenchMethod::BiCGSTAB: {
                // Relative tolerance chosen so the convergence target matches the
                // solver's absolute one: ||Ax - b|| <= eps.
                const double nb = norm2(inst->b);
                BaselineReport rep = bicgstab(inst->A, inst->b, nb > 0 ? eps / nb : eps,
                                              opt.baseline_iter_factor * dim);
                x = std::move(rep.x);
                row.iterations = rep.iterations;
                row.outcome_tag = baseline_tag_name(rep);
                break;
            }
            case BenchMethod::SteepestDescentNormal: {
                BaselineReport rep = steepest_descent_normal(inst->A, inst->b, eps,
                                                             opt.baseline_iter_factor * dim);
                x = std::move(rep.x);
                row.iterations = rep.iterations;
                row.outcome_tag = baseline_tag_name(rep);
                break;
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        Vector resid = matvec(inst->A, x);
        for (int i = 0; i < row.m; ++i) resid[i] -= inst->b[i];
        row.residual = norm2(resid);
        row.normal_residual = norm2(transpose_matvec(inst->A, resid));
    } catch (const std::exception&) {
        row.outcome_tag = "error";
        row.residual = std::numeric_limits<double>::quiet_NaN();
        row.normal_residual = row.residual;
    }
    return row;
}

}  // namespace

const char* bench_method_name(BenchMethod m) {
    switch (m) {
        case BenchMethod::TA: return "TA";
        case BenchMethod::BiCGSTAB: return "BiCGSTAB";
        case BenchMethod::SteepestDescentNormal: return "SteepestDescentNormal";
    }
    return "?";
}

BenchMethod parse_bench_method(const std::string& name) {
    if (name == "TA" || name == "ta") return BenchMethod::TA;
    if (name == "BiCGSTAB" || name == "bicgstab") return BenchMethod::BiCGSTAB;
    if (name == "SteepestDescentNormal" || name == "sd" || name == "sdne")
        return BenchMethod::SteepestDescentNormal;
    throw std::invalid_argument("unknown method: " + name);
}

std::vector<ExperimentRow> run_grid(const std::vector<InstanceKind>& kinds,
                                    const std::vector<int>& dims,
                                    const std::vector<double>& epsilons,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<BenchMethod>& methods,
                                    const GridOptions& opt) {
    if (kinds.empty() || dims.empty() || epsilons.empty() || seeds.empty() || methods.empty())
        throw std::invalid_argument("run_grid: every axis needs at least one value");
    for (int d : dims)
        if (d < 1 || d > opt.max_dim)
            throw std::invalid_argument("run_grid: dim " + std::to_string(d) +
                                        " outside [1, " + std::to_string(opt.max_dim) + "]");
    if (opt.jobs < 1) throw std::invalid_argument("run_grid: jobs must be positive");

    std::vector<ExperimentRow> rows;
    rows.reserve(kinds.size() * dims.size() * epsilons.size() * seeds.size() * methods.size());

    const long ne = long(epsilons.size()), ns = long(seeds.size()), nm = long(methods.size());
    for (InstanceKind kind : kinds) {
        for (int dim : dims) {
            // Instances are shared by every (epsilon, method) cell of a seed;
            // generate each one once, outside the timed region.
            std::vector<std::optional<Instance>> insts;
            insts.reserve(seeds.size());
            for (std::uint64_t seed : seeds) {
                InstanceSpec spec{kind, dim, dim, seed, opt.consistent};
                try {
                    insts.emplace_back(generate(spec));
                } catch (const std::exception&) {
                    insts.emplace_back(std::nullopt);
                }
            }
            const long block = ne * ns * nm;
            const std::size_t base = rows.size();
            rows.resize(base + std::size_t(block));
#ifdef _OPENMP
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(opt.jobs) if (opt.jobs > 1)
#endif
            for (long ci = 0; ci < block; ++ci) {
                const long ei = ci / (ns * nm);
                const long si = (ci / nm) % ns;
                const long mi = ci % nm;
                rows[base + ci] = run_cell(insts[si], kind, dim, epsilons[ei], seeds[si],
                                           methods[mi], opt);
#ifdef _OPENMP
#pragma omp ordered
#endif
                {
                    if (opt.on_row) opt.on_row(rows[base + ci]);
                }
            }
        }
    }
    return rows;
}

std::string csv_header() {
    return "method,kind,m,n,epsilon,seed,wall_time_ms,iterations,residual,normal_residual,outcome";
}

std::string csv_line(const ExperimentRow& row) {
    std::string line;
    line += csv_quote(bench_method_name(row.method));
    line += ',';
    line += csv_quote(instance_kind_name(row.kind));
    line += ',';
    line += std::to_string(row.m);
    line += ',';
    line += std::to_string(row.n);
    line += ',';
    line += fmt(row.epsilon);
    line += ',';
    line += std::to_string(row.seed);
    line += ',';
    line += fmt(row.wall_time_ms);
    line += ',';
    line += std::to_string(row.iterations);
    line += ',';
    line += fmt(row.residual);
    line += ',';
    line += fmt(row.normal_residual);
    line += ',';
    line += csv_quote(row.outcome_tag);
    return line;
}

void emit_csv(const std::vector<ExperimentRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << csv_header() << '\n';
    for (const ExperimentRow& row : rows) out << csv_line(row) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
    std::vector<SummaryRow> out;
    struct Bucket {
        std::vector<double> wall, iters, resid;
    };
    std::vector<Bucket> buckets;
    for (const ExperimentRow& row : rows) {
        std::size_t i = 0;
        for (; i < out.size(); ++i)
            if (out[i].method == row.method && out[i].kind == row.kind && out[i].dim == row.n &&
                out[i].epsilon == row.epsilon)
                break;
        if (i == out.size()) {
            SummaryRow s;
            s.method = row.method;
            s.kind = row.kind;
            s.dim = row.n;
            s.epsilon = row.epsilon;
            out.push_back(s);
            buckets.emplace_back();
        }
        ++out[i].cells;
        if (row.outcome_tag == "error") {
            ++out[i].errors;
        } else {
            buckets[i].wall.push_back(row.wall_time_ms);
            buckets[i].iters.push_back(double(row.iterations));
            buckets[i].resid.push_back(row.residual);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].median_wall_ms = median(buckets[i].wall);
        out[i].median_iterations = median(buckets[i].iters);
        out[i].median_residual = median(buckets[i].resid);
    }
    return out;
}

void print_summary(const std::vector<ExperimentRow>& rows, std::ostream& os) {
    const auto summary = summarize(rows);
    os << std::left << std::setw(22) << "method" << std::setw(16) << "kind" << std::setw(6) << "n"
       << std::setw(10) << "epsilon" << std::setw(6) << "cells" << std::setw(7) << "errors"
       << std::setw(14) << "med_wall_ms" << std::setw(14) << "med_iters" << "med_residual\n";
    for (const SummaryRow& s : summary) {
        os << std::left << std::setw(22) << bench_method_name(s.method) << std::setw(16)
           << instance_kind_name(s.kind) << std::setw(6) << s.dim << std::setw(10)
           << fmt(s.epsilon) << std::setw(6) << s.cells << std::setw(7) << s.errors
           << std::setw(14) << fmt6(s.median_wall_ms) << std::setw(14) << fmt6(s.median_iterations)
           << fmt6(s.median_residual) << '\n';
    }
}

}  // namespace ta
