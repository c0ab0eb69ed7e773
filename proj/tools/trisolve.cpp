// trisolve: solve / membership / bench / gen front end for the ta library.
//
// Exit codes: 0 solution found (EpsSolution / NearPoint), 2 NormalEqEpsSolution,
// 3 Unsolvable, 4 Witness (membership verb), 1 error or inconclusive.

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ta/bench.hpp"
#include "ta/matrix_market.hpp"
#include "ta/solver.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Owns the trace file for the duration of a solve; the sink writes one CSV row
// per record.
struct TraceWriter {
    std::ofstream out;
    explicit TraceWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot open trace file " + path);
        out << "iter,gap,radius,alpha,event\n";
    }
    void write(const ta::TraceRecord& rec) {
        out << rec.iter << ',' << fmt(rec.gap) << ',' << fmt(rec.radius) << ',' << fmt(rec.alpha)
            << ',' << rec.event << '\n';
    }
};

ta::TraceSink make_trace_sink(const std::string& path, std::shared_ptr<TraceWriter>& keep_alive) {
    if (path.empty()) return {};
    keep_alive = std::make_shared<TraceWriter>(path);
    return [w = keep_alive](const ta::TraceRecord& rec) { w->write(rec); };
}

void print_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << j.dump(2) << "\n";
}

int solve_exit_code(ta::SolveTag tag) {
    switch (tag) {
        case ta::SolveTag::EpsSolution: return 0;
        case ta::SolveTag::NormalEqEpsSolution: return 2;
        case ta::SolveTag::Unsolvable: return 3;
        case ta::SolveTag::Inconclusive: return 1;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangle-algorithm linear solver and benchmark harness"};
    app.set_version_flag("--version", "trisolve 0.1.0");
    app.require_subcommand(1);
    int rc = 0;

    // ---- solve ----
    struct {
        std::string matrix, rhs, trace, out, solution;
        std::string pivot_mode = "standard";
        double epsilon = 1e-3;
        double r0 = 0, radius_cap = 0;
        long max_iters = 10'000'000;
    } so;
    auto* solve_cmd = app.add_subcommand("solve", "Solve Ax = b from Matrix Market files");
    solve_cmd->add_option("--matrix", so.matrix, "matrix A (.mtx)")->required();
    solve_cmd->add_option("--rhs", so.rhs, "right-hand side b (.mtx, one column)")->required();
    solve_cmd->add_option("--epsilon", so.epsilon, "residual target (0,1)");
    solve_cmd->add_option("--pivot-mode", so.pivot_mode, "standard|strict")
        ->check(CLI::IsMember({"standard", "strict"}));
    solve_cmd->add_option("--r0", so.r0, "initial radius (0 = auto)");
    solve_cmd->add_option("--radius-cap", so.radius_cap, "radius ceiling (0 = auto)");
    solve_cmd->add_option("--max-iters", so.max_iters, "total iteration budget");
    solve_cmd->add_option("--trace", so.trace, "write per-iteration CSV trace here");
    solve_cmd->add_option("--out", so.out, "write the JSON report here instead of stdout");
    solve_cmd->add_option("--solution", so.solution, "write x as a .mtx vector");
    solve_cmd->callback([&] {
        ta::DenseMatrix A = ta::read_matrix_market(so.matrix);
        ta::Vector b = ta::read_vector_market(so.rhs);
        ta::SolverConfig cfg;
        cfg.epsilon = so.epsilon;
        cfg.r0 = so.r0;
        cfg.radius_cap = so.radius_cap;
        cfg.max_iters_total = so.max_iters;
        cfg.pivot_mode =
            so.pivot_mode == "strict" ? ta::PivotMode::strict : ta::PivotMode::standard;
        std::shared_ptr<TraceWriter> keep;
        cfg.trace = make_trace_sink(so.trace, keep);
        ta::SolveOutcome out = ta::solve(A, b, cfg);
        if (!so.solution.empty()) ta::write_matrix_market(out.x, so.solution);
        print_json(ta::to_json(out), so.out);
        rc = solve_exit_code(out.tag);
    });

    // ---- membership ----
    struct {
        std::string matrix, rhs, trace, out;
        std::string pivot_mode = "standard";
        double radius = 0;
        double epsilon = 1e-3;
        long max_iters = 0;
    } me;
    auto* mem_cmd =
        app.add_subcommand("membership", "Test b against the ellipsoid {Ax : ||x|| <= r}");
    mem_cmd->add_option("--matrix", me.matrix, "matrix A (.mtx)")->required();
    mem_cmd->add_option("--rhs", me.rhs, "target b (.mtx, one column)")->required();
    mem_cmd->add_option("--radius", me.radius, "ellipsoid radius r > 0")->required();
    mem_cmd->add_option("--epsilon", me.epsilon, "distance tolerance (0,1)");
    mem_cmd->add_option("--pivot-mode", me.pivot_mode, "standard|strict")
        ->check(CLI::IsMember({"standard", "strict"}));
    mem_cmd->add_option("--max-iters", me.max_iters, "iteration budget (0 = auto)");
    mem_cmd->add_option("--trace", me.trace, "write per-iteration CSV trace here");
    mem_cmd->add_option("--out", me.out, "write the JSON report here instead of stdout");
    mem_cmd->callback([&] {
        ta::DenseMatrix A = ta::read_matrix_market(me.matrix);
        ta::Vector b = ta::read_vector_market(me.rhs);
        std::shared_ptr<TraceWriter> keep;
        ta::TraceSink sink = make_trace_sink(me.trace, keep);
        ta::PivotMode mode =
            me.pivot_mode == "strict" ? ta::PivotMode::strict : ta::PivotMode::standard;
        ta::MembershipResult res =
            ta::run_membership(A, b, me.radius, me.epsilon, me.max_iters, mode, sink);
        nlohmann::json j;
        j["radius"] = me.radius;
        j["gap"] = res.state.gap;
        j["iterations"] = res.state.iterations;
        switch (res.tag) {
            case ta::MembershipTag::NearPoint:
                j["tag"] = "NearPoint";
                rc = 0;
                break;
            case ta::MembershipTag::Witness:
                j["tag"] = "Witness";
                rc = 4;
                break;
            case ta::MembershipTag::IterationCapReached:
                j["tag"] = "IterationCapReached";
                rc = 1;
                break;
        }
        if (res.certificate) {
            j["delta_lower"] = res.certificate->delta_lower;
            j["delta_upper"] = res.certificate->delta_upper;
            j["radius_lower_bound"] = res.certificate->radius_lower_bound;
        }
        print_json(j, me.out);
    });

    // ---- bench ----
    struct {
        std::vector<std::string> kinds = {"GeneralUniform", "GeneralGaussian", "LowRank",
                                          "IllConditioned"};
        std::vector<int> dims = {100, 200};
        std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
        std::vector<std::uint64_t> seeds = {1, 2, 3};
        std::vector<std::string> methods = {"TA", "BiCGSTAB"};
        std::string out;
        int jobs = 1;
        long ta_max_iters = 0;
        bool inconsistent = false;
    } be;
    auto* bench_cmd = app.add_subcommand("bench", "Run the experiment grid and emit CSV");
    bench_cmd->add_option("--kinds", be.kinds, "instance kinds")->delimiter(',');
    bench_cmd->add_option("--dims", be.dims, "square dimensions")->delimiter(',');
    bench_cmd->add_option("--eps", be.eps, "epsilon sweep")->delimiter(',');
    bench_cmd->add_option("--seeds", be.seeds, "instance seeds")->delimiter(',');
    bench_cmd->add_option("--methods", be.methods, "TA, BiCGSTAB, SteepestDescentNormal")
        ->delimiter(',');
    bench_cmd->add_option("--out", be.out, "CSV path (streamed; default stdout)");
    bench_cmd->add_option("--jobs", be.jobs, "parallel grid cells");
    bench_cmd->add_option("--ta-max-iters", be.ta_max_iters,
                          "TA iteration budget per cell (0 = solver default)");
    bench_cmd->add_flag("--inconsistent", be.inconsistent,
                        "perturb b off range(A) (LowRank only)");
    bench_cmd->callback([&] {
        std::vector<ta::InstanceKind> kinds;
        for (const std::string& k : be.kinds) kinds.push_back(ta::parse_instance_kind(k));
        std::vector<ta::BenchMethod> methods;
        for (const std::string& m : be.methods) methods.push_back(ta::parse_bench_method(m));
        ta::GridOptions opt;
        opt.jobs = be.jobs;
        opt.consistent = !be.inconsistent;
        opt.ta_max_iters = be.ta_max_iters;
        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!be.out.empty()) {
            file.open(be.out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file " + be.out);
            os = &file;
        }
        *os << ta::csv_header() << '\n';
        opt.on_row = [&](const ta::ExperimentRow& row) {
            *os << ta::csv_line(row) << '\n';
            os->flush();
        };
        auto rows = ta::run_grid(kinds, be.dims, be.eps, be.seeds, methods, opt);
        if (!be.out.empty()) ta::print_summary(rows, std::cout);  // summary beside the CSV
        rc = 0;
    });

    // ---- gen ----
    struct {
        std::string kind = "GeneralUniform";
        int m = 100, n = 100;
        std::uint64_t seed = 1;
        bool inconsistent = false;
        std::string out;
    } ge;
    auto* gen_cmd = app.add_subcommand("gen", "Generate an instance and write it to files");
    gen_cmd->add_option("--kind", ge.kind,
                        "GeneralUniform|GeneralGaussian|LowRank|IllConditioned");
    gen_cmd->add_option("--m", ge.m, "rows");
    gen_cmd->add_option("--n", ge.n, "columns");
    gen_cmd->add_option("--seed", ge.seed, "generator seed");
    gen_cmd->add_flag("--inconsistent", ge.inconsistent, "perturb b off range(A) (LowRank only)");
    gen_cmd->add_option("--out", ge.out, "output prefix (<prefix>_A.mtx, ...)")->required();
    gen_cmd->callback([&] {
        ta::InstanceSpec spec;
        spec.kind = ta::parse_instance_kind(ge.kind);
        spec.m = ge.m;
        spec.n = ge.n;
        spec.seed = ge.seed;
        spec.consistent = !ge.inconsistent;
        ta::Instance inst = ta::generate(spec);
        ta::export_instance(spec, inst, ge.out);
        std::cout << "wrote " << ge.out << "_A.mtx (" << spec.m << "x" << spec.n << ")\n";
        rc = 0;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
