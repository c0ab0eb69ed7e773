#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ta/instance_gen.hpp"

namespace ta {

enum class BenchMethod { TA, BiCGSTAB, SteepestDescentNormal };

const char* bench_method_name(BenchMethod m);
BenchMethod parse_bench_method(const std::string& name);  // throws on unknown names

struct ExperimentRow {
    BenchMethod method = BenchMethod::TA;
    InstanceKind kind = InstanceKind::GeneralUniform;
    int m = 0;
    int n = 0;
    double epsilon = 0;
    std::uint64_t seed = 0;
    double wall_time_ms = 0;
    long iterations = 0;
    double residual = 0;         // ||Ax - b|| recomputed from the returned x
    double normal_residual = 0;  // ||A^T (Ax - b)|| recomputed from the returned x
    std::string outcome_tag;     // solver/baseline tag, or "error" for a failed cell
};

struct GridOptions {
    int jobs = 1;            // worker threads over grid cells
    bool consistent = true;  // right-hand sides; false is only valid for LowRank
    int max_dim = 4096;      // memory guard: a dim above this rejects the grid
    long baseline_iter_factor = 10;  // baselines get factor*n iterations
    long ta_max_iters = 0;           // TA iteration budget per cell; 0 = solver default
    // Called once per row, in grid order, as soon as the row (and all earlier
    // ones) finished. Useful for streaming CSV while the grid runs.
    std::function<void(const ExperimentRow&)> on_row;
};

// One row per (kind, dim, epsilon, seed, method), nested in that order, on square
// dim x dim instances. Wall time wraps the solve call only; instance generation is
// excluded and shared across the cells that reuse the same (kind, dim, seed).
// Baselines run to the same absolute target as the solver: BiCGSTAB at relative
// tolerance epsilon/||b|| and steepest descent at absolute normal-residual
// tolerance epsilon. A throwing cell becomes an outcome_tag = "error" row and the
// grid continues; empty axis lists or dims out of budget throw before any work.
std::vector<ExperimentRow> run_grid(const std::vector<InstanceKind>& kinds,
                                    const std::vector<int>& dims,
                                    const std::vector<double>& epsilons,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<BenchMethod>& methods,
                                    const GridOptions& opt = {});

std::string csv_header();
std::string csv_line(const ExperimentRow& row);

// Header + one line per row in the given order, RFC-4180 quoting, LF endings.
// Doubles are written in shortest round-trip form, so re-running the same grid
// reproduces the file byte for byte except the wall_time_ms column.
void emit_csv(const std::vector<ExperimentRow>& rows, const std::string& path);

// Medians over seeds per (method, kind, dim, epsilon), non-error rows only,
// reported in first-appearance (grid) order.
struct SummaryRow {
    BenchMethod method = BenchMethod::TA;
    InstanceKind kind = InstanceKind::GeneralUniform;
    int dim = 0;
    double epsilon = 0;
    int cells = 0;
    int errors = 0;
    double median_wall_ms = 0;
    double median_iterations = 0;
    double median_residual = 0;
};

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);
void print_summary(const std::vector<ExperimentRow>& rows, std::ostream& os);

}  // namespace ta
