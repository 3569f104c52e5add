#pragma once

#include <string>
#include <vector>

#include "mbpcn/experiments.hpp"
#include "mbpcn/grid.hpp"
#include "mbpcn/stepping.hpp"

namespace mbpcn {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Strict parse of a full token; throws std::runtime_error on leftovers.
double parse_double_token(const std::string& token);

// Time-series CSV: header
//   step,t,tau,sup_norm,energy,pred_iters,corr_iters,mbp_margin
// one row per recorded step, UTF-8, LF line endings.
void write_timeseries(const RunRecord& record, const std::string& path);
std::vector<StepRow> read_timeseries(const std::string& path);

// Field snapshot: comment lines "# t=", "# M=", "# h=" followed by an MxM
// comma-separated matrix, row i of the file = grid row i.
void write_snapshot(const CellField& state, double t, const std::string& path);

struct SnapshotData {
    double t = 0.0;
    int m = 0;
    double h = 0.0;
    std::vector<double> values; // row-major, matches CellField layout
};
SnapshotData read_snapshot(const std::string& path);

// Raw little-endian float64 sidecar for large snapshots (no header).
void write_snapshot_binary(const CellField& state, const std::string& path);

// Convergence table: n_steps,max_ratio,err_h1,order_h1,err_sup,order_sup
void write_convergence_table(const std::vector<ConvergenceRow>& rows, const std::string& path);

// Bubble series: t,measured_radius,predicted_radius
void write_bubble_series(const BubbleReport& report, const std::string& path);

} // namespace mbpcn
