#pragma once

#include "mixturecraft/constructor.hpp"
#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/truncate.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixturecraft {

// One measured configuration. labels lines up with SweepTable::label_keys;
// measured_lp stays empty for sup-only runs, and a failed row keeps NaNs plus
// a note in error (the CSV has no error column, callers surface it).
struct SweepRow {
    std::vector<double> labels;
    double certified_bound = std::numeric_limits<double>::quiet_NaN();
    double measured_sup = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> measured_lp;
    long m = 0;
    double elapsed_s = 0.0;
    std::string error;
};

struct SweepTable {
    std::vector<std::string> label_keys;
    std::vector<SweepRow> rows;
};

// Header `label_keys...,certified_bound,measured_sup,measured_lp,m,elapsed_s`,
// one row per line, LF endings, doubles at 17 significant digits.
std::string sweep_csv(const SweepTable& table);

// Error of smoothing f with the dilated kernel, one row per k in ks.
// Sup norms use a grid over the ball of norm.radius (grid_points 0 picks a
// per-dimension default); L_p norms integrate out to where both tails are
// provably negligible.
SweepTable approximate_identity_curve(const DensitySpec& f, const DensitySpec& g,
                                      const NormSpec& norm, std::span<const double> ks,
                                      int grid_points = 0, double quad_tol = 1e-8);

struct SweepSetting {
    double k = 0.0;
    double delta = 0.0;
};

struct SweepOptions {
    double margin = 1.0;
    std::optional<double> tau;
    double eps_tail = 1e-6;
    int quad_order = 8;
    int grid_points = 513;
    std::optional<double> p;
};

// Full construction at each (k, delta) setting against the target truncated to
// box K: certificate, sup error on a grid over K, optionally the L_p error
// when opts.p is set. Settings must be non-empty.
SweepTable convergence_sweep(const DensitySpec& f, const DensitySpec& g, const Box& K,
                             std::span<const SweepSetting> settings,
                             const SweepOptions& opts = {});

} // namespace mixturecraft
