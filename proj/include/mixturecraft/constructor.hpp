#ifndef MIXTURECRAFT_CONSTRUCTOR_HPP
#define MIXTURECRAFT_CONSTRUCTOR_HPP

#include "mixturecraft/analysis.hpp"
#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/mixture.hpp"
#include "mixturecraft/partition.hpp"
#include "mixturecraft/truncate.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixturecraft {

struct BandwidthOptions {
    double k0 = 1.0;
    double k_cap = 1024.0;
    int sup_grid_points = 0; // 0 picks 513 (dim 1) / 65 (dim 2)
    double quad_tol = 1e-8;
};

struct BandwidthResult {
    double k = 0.0;
    double measured_error = 0.0;
    std::vector<std::pair<double, double>> trail; // (k, measured error) per doubling
};

/* Measured ||h - g_k * h|| in the requested norm. */
double mollification_error(const TruncationResult& tr, const DensitySpec& g, double k,
                           const NormSpec& norm, const BandwidthOptions& opts = {});

/* First k in the doubling schedule k0, 2 k0, ... <= k_cap whose measured
 * mollification error is <= eps_half. */
BandwidthResult select_bandwidth(const TruncationResult& tr, const DensitySpec& g, double eps_half,
                                 const NormSpec& norm, const BandwidthOptions& opts = {});

struct DiscretizeResult {
    Mixture mixture;
    double c_m = 0.0; // leftover weight on the wide tail component (0 when omitted)
    double k_m = 0.0; // tail dilation (0 when the tail component is omitted)
    double C_s = 0.0; // kernel sup on the ball used by the tail construction
    double s = 0.0;   // that ball's radius
    long kept_cells = 0;
};

/* Cell weights by tensor Gauss-Legendre of h over cell/k (parallel across
 * cells, emitted in cell order), locations at rep/k, common scale 1/k, and a
 * leftover component at the origin sized so its sup on the covered ball stays
 * below eps_tail/2.  Weights below weight_floor fold into the leftover; if
 * the leftover itself lands below the floor it is omitted and the weights are
 * renormalized. */
DiscretizeResult discretize(const TruncationResult& tr, const DensitySpec& g, double k,
                            const CellPartition& part, double eps_tail, int quad_order = 8,
                            double weight_floor = 1e-14);

/* Upper estimate of sup |g(x)-g(y)| over ||x-y|| <= delta, x,y in B(0,radius).
 * With Lipschitz metadata: min(L delta, 2 sup g), exact upper bound.  Without:
 * lattice pair scan inflated by 1.05, monotone in delta by construction. */
double modulus_of_continuity(const DensitySpec& g, double radius, double delta,
                             int lattice_per_axis = 4096);

/* w(g, 2rk, delta) k^n mass + c_m k_m^n C_s: certified sup bound for
 * ||g_k * h - h_m|| on the covered ball. */
double certified_bound(const DensitySpec& g, double r, double k, double delta, double mass,
                       double c_m, double k_m, double C_s);

struct ApproxOptions {
    double margin = 1.0;
    std::optional<double> tau;     // default margin/2
    int quad_order = 8;
    long max_components = 1000000;
    double eta = 1e-4;             // L_p mode: truncation ball captures mass >= 1 - eta
    int grid_points = 1025;        // final sup measurement lattice per axis
    std::optional<std::vector<double>> anchor; // partition anchor (x-space lower corner)
    BandwidthOptions bandwidth;
};

struct ApproxReport {
    std::string mode; // "uniform" | "lp"
    double r = 0.0;
    double k = 0.0;
    double delta = 0.0;
    long m = 0;
    double eps = 0.0;
    std::optional<double> p;
    double c_m = 0.0;
    double k_m = 0.0;
    double certified_bound = 0.0;
    double measured_mollification = 0.0;
    double measured_total = 0.0;
    double grid_slack = 0.0; // lattice-gap allowance for the sup measurement (diagnostic)
    double elapsed_s = 0.0;
};

std::string report_json(const ApproxReport& rep);

/* Uniform-norm pipeline: truncate on K, pick k for eps/2, solve delta from the
 * modulus for eps/4, discretize with eps/4 tail budget, then measure
 * sup |f - h_m| on the K lattice. */
std::pair<Mixture, ApproxReport> approximate_uniform(const DensitySpec& f, const DensitySpec& g,
                                                     const Box& K, double eps,
                                                     const ApproxOptions& opts = {});

/* L_p pipeline: truncate on a ball capturing mass >= 1 - eta, pick k for
 * eps/2 in L_p, then halve delta until the measured L_p gap between g_k * h
 * and the mixture is <= eps/4; the report's measured_total is ||f - h_m||_p
 * and must come out <= eps. */
std::pair<Mixture, ApproxReport> approximate_lp(const DensitySpec& f, const DensitySpec& g,
                                                double p, double eps,
                                                const ApproxOptions& opts = {});

} // namespace mixturecraft

#endif
