#include "mixturecraft/sweeps.hpp"
#include "mixturecraft/analysis.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/partition.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace mixturecraft {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double kpow(double k, int dim) { return dim == 2 ? k * k : k; }

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double tail_mass_of(const DensitySpec& d, double t)
{
    if (d.support_radius && t >= *d.support_radius) return 0.0;
    if (d.tail_mass) return d.tail_mass(t);
    return 1.0;
}

std::string describe(const Error& e) { return e.what(); }

} // namespace

std::string sweep_csv(const SweepTable& table)
{
    if (table.label_keys.empty()) fail(errc::invalid_parameter, "sweep table needs label keys");
    std::string out;
    for (std::size_t i = 0; i < table.label_keys.size(); ++i) {
        if (i) out += ',';
        out += table.label_keys[i];
    }
    out += ",certified_bound,measured_sup,measured_lp,m,elapsed_s\n";
    for (const SweepRow& row : table.rows) {
        if (row.labels.size() != table.label_keys.size())
            fail(errc::invalid_parameter, "sweep row label count mismatches the header");
        for (double v : row.labels) {
            out += fmt17(v);
            out += ',';
        }
        out += fmt17(row.certified_bound);
        out += ',';
        out += fmt17(row.measured_sup);
        out += ',';
        if (row.measured_lp) out += fmt17(*row.measured_lp);
        out += ',';
        out += std::to_string(row.m);
        out += ',';
        out += fmt17(row.elapsed_s);
        out += '\n';
    }
    return out;
}

SweepTable approximate_identity_curve(const DensitySpec& f, const DensitySpec& g,
                                      const NormSpec& norm, std::span<const double> ks,
                                      int grid_points, double quad_tol)
{
    if (ks.empty()) fail(errc::invalid_parameter, "identity curve needs at least one k");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] > ks[i - 1]))
            fail(errc::invalid_parameter, "identity curve ks must be strictly increasing");
    if (f.dim != g.dim) fail(errc::dimension_error, "target/kernel dims must agree");
    const int dim = f.dim;

    GridSpec grid;
    if (norm.kind == NormSpec::Kind::sup_on_ball) {
        if (!(norm.radius > 0.0)) fail(errc::invalid_parameter, "sup norm needs a radius > 0");
        grid.center.assign(dim, 0.0);
        grid.half_width.assign(dim, norm.radius);
        grid.points_per_axis = grid_points >= 2 ? grid_points : (dim == 1 ? 513 : 65);
    }

    const ScalarField ff = field_of(f);
    SweepTable table;
    table.label_keys = {"k"};
    for (double k : ks) {
        SweepRow row;
        row.labels = {k};
        const auto t0 = clock_type::now();
        try {
            if (!(k > 0.0)) fail(errc::invalid_parameter, "k must be > 0");
            const ScalarField conv = convolution_field(g, k, ff, quad_tol);
            if (norm.kind == NormSpec::Kind::sup_on_ball) {
                row.measured_sup = sup_norm_diff_on_grid(ff, conv, grid).value;
            } else {
                const double p = norm.p;
                const double rg = effective_radius(g, 1e-16);
                const double R = effective_radius(f, 1e-16) + rg / k;
                const double split = std::pow(2.0, p - 1.0);
                const double conv_sup = kpow(k, dim) * (g.ess_bound ? *g.ess_bound : 0.0);
                double conv_tail;
                if (g.ess_bound) {
                    const double leak = tail_mass_of(f, R - rg / k) + tail_mass_of(g, rg);
                    conv_tail = std::pow(conv_sup, p - 1.0) * leak;
                } else {
                    conv_tail = convolution_lp_tail(g, k, 1.0, ff.domain_radius, R, p);
                }
                const double tail = split * (density_lp_tail(f, R, p) + conv_tail);
                row.measured_lp = lp_norm_diff(ff, conv, p, R, tail);
            }
        } catch (const Error& e) {
            row.error = describe(e);
        }
        row.elapsed_s = seconds_since(t0);
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable convergence_sweep(const DensitySpec& f, const DensitySpec& g, const Box& K,
                             std::span<const SweepSetting> settings, const SweepOptions& opts)
{
    if (settings.empty()) fail(errc::invalid_parameter, "convergence sweep needs settings");
    const int dim = box_dim(K);
    if (f.dim != dim || g.dim != dim)
        fail(errc::dimension_error, "target/kernel/box dims must agree");

    const double tau = opts.tau.value_or(opts.margin / 2.0);
    const TruncationResult tr = truncate(f, K, opts.margin, tau, !opts.p.has_value());

    GridSpec grid;
    grid.center.resize(dim);
    grid.half_width.resize(dim);
    for (int a = 0; a < dim; ++a) {
        grid.center[a] = 0.5 * (K.lo[a] + K.hi[a]);
        grid.half_width[a] = 0.5 * (K.hi[a] - K.lo[a]);
    }
    grid.points_per_axis = opts.grid_points;
    const ScalarField ff = field_of(f);

    SweepTable table;
    table.label_keys = {"k", "delta"};
    for (const SweepSetting& s : settings) {
        SweepRow row;
        row.labels = {s.k, s.delta};
        const auto t0 = clock_type::now();
        try {
            if (!(s.k > 0.0) || !(s.delta > 0.0))
                fail(errc::invalid_parameter, "settings need k > 0 and delta > 0");
            const CellPartition part = build_partition(tr.r, s.k, s.delta, dim);
            const DiscretizeResult disc =
                discretize(tr, g, s.k, part, opts.eps_tail, opts.quad_order);
            row.m = static_cast<long>(disc.mixture.components.size());
            row.certified_bound = certified_bound(g, part.radius / s.k, s.k, s.delta, tr.mass,
                                                  disc.c_m, disc.k_m, disc.C_s);
            const ScalarField mf = field_of(disc.mixture);
            row.measured_sup = sup_norm_diff_on_grid(ff, mf, grid).value;
            if (opts.p) {
                const double p = *opts.p;
                const double rg = effective_radius(g, 1e-16);
                const double R =
                    std::max(tr.support_radius + rg / s.k, effective_radius(f, 1e-12));
                const double split = std::pow(2.0, p - 1.0);
                const double tail =
                    split * (density_lp_tail(f, R, p) + mixture_lp_tail(disc.mixture, R, p));
                row.measured_lp = lp_norm_diff(ff, mf, p, R, tail);
            }
        } catch (const Error& e) {
            row.error = describe(e);
        }
        row.elapsed_s = seconds_since(t0);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace mixturecraft
