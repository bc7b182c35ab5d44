#include "mixturecraft/constructor.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/kernels.hpp"
#include "mixturecraft/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mixturecraft {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double kpow(double k, int dim) { return dim == 2 ? k * k : k; }

int norm_grid_points(const BandwidthOptions& opts, int dim)
{
    if (opts.sup_grid_points >= 2) return opts.sup_grid_points;
    return dim == 1 ? 513 : 65;
}

/* Lattice max over the closed ball, without the ZeroOnBall throw. */
double lattice_max(const DensitySpec& g, double radius, int samples)
{
    double best = 0.0;
    const double step = 2.0 * radius / static_cast<double>(samples - 1);
    if (g.dim == 1) {
        for (int i = 0; i < samples; ++i) {
            const double x = -radius + step * i;
            best = std::max(best, g.eval(std::span<const double>(&x, 1)));
        }
    } else {
        for (int i = 0; i < samples; ++i) {
            double pt[2];
            pt[0] = -radius + step * i;
            for (int j = 0; j < samples; ++j) {
                pt[1] = -radius + step * j;
                if (pt[0] * pt[0] + pt[1] * pt[1] > radius * radius) continue;
                best = std::max(best, g.eval(std::span<const double>(pt, 2)));
            }
        }
    }
    return best;
}

double kahan_sum(std::span<const double> v)
{
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

double mollification_error(const TruncationResult& tr, const DensitySpec& g, double k,
                           const NormSpec& norm, const BandwidthOptions& opts)
{
    if (!(k > 0.0)) fail(errc::invalid_parameter, "bandwidth k must be > 0");
    if (g.dim != tr.h.dim) fail(errc::dimension_error, "kernel dim mismatches truncation dim");
    const int dim = g.dim;
    ScalarField conv = convolution_field(g, k, tr.h, opts.quad_tol);

    if (norm.kind == NormSpec::Kind::sup_on_ball) {
        const double R = norm.radius > 0.0 ? norm.radius : tr.r;
        GridSpec grid;
        grid.center.assign(dim, 0.0);
        grid.half_width.assign(dim, R);
        grid.points_per_axis = norm_grid_points(opts, dim);
        return sup_norm_diff_on_grid(tr.h, conv, grid).value;
    }

    const double p = norm.p;
    const double R = tr.support_radius + effective_radius(g, 1e-16) / k;
    const double tail = convolution_lp_tail(g, k, tr.mass, tr.support_radius, R, p);
    return lp_norm_diff(tr.h, conv, p, R, tail);
}

BandwidthResult select_bandwidth(const TruncationResult& tr, const DensitySpec& g, double eps_half,
                                 const NormSpec& norm, const BandwidthOptions& opts)
{
    if (!(eps_half > 0.0)) fail(errc::invalid_parameter, "bandwidth target must be > 0");
    if (!(opts.k0 > 0.0) || !(opts.k_cap >= opts.k0))
        fail(errc::invalid_parameter, "bandwidth schedule needs 0 < k0 <= k_cap");

    BandwidthResult out;
    for (double k = opts.k0; k <= opts.k_cap * (1.0 + 1e-12); k *= 2.0) {
        const double err = mollification_error(tr, g, k, norm, opts);
        out.trail.emplace_back(k, err);
        if (err <= eps_half) {
            out.k = k;
            out.measured_error = err;
            return out;
        }
    }
    std::string msg = "no k in the doubling schedule reached " + format_double(eps_half) + ";";
    for (const auto& [k, e] : out.trail)
        msg += " k=" + format_double(k) + " -> " + format_double(e);
    fail(errc::bandwidth_not_found, msg);
}

DiscretizeResult discretize(const TruncationResult& tr, const DensitySpec& g, double k,
                            const CellPartition& part, double eps_tail, int quad_order,
                            double weight_floor)
{
    if (!(k > 0.0)) fail(errc::invalid_parameter, "discretize needs k > 0");
    if (!(eps_tail > 0.0)) fail(errc::invalid_parameter, "discretize needs eps_tail > 0");
    if (part.dim != tr.h.dim || part.dim != g.dim)
        fail(errc::dimension_error, "partition/kernel/truncation dim mismatch");
    if (part.radius < tr.support_radius * k - 1e-9)
        fail(errc::invalid_parameter, "partition ball does not cover the truncated support");

    const int dim = part.dim;
    const GLRule& rule = gl_rule(quad_order);
    const std::vector<double> weights = cell_masses(tr.h, part, k, rule);

    std::vector<MixtureComponent> comps;
    comps.reserve(weights.size() + 1);
    std::vector<double> kept;
    kept.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= weight_floor) continue;
        MixtureComponent c;
        c.weight = weights[i];
        c.location.assign(part.cells[i].rep.begin(), part.cells[i].rep.begin() + dim);
        for (double& v : c.location) v /= k;
        c.scale = 1.0 / k;
        comps.push_back(std::move(c));
        kept.push_back(weights[i]);
    }

    DiscretizeResult out;
    out.kept_cells = static_cast<long>(kept.size());
    const double kept_sum = kahan_sum(kept);
    const double c_m = 1.0 - kept_sum;
    // Coarse rules overshoot slightly on cells holding a kink of h; anything past
    // this slack means the inputs are inconsistent, not just noisy.
    if (c_m < -1e-4)
        fail(errc::quadrature_inconsistency,
             "cell weights sum to " + format_double(kept_sum) + " > 1");

    if (c_m <= weight_floor) {
        if (comps.empty())
            fail(errc::quadrature_inconsistency, "no cell carries weight yet nothing is left over");
        for (auto& c : comps) c.weight /= kept_sum;
        out.c_m = 0.0;
        out.k_m = 0.0;
        out.C_s = 0.0;
        out.s = 0.0;
    } else {
        double s = 1.0;
        double C_s = 0.0;
        const int samples = dim == 1 ? 4097 : 257;
        for (int tries = 0; tries <= 10; ++tries) {
            C_s = lattice_max(g, s, samples);
            if (C_s > 0.0) break;
            if (tries == 10)
                fail(errc::zero_kernel, "kernel stayed zero on every probed ball up to radius " +
                                            format_double(s));
            s *= 2.0;
        }
        const double r_cov = part.radius / k;
        const double k_m = std::min(s / r_cov,
                                    std::pow(eps_tail / (2.0 * c_m * C_s), 1.0 / dim));
        MixtureComponent tail;
        tail.weight = c_m;
        tail.location.assign(dim, 0.0);
        tail.scale = 1.0 / k_m;
        comps.push_back(std::move(tail));
        out.c_m = c_m;
        out.k_m = k_m;
        out.C_s = C_s;
        out.s = s;
    }
    out.mixture = make_mixture(g, std::move(comps), 1e-12);
    return out;
}

double modulus_of_continuity(const DensitySpec& g, double radius, double delta,
                             int lattice_per_axis)
{
    if (!(radius > 0.0) || !(delta > 0.0))
        fail(errc::invalid_parameter, "modulus needs radius > 0 and delta > 0");
    if (lattice_per_axis < 2) fail(errc::invalid_parameter, "modulus lattice too small");
    if (g.continuity != ContinuityClass::continuous)
        fail(errc::continuity_required, "modulus of continuity needs a continuous density");

    if (g.lipschitz) {
        const double cap = 2.0 * (g.ess_bound ? *g.ess_bound
                                              : lattice_max(g, radius, std::min(lattice_per_axis, 4097)));
        return std::min(*g.lipschitz * delta, cap);
    }

    if (g.dim == 1) {
        const int N = lattice_per_axis;
        const double step = 2.0 * radius / static_cast<double>(N - 1);
        std::vector<double> v(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
            const double x = -radius + step * i;
            v[static_cast<std::size_t>(i)] = g.eval(std::span<const double>(&x, 1));
        }
        const int D = std::max(1, std::min(N - 1, static_cast<int>(std::floor(delta / step))));
        double best = 0.0;
        for (int o = 1; o <= D; ++o)
            for (int i = 0; i + o < N; ++i)
                best = std::max(best, std::abs(v[static_cast<std::size_t>(i + o)] -
                                               v[static_cast<std::size_t>(i)]));
        return 1.05 * best;
    }

    const int N = std::min(lattice_per_axis, 257);
    const double step = 2.0 * radius / static_cast<double>(N - 1);
    std::vector<double> v(static_cast<std::size_t>(N) * N);
    std::vector<char> in(static_cast<std::size_t>(N) * N, 0);
    for (int i = 0; i < N; ++i) {
        double pt[2];
        pt[0] = -radius + step * i;
        for (int j = 0; j < N; ++j) {
            pt[1] = -radius + step * j;
            const std::size_t idx = static_cast<std::size_t>(i) * N + j;
            if (pt[0] * pt[0] + pt[1] * pt[1] > radius * radius) continue;
            in[idx] = 1;
            v[idx] = g.eval(std::span<const double>(pt, 2));
        }
    }
    const int D = std::max(1, std::min(N - 1, static_cast<int>(std::floor(delta / step))));
    std::vector<std::pair<int, int>> offsets;
    for (int dx = 0; dx <= D; ++dx) {
        for (int dy = (dx == 0 ? 1 : -D); dy <= D; ++dy) {
            const double d2 = (dx * dx + dy * dy) * step * step;
            if (d2 <= delta * delta) offsets.emplace_back(dx, dy);
        }
    }
    if (offsets.empty()) offsets = {{1, 0}, {0, 1}};
    double best = 0.0;
    for (const auto& [dx, dy] : offsets) {
        for (int i = std::max(0, -dx); i < N - std::max(0, dx); ++i) {
            for (int j = std::max(0, -dy); j < N - std::max(0, dy); ++j) {
                const std::size_t p0 = static_cast<std::size_t>(i) * N + j;
                const std::size_t p1 = static_cast<std::size_t>(i + dx) * N + (j + dy);
                if (!in[p0] || !in[p1]) continue;
                best = std::max(best, std::abs(v[p1] - v[p0]));
            }
        }
    }
    return 1.05 * best;
}

double certified_bound(const DensitySpec& g, double r, double k, double delta, double mass,
                       double c_m, double k_m, double C_s)
{
    if (!(r > 0.0) || !(k > 0.0) || !(delta > 0.0))
        fail(errc::invalid_parameter, "certified_bound needs r, k, delta > 0");
    if (mass < 0.0 || c_m < 0.0)
        fail(errc::invalid_parameter, "certified_bound needs mass >= 0 and c_m >= 0");
    const double w = modulus_of_continuity(g, 2.0 * r * k, delta);
    return w * kpow(k, g.dim) * mass + c_m * kpow(k_m, g.dim) * C_s;
}

std::string report_json(const ApproxReport& rep)
{
    nlohmann::ordered_json j;
    j["mode"] = rep.mode;
    nlohmann::ordered_json params;
    params["r"] = rep.r;
    params["k"] = rep.k;
    params["delta"] = rep.delta;
    params["m"] = rep.m;
    params["eps"] = rep.eps;
    if (rep.p) params["p"] = *rep.p;
    j["params"] = std::move(params);
    j["c_m"] = rep.c_m;
    j["k_m"] = rep.k_m;
    j["certified_bound"] = rep.certified_bound;
    j["measured_mollification"] = rep.measured_mollification;
    j["measured_total"] = rep.measured_total;
    j["elapsed_s"] = rep.elapsed_s;
    return j.dump(2) + "\n";
}

namespace {

std::optional<std::span<const double>> anchor_span(const ApproxOptions& opts)
{
    if (!opts.anchor) return std::nullopt;
    return std::span<const double>(opts.anchor->data(), opts.anchor->size());
}

void check_cell_budget(double r, double k, double delta, int dim, long max_components)
{
    const double side = delta / std::sqrt(static_cast<double>(dim));
    double per_axis = std::ceil(2.0 * r * k / side) + 2.0;
    double est = per_axis;
    if (dim == 2) est *= per_axis;
    if (est > static_cast<double>(max_components))
        fail(errc::budget_exceeded, "partition at delta=" + format_double(delta) + " needs about " +
                                        std::to_string(static_cast<long long>(est)) +
                                        " cells, over the limit of " + std::to_string(max_components));
}

double grid_slack_bound(const ScalarField& a, const ScalarField& b, const GridSpec& grid)
{
    if (!a.lipschitz || !b.lipschitz) return std::numeric_limits<double>::quiet_NaN();
    double diag2 = 0.0;
    for (double hw : grid.half_width) {
        const double step = 2.0 * hw / static_cast<double>(grid.points_per_axis - 1);
        diag2 += step * step;
    }
    return (*a.lipschitz + *b.lipschitz) * 0.5 * std::sqrt(diag2);
}

} // namespace

std::pair<Mixture, ApproxReport> approximate_uniform(const DensitySpec& f, const DensitySpec& g,
                                                     const Box& K, double eps,
                                                     const ApproxOptions& opts)
{
    const auto t0 = clock_type::now();
    if (!(eps > 0.0)) fail(errc::invalid_parameter, "eps must be > 0");
    const int dim = box_dim(K);
    if (f.dim != dim || g.dim != dim)
        fail(errc::dimension_error, "target/kernel/box dims must agree");
    if (g.continuity != ContinuityClass::continuous)
        fail(errc::continuity_required, "kernel '" + g.family + "' must be continuous for the uniform mode");

    const double margin = opts.margin;
    const double tau = opts.tau.value_or(margin / 2.0);
    const TruncationResult tr = truncate(f, K, margin, tau, true);

    const BandwidthResult bw =
        select_bandwidth(tr, g, eps / 2.0, NormSpec::sup_on_ball(tr.r), opts.bandwidth);
    const double k = bw.k;
    const double kn = kpow(k, dim);

    /* delta from the modulus: w(g, 2rk, delta) kn mass <= eps/4. */
    const double target = eps / 4.0;
    const double delta_max = 2.0 * tr.r * k * std::sqrt(static_cast<double>(dim));
    double delta = delta_max;
    const double denom = kn * std::max(tr.mass, 1e-300);
    if (modulus_of_continuity(g, 2.0 * tr.r * k, delta_max) * denom > target) {
        if (g.lipschitz) {
            delta = std::min(target / ((*g.lipschitz) * denom), delta_max);
        } else {
            int guard = 0;
            while (modulus_of_continuity(g, 2.0 * tr.r * k, delta) * denom > target) {
                delta *= 0.5;
                if (++guard > 60)
                    fail(errc::budget_exceeded, "modulus refinement stalled before reaching eps/4");
            }
        }
    }

    check_cell_budget(tr.r, k, delta, dim, opts.max_components);
    const CellPartition part = build_partition(tr.r, k, delta, dim, anchor_span(opts));
    if (static_cast<long>(part.cells.size()) > opts.max_components)
        fail(errc::budget_exceeded, "partition kept " + std::to_string(part.cells.size()) +
                                        " cells, over the limit of " + std::to_string(opts.max_components));

    const DiscretizeResult disc = discretize(tr, g, k, part, eps / 4.0, opts.quad_order);
    const double cb =
        certified_bound(g, part.radius / k, k, delta, tr.mass, disc.c_m, disc.k_m, disc.C_s);

    GridSpec grid;
    grid.center.resize(dim);
    grid.half_width.resize(dim);
    for (int a = 0; a < dim; ++a) {
        grid.center[a] = 0.5 * (K.lo[a] + K.hi[a]);
        grid.half_width[a] = 0.5 * (K.hi[a] - K.lo[a]);
    }
    grid.points_per_axis = opts.grid_points;
    const ScalarField ffield = field_of(f);
    const ScalarField mfield = field_of(disc.mixture);
    const SupResult sup = sup_norm_diff_on_grid(ffield, mfield, grid);

    ApproxReport rep;
    rep.mode = "uniform";
    rep.r = tr.r;
    rep.k = k;
    rep.delta = delta;
    rep.m = static_cast<long>(disc.mixture.components.size());
    rep.eps = eps;
    rep.c_m = disc.c_m;
    rep.k_m = disc.k_m;
    rep.certified_bound = cb;
    rep.measured_mollification = bw.measured_error;
    rep.measured_total = sup.value;
    rep.grid_slack = grid_slack_bound(ffield, mfield, grid);
    rep.elapsed_s = seconds_since(t0);
    return {disc.mixture, rep};
}

std::pair<Mixture, ApproxReport> approximate_lp(const DensitySpec& f, const DensitySpec& g,
                                                double p, double eps, const ApproxOptions& opts)
{
    const auto t0 = clock_type::now();
    if (!(p >= 1.0)) fail(errc::invalid_parameter, "p must be >= 1");
    if (!(eps > 0.0)) fail(errc::invalid_parameter, "eps must be > 0");
    if (f.dim != g.dim) fail(errc::dimension_error, "target/kernel dims must agree");
    const int dim = f.dim;
    if (!g.ess_bound) fail(errc::ess_bound_required, "kernel '" + g.family + "' carries no ess_bound");
    if (!f.ess_bound) fail(errc::ess_bound_required, "target '" + f.family + "' carries no ess_bound");

    /* Ball capturing target mass >= 1 - eta. */
    double R0;
    if (f.support_radius) {
        R0 = *f.support_radius;
    } else if (f.tail_mass) {
        R0 = effective_radius(f, opts.eta);
    } else {
        R0 = 1.0;
        auto fe = f.eval;
        for (int guard = 0;; ++guard) {
            std::vector<double> lo(dim, -R0), hi(dim, R0);
            const double inside = integrate_box(fe, lo, hi, f.breakpoints, {1e-8, 400000});
            if (inside >= 1.0 - opts.eta) break;
            if (guard > 40) fail(errc::budget_exceeded, "target mass capture did not converge");
            R0 *= 2.0;
        }
    }
    R0 = std::max(R0, 0.5);

    Box K;
    K.lo.assign(dim, -R0);
    K.hi.assign(dim, R0);
    const double margin = opts.margin;
    const double tau = opts.tau.value_or(margin / 2.0);
    const TruncationResult tr = truncate(f, K, margin, tau, false);

    const BandwidthResult bw = select_bandwidth(tr, g, eps / 2.0, NormSpec::lp(p), opts.bandwidth);
    const double k = bw.k;

    const double Rmeas = tr.support_radius + effective_radius(g, 1e-16) / k;
    const ScalarField conv = convolution_field(g, k, tr.h, opts.bandwidth.quad_tol);
    const double conv_tail = convolution_lp_tail(g, k, tr.mass, tr.support_radius, Rmeas, p);
    const double split = std::pow(2.0, p - 1.0);

    double delta = std::min(2.0, tr.r * k);
    DiscretizeResult disc;
    CellPartition part;
    double disc_err = 0.0;
    for (int halvings = 0;; ++halvings) {
        check_cell_budget(tr.r, k, delta, dim, opts.max_components);
        part = build_partition(tr.r, k, delta, dim, anchor_span(opts));
        if (static_cast<long>(part.cells.size()) > opts.max_components)
            fail(errc::budget_exceeded, "partition kept " + std::to_string(part.cells.size()) +
                                            " cells, over the limit of " +
                                            std::to_string(opts.max_components));
        disc = discretize(tr, g, k, part, eps / 4.0, opts.quad_order);
        const double mix_tail = mixture_lp_tail(disc.mixture, Rmeas, p);
        const double tail_bound = split * (conv_tail + mix_tail);
        disc_err = lp_norm_diff(conv, field_of(disc.mixture), p, Rmeas, tail_bound);
        if (disc_err <= eps / 4.0) break;
        if (halvings >= 40)
            fail(errc::budget_exceeded, "delta halving did not reach eps/4; last L_p gap " +
                                            format_double(disc_err));
        delta *= 0.5;
    }

    const double Rtot = std::max(Rmeas, effective_radius(f, 1e-12));
    const double total_tail =
        split * (density_lp_tail(f, Rtot, p) + mixture_lp_tail(disc.mixture, Rtot, p));
    const double total = lp_norm_diff(field_of(f), field_of(disc.mixture), p, Rtot, total_tail);

    const double cb =
        certified_bound(g, part.radius / k, k, delta, tr.mass, disc.c_m, disc.k_m, disc.C_s);

    if (total > eps)
        fail(errc::budget_exceeded, "measured L_p error " + format_double(total) +
                                        " misses the target " + format_double(eps));

    ApproxReport rep;
    rep.mode = "lp";
    rep.r = tr.r;
    rep.k = k;
    rep.delta = delta;
    rep.m = static_cast<long>(disc.mixture.components.size());
    rep.eps = eps;
    rep.p = p;
    rep.c_m = disc.c_m;
    rep.k_m = disc.k_m;
    rep.certified_bound = cb;
    rep.measured_mollification = bw.measured_error;
    rep.measured_total = total;
    rep.grid_slack = 0.0;
    rep.elapsed_s = seconds_since(t0);
    return {disc.mixture, rep};
}

} // namespace mixturecraft
