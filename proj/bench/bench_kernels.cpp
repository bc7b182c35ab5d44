// Compares the OpenMP map/quadrature kernels against their serial reference
// twins: wall time plus the max absolute difference, which must be 0 because
// the parallel versions write disjoint slots.

#include "mixturecraft/density.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/kernels.hpp"
#include "mixturecraft/partition.hpp"
#include "mixturecraft/quadrature.hpp"
#include "mixturecraft/truncate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

namespace mc = mixturecraft;

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_of(F&& fn)
{
    const auto t0 = clock_type::now();
    fn();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void report(const char* name, double serial_s, double parallel_s, double diff)
{
    std::printf("%-14s serial %8.4fs  parallel %8.4fs  speedup %5.2fx  max_abs_diff %g\n",
                name, serial_s, parallel_s, serial_s / parallel_s, diff);
}

} // namespace

int main()
{
    const mc::DensitySpec f = mc::builtin_density("gmix", {0.5, -1.0, 0.5, 0.5, 1.0, 0.5});
    const mc::DensitySpec g = mc::builtin_density("gaussian", {0.0, 1.0});
    const mc::ScalarField ff = mc::field_of(f);

    mc::GridSpec grid;
    grid.center = {0.0};
    grid.half_width = {4.0};
    grid.points_per_axis = 2000001;
    std::vector<double> gs, gp;
    const double t_gs = time_of([&] { gs = mc::map_on_grid_serial(ff, grid); });
    const double t_gp = time_of([&] { gp = mc::map_on_grid(ff, grid); });
    report("map_on_grid", t_gs, t_gp, max_abs_diff(gs, gp));

    std::vector<double> pts;
    pts.reserve(2000000);
    for (int i = 0; i < 2000000; ++i) pts.push_back(-4.0 + 8.0 * i / 1999999.0);
    std::vector<double> ps, pp;
    const double t_ps = time_of([&] { ps = mc::map_on_points_serial(ff, pts, 1); });
    const double t_pp = time_of([&] { pp = mc::map_on_points(ff, pts, 1); });
    report("map_on_points", t_ps, t_pp, max_abs_diff(ps, pp));

    mc::Box K;
    K.lo = {-3.0};
    K.hi = {3.0};
    const mc::TruncationResult tr = mc::truncate(f, K, 1.0, 0.5);
    const double k = 16.0;
    const mc::CellPartition part = mc::build_partition(tr.r, k, 0.002, 1);
    const mc::GLRule& rule = mc::gl_rule(8);
    std::vector<double> ws, wp;
    const double t_ws = time_of([&] { ws = mc::cell_masses_serial(tr.h, part, k, rule); });
    const double t_wp = time_of([&] { wp = mc::cell_masses(tr.h, part, k, rule); });
    report("cell_masses", t_ws, t_wp, max_abs_diff(ws, wp));

    return 0;
}
