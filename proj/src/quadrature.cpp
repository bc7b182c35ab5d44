#include "mixturecraft/quadrature.hpp"
#include "mixturecraft/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace mixturecraft {

namespace {

GLRule compute_gl(int n)
{
    GLRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration on P_n with the Chebyshev-based initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

} // namespace

const GLRule& gl_rule(int order)
{
    if (order < 2 || order > 64)
        fail(errc::invalid_parameter, "quadrature order must be in [2,64], got " + std::to_string(order));
    static std::map<int, GLRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

double gk15(const Fn1& f, double a, double b, double* err)
{
    // QUADPACK dqk15 abscissae/weights (positive half).
    static constexpr std::array<double, 8> xgk = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
    static constexpr std::array<double, 8> wgk = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    static constexpr std::array<double, 4> wg = {
        0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = wgk[7] * fc;
    double resg = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double f1 = f(c - h * xgk[j]);
        const double f2 = f(c + h * xgk[j]);
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    resk *= h;
    resg *= h;
    if (err) *err = std::abs(resk - resg);
    return resk;
}

double integrate_adaptive(const Fn1& f, double a, double b,
                          std::span<const double> breakpoints, QuadOptions opt)
{
    if (!(a < b)) return 0.0;

    std::vector<double> cuts;
    cuts.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) cuts.push_back(t);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    struct Seg {
        double a, b, val, err;
    };
    std::vector<Seg> todo;
    const double total_len = b - a;
    int panels = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Seg s{cuts[i], cuts[i + 1], 0.0, 0.0};
        s.val = gk15(f, s.a, s.b, &s.err);
        ++panels;
        todo.push_back(s);
    }

    const double width_floor = 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
    double sum = 0.0;
    while (!todo.empty()) {
        const Seg s = todo.back();
        todo.pop_back();
        const double local_tol = opt.tol * ((s.b - s.a) / total_len);
        if (s.err <= local_tol || (s.b - s.a) <= width_floor) {
            sum += s.val;
            continue;
        }
        panels += 2;
        if (panels > opt.max_intervals)
            fail(errc::quadrature_budget, "adaptive quadrature exceeded " +
                                              std::to_string(opt.max_intervals) + " panels");
        const double mid = 0.5 * (s.a + s.b);
        Seg l{s.a, mid, 0.0, 0.0}, r{mid, s.b, 0.0, 0.0};
        l.val = gk15(f, l.a, l.b, &l.err);
        r.val = gk15(f, r.a, r.b, &r.err);
        todo.push_back(l);
        todo.push_back(r);
    }
    return sum;
}

double gl_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
              const GLRule& rule)
{
    const int dim = static_cast<int>(lo.size());
    const int n = static_cast<int>(rule.nodes.size());
    double pt[2];
    if (dim == 1) {
        const double c = 0.5 * (lo[0] + hi[0]);
        const double h = 0.5 * (hi[0] - lo[0]);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            pt[0] = c + h * rule.nodes[i];
            acc += rule.weights[i] * f(std::span<const double>(pt, 1));
        }
        return acc * h;
    }
    const double cx = 0.5 * (lo[0] + hi[0]), hx = 0.5 * (hi[0] - lo[0]);
    const double cy = 0.5 * (lo[1] + hi[1]), hy = 0.5 * (hi[1] - lo[1]);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        pt[0] = cx + hx * rule.nodes[i];
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            pt[1] = cy + hy * rule.nodes[j];
            row += rule.weights[j] * f(std::span<const double>(pt, 2));
        }
        acc += rule.weights[i] * row;
    }
    return acc * hx * hy;
}

namespace {

/* Tile boundaries for one axis: each breakpoint segment split into `per_seg`
 * equal tiles. */
std::vector<double> axis_tiles(double lo, double hi, const std::vector<double>& bps, int per_seg)
{
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double t : bps)
        if (t > lo && t < hi) cuts.push_back(t);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> out;
    out.push_back(cuts.front());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        for (int j = 1; j <= per_seg; ++j)
            out.push_back(a + (b - a) * (static_cast<double>(j) / per_seg));
    }
    out.back() = hi;
    return out;
}

double composite_level(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                       const std::vector<std::vector<double>>& breakpoints, int per_seg,
                       const GLRule& rule)
{
    const int dim = static_cast<int>(lo.size());
    const auto tx = axis_tiles(lo[0], hi[0], breakpoints.empty() ? std::vector<double>{} : breakpoints[0], per_seg);
    if (dim == 1) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < tx.size(); ++i) {
            const double a[1] = {tx[i]}, b[1] = {tx[i + 1]};
            acc += gl_box(f, std::span<const double>(a, 1), std::span<const double>(b, 1), rule);
        }
        return acc;
    }
    const auto ty = axis_tiles(lo[1], hi[1], breakpoints.size() > 1 ? breakpoints[1] : std::vector<double>{}, per_seg);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < tx.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ty.size(); ++j) {
            const double a[2] = {tx[i], ty[j]}, b[2] = {tx[i + 1], ty[j + 1]};
            acc += gl_box(f, std::span<const double>(a, 2), std::span<const double>(b, 2), rule);
        }
    }
    return acc;
}

double refine_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                  const std::vector<std::vector<double>>& breakpoints,
                  bool relative, double tol, double abs_floor, int max_per_seg)
{
    const int dim = static_cast<int>(lo.size());
    if (dim < 1 || dim > 2)
        fail(errc::invalid_parameter, "box quadrature supports dim 1 or 2");
    for (int a = 0; a < dim; ++a)
        if (!(lo[a] <= hi[a]))
            fail(errc::invalid_parameter, "box quadrature needs lo <= hi");

    const GLRule& rule = gl_rule(8);
    double prev = composite_level(f, lo, hi, breakpoints, 1, rule);
    for (int per_seg = 2; per_seg <= max_per_seg; per_seg *= 2) {
        const double cur = composite_level(f, lo, hi, breakpoints, per_seg, rule);
        const double diff = std::abs(cur - prev);
        const double gate = relative ? tol * std::max(std::abs(cur), abs_floor) : tol;
        if (diff <= gate) return cur;
        prev = cur;
    }
    fail(errc::quadrature_budget, "composite box quadrature failed to converge within tile budget");
}

} // namespace

double integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                     const std::vector<std::vector<double>>& breakpoints, QuadOptions opt)
{
    const int max_per_seg = (lo.size() == 1) ? 1 << 14 : 1 << 8;
    return refine_box(f, lo, hi, breakpoints, false, opt.tol, 0.0, max_per_seg);
}

double integrate_box_rel(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                         const std::vector<std::vector<double>>& breakpoints,
                         double rel_tol, double abs_floor, int max_tiles)
{
    return refine_box(f, lo, hi, breakpoints, true, rel_tol, abs_floor, max_tiles);
}

} // namespace mixturecraft
