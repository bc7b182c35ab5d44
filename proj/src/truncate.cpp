#include "mixturecraft/truncate.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mixturecraft {

int box_dim(const Box& K)
{
    const int dim = static_cast<int>(K.lo.size());
    if (dim < 1 || dim > 2 || K.hi.size() != K.lo.size())
        fail(errc::invalid_parameter, "box must have matching lo/hi of dim 1 or 2");
    for (int a = 0; a < dim; ++a)
        if (!(K.lo[a] < K.hi[a]))
            fail(errc::invalid_parameter, "box needs lo < hi on every axis");
    return dim;
}

double box_enclosing_radius(const Box& K)
{
    const int dim = box_dim(K);
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double m = std::max(std::abs(K.lo[a]), std::abs(K.hi[a]));
        r2 += m * m;
    }
    return std::sqrt(r2);
}

TruncationResult truncate(const DensitySpec& f, const Box& K, double margin, double tau,
                          bool require_continuity, double mass_tol)
{
    const int dim = box_dim(K);
    if (dim != f.dim)
        fail(errc::dimension_error, "box dim mismatches density dim");
    if (!(margin > 0.0))
        fail(errc::invalid_parameter, "margin must be > 0");
    if (!(tau > 0.0) || tau >= margin)
        fail(errc::invalid_parameter, "tau must satisfy 0 < tau < margin");
    if (require_continuity && f.continuity != ContinuityClass::continuous)
        fail(errc::continuity_required, "density '" + f.family + "' is not continuous");

    TruncationResult out;
    out.bump_inner = K;
    out.bump_width = tau;
    out.r = box_enclosing_radius(K) + margin;

    const auto lo = K.lo, hi = K.hi;
    auto feval = f.eval;
    out.h.dim = dim;
    out.h.eval = [lo, hi, tau, dim, feval](std::span<const double> x) {
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double g = std::max({lo[a] - x[a], x[a] - hi[a], 0.0});
            d2 += g * g;
        }
        if (d2 >= tau * tau) return 0.0;
        const double fx = feval(x);
        if (fx == 0.0) return 0.0;
        if (d2 == 0.0) return fx;
        const double t = std::sqrt(d2) / tau;
        const double u = 1.0 - t * t * (3.0 - 2.0 * t);
        return u * fx;
    };

    /* Enclosing radius of the tau-enlarged box, capped by the target's own
     * numeric support. */
    {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double m = std::max(std::abs(lo[a] - tau), std::abs(hi[a] + tau));
            r2 += m * m;
        }
        out.support_radius = std::min(std::sqrt(r2), f.numeric_support);
    }
    out.h.domain_radius = out.support_radius;

    out.h.breakpoints.assign(dim, {});
    for (int a = 0; a < dim; ++a) {
        out.h.breakpoints[a] = {lo[a] - tau, lo[a], hi[a], hi[a] + tau};
        if (static_cast<int>(f.breakpoints.size()) > a)
            for (double t : f.breakpoints[a]) out.h.breakpoints[a].push_back(t);
        std::sort(out.h.breakpoints[a].begin(), out.h.breakpoints[a].end());
    }

    /* Lipschitz of u*f: |u| <= 1 and |grad u| <= 1.5/tau (max slope of the
     * cubic ramp), so L_h <= L_f + 1.5/tau * sup f. */
    if (f.lipschitz && f.ess_bound)
        out.h.lipschitz = *f.lipschitz + 1.5 / tau * (*f.ess_bound);

    std::vector<double> ilo(dim), ihi(dim);
    for (int a = 0; a < dim; ++a) {
        ilo[a] = std::max(lo[a] - tau, -out.support_radius);
        ihi[a] = std::min(hi[a] + tau, out.support_radius);
        if (ilo[a] >= ihi[a]) { // support entirely off-box
            ilo[a] = lo[a] - tau;
            ihi[a] = lo[a] - tau;
        }
    }
    QuadOptions qopt;
    qopt.tol = mass_tol;
    if (dim == 1) {
        auto h1 = out.h.eval;
        out.mass = integrate_adaptive([h1](double x) { return h1(std::span<const double>(&x, 1)); },
                                      ilo[0], ihi[0], out.h.breakpoints[0], qopt);
    } else {
        out.mass = integrate_box(out.h.eval, ilo, ihi, out.h.breakpoints, qopt);
    }
    return out;
}

} // namespace mixturecraft
