#include "mixturecraft/field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace mixturecraft {

ScalarField field_of(const DensitySpec& d)
{
    ScalarField f;
    f.dim = d.dim;
    f.eval = d.eval;
    f.domain_radius = d.numeric_support;
    f.breakpoints = d.breakpoints;
    f.lipschitz = d.lipschitz;
    return f;
}

ScalarField field_of(const Mixture& m)
{
    auto held = std::make_shared<const Mixture>(m);
    ScalarField f;
    f.dim = m.dim;
    f.eval = [held](std::span<const double> x) { return eval_mixture(*held, x); };

    double radius = 0.0;
    for (const auto& c : m.components) {
        double loc = 0.0;
        for (double v : c.location) loc += v * v;
        radius = std::max(radius, std::sqrt(loc) + c.scale * m.kernel.numeric_support);
    }
    f.domain_radius = radius;

    if (m.kernel.lipschitz) {
        double lip = 0.0;
        for (const auto& c : m.components) {
            double jac = 1.0 / c.scale;
            for (int a = 0; a < m.dim; ++a) jac /= c.scale;
            lip += c.weight * jac * (*m.kernel.lipschitz);
        }
        f.lipschitz = lip;
    }

    /* Kernel kinks replicate at every component; only worth splitting on for
     * small mixtures. */
    if (!m.kernel.breakpoints.empty() && m.components.size() * m.kernel.breakpoints[0].size() <= 64) {
        f.breakpoints.assign(m.dim, {});
        for (const auto& c : m.components)
            for (int a = 0; a < m.dim; ++a)
                for (double t : m.kernel.breakpoints[a])
                    f.breakpoints[a].push_back(c.location[a] + c.scale * t);
        for (auto& v : f.breakpoints) std::sort(v.begin(), v.end());
    }
    return f;
}

ScalarField zero_field(int dim)
{
    ScalarField f;
    f.dim = dim;
    f.eval = [](std::span<const double>) { return 0.0; };
    f.domain_radius = 0.0;
    f.lipschitz = 0.0;
    return f;
}

} // namespace mixturecraft
