#include "mixturecraft/mixture.hpp"
#include "mixturecraft/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>

namespace mixturecraft {

using ojson = nlohmann::ordered_json;

std::string format_double(double v)
{
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_strict(const std::string& s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        fail(errc::parse_error, "bad decimal literal '" + s + "'");
    return v;
}

/* Kahan-compensated sum keeps the simplex check meaningful for large m. */
double weight_sum(const std::vector<MixtureComponent>& comps)
{
    double sum = 0.0, comp = 0.0;
    for (const auto& c : comps) {
        const double y = c.weight - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void expect_keys(const ojson& obj, std::initializer_list<const char*> keys, const char* where)
{
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys)
            if (item.key() == k) known = true;
        if (!known)
            fail(errc::parse_error, std::string("unexpected key '") + item.key() + "' in " + where);
    }
    for (const char* k : keys)
        if (!obj.contains(k))
            fail(errc::parse_error, std::string("missing key '") + k + "' in " + where);
}

} // namespace

Mixture make_mixture(const DensitySpec& kernel, std::vector<MixtureComponent> components,
                     double simplex_tol)
{
    if (components.empty())
        fail(errc::invalid_mixture, "mixture needs at least one component");
    for (const auto& c : components) {
        if (!std::isfinite(c.weight) || c.weight < 0.0)
            fail(errc::invalid_mixture, "component weight must be finite and >= 0, got " +
                                            format_double(c.weight));
        if (!std::isfinite(c.scale) || !(c.scale > 0.0))
            fail(errc::invalid_mixture, "component scale must be finite and > 0, got " +
                                            format_double(c.scale));
        if (static_cast<int>(c.location.size()) != kernel.dim)
            fail(errc::invalid_mixture, "component location dim mismatches kernel dim");
        for (double x : c.location)
            if (!std::isfinite(x))
                fail(errc::invalid_mixture, "component location must be finite");
    }
    const double s = weight_sum(components);
    if (std::abs(s - 1.0) > simplex_tol)
        fail(errc::invalid_mixture, "component weights sum to " + format_double(s) +
                                        ", outside tolerance " + format_double(simplex_tol));
    Mixture m;
    m.kernel = kernel;
    m.dim = kernel.dim;
    m.components = std::move(components);
    return m;
}

double eval_mixture(const Mixture& m, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != m.dim)
        fail(errc::dimension_error, "mixture has dim " + std::to_string(m.dim) + ", point has dim " +
                                        std::to_string(x.size()));
    double u[2];
    double acc = 0.0;
    for (const auto& c : m.components) {
        const double inv = 1.0 / c.scale;
        double jac = inv;
        for (int a = 0; a < m.dim; ++a) u[a] = (x[a] - c.location[a]) * inv;
        if (m.dim == 2) jac *= inv;
        acc += c.weight * jac * m.kernel.eval(std::span<const double>(u, m.dim));
    }
    return acc;
}

Mixture shift_mixture(const Mixture& m, std::span<const double> offset)
{
    if (static_cast<int>(offset.size()) != m.dim)
        fail(errc::dimension_error, "shift offset dim mismatches mixture dim");
    Mixture out = m;
    for (auto& c : out.components)
        for (int a = 0; a < m.dim; ++a) c.location[a] += offset[a];
    return out;
}

std::string serialize_mixture(const Mixture& m)
{
    ojson j;
    j["dim"] = m.dim;
    ojson kernel;
    kernel["family"] = m.kernel.family;
    kernel["params"] = m.kernel.params;
    j["kernel"] = std::move(kernel);
    ojson comps = ojson::array();
    for (const auto& c : m.components) {
        ojson jc;
        jc["w"] = format_double(c.weight);
        ojson mu = ojson::array();
        for (double x : c.location) mu.push_back(format_double(x));
        jc["mu"] = std::move(mu);
        jc["sigma"] = format_double(c.scale);
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    return j.dump(2) + "\n";
}

Mixture parse_mixture(std::string_view text)
{
    ojson j = ojson::parse(text, nullptr, false);
    if (j.is_discarded())
        fail(errc::parse_error, "input is not valid JSON");
    if (!j.is_object())
        fail(errc::parse_error, "top level must be an object");
    expect_keys(j, {"dim", "kernel", "components"}, "mixture");

    if (!j["dim"].is_number_integer())
        fail(errc::parse_error, "'dim' must be an integer");
    const int dim = j["dim"].get<int>();
    if (dim != 1 && dim != 2)
        fail(errc::parse_error, "'dim' must be 1 or 2");

    const ojson& jk = j["kernel"];
    if (!jk.is_object())
        fail(errc::parse_error, "'kernel' must be an object");
    expect_keys(jk, {"family", "params"}, "kernel");
    if (!jk["family"].is_string() || !jk["params"].is_array())
        fail(errc::parse_error, "'kernel' needs a string family and numeric params");
    std::vector<double> params;
    for (const auto& v : jk["params"]) {
        if (!v.is_number())
            fail(errc::parse_error, "kernel params must be numbers");
        params.push_back(v.get<double>());
    }
    DensitySpec kernel = builtin_density(jk["family"].get<std::string>(), params);
    if (kernel.dim != dim)
        fail(errc::invalid_mixture, "kernel dim mismatches mixture dim");

    const ojson& jcs = j["components"];
    if (!jcs.is_array() || jcs.empty())
        fail(errc::parse_error, "'components' must be a nonempty array");
    std::vector<MixtureComponent> comps;
    comps.reserve(jcs.size());
    for (const auto& jc : jcs) {
        if (!jc.is_object())
            fail(errc::parse_error, "each component must be an object");
        expect_keys(jc, {"w", "mu", "sigma"}, "component");
        if (!jc["w"].is_string() || !jc["sigma"].is_string() || !jc["mu"].is_array())
            fail(errc::parse_error, "component fields must be decimal strings ('w', 'sigma') and an array ('mu')");
        MixtureComponent c;
        c.weight = parse_double_strict(jc["w"].get<std::string>());
        c.scale = parse_double_strict(jc["sigma"].get<std::string>());
        for (const auto& v : jc["mu"]) {
            if (!v.is_string())
                fail(errc::parse_error, "'mu' entries must be decimal strings");
            c.location.push_back(parse_double_strict(v.get<std::string>()));
        }
        if (static_cast<int>(c.location.size()) != dim)
            fail(errc::parse_error, "'mu' must have one entry per dimension");
        comps.push_back(std::move(c));
    }
    return make_mixture(kernel, std::move(comps), 1e-9);
}

} // namespace mixturecraft
