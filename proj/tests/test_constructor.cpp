#include "mixturecraft/analysis.hpp"
#include "mixturecraft/constructor.hpp"
#include "mixturecraft/density.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/field.hpp"
#include "mixturecraft/kernels.hpp"
#include "mixturecraft/partition.hpp"
#include "mixturecraft/truncate.hpp"

#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace mc = mixturecraft;

namespace {

const double kPhi0 = 0.3989422804014327;

mc::DensitySpec gauss() { return mc::builtin_density("gaussian", {0.0, 1.0}); }

/* Truncation window so wide the windowed target is the gaussian itself on the
 * measurement ball, making the closed-form smoothing error usable. */
mc::TruncationResult near_identity()
{
    return mc::truncate(gauss(), {{-8.0}, {8.0}}, 1.0, 0.5);
}

double smoothing_error_closed_form(double k)
{
    return kPhi0 * (1.0 - 1.0 / std::sqrt(1.0 + 1.0 / (k * k)));
}

mc::TruncationResult fake_compact(std::function<double(double)> f1, double mass)
{
    mc::TruncationResult tr;
    tr.h.dim = 1;
    tr.h.eval = [f1](std::span<const double> x) { return f1(x[0]); };
    tr.h.domain_radius = 1.0;
    tr.support_radius = 1.0;
    tr.r = 1.0;
    tr.mass = mass;
    return tr;
}

double tri1(double x) { return std::abs(x) < 1.0 ? 1.0 - std::abs(x) : 0.0; }

} // namespace

TEST_CASE("the measured smoothing error tracks the gaussian closed form")
{
    const auto tr = near_identity();
    const mc::DensitySpec g = gauss();
    for (double k : {1.0, 2.0, 4.0}) {
        const double got = mc::mollification_error(tr, g, k, mc::NormSpec::sup_on_ball(tr.r));
        CHECK(got == doctest::Approx(smoothing_error_closed_form(k)).epsilon(1e-3));
    }
}

TEST_CASE("the measured L2 smoothing error matches the two-gaussian norm gap")
{
    const auto tr = near_identity();
    const double pi = std::acos(-1.0);
    const double a = 1.0 / (2.0 * std::sqrt(pi));
    const double b = 1.0 / (2.0 * std::sqrt(2.0 * pi));
    const double c = 1.0 / (std::sqrt(2.0 * pi) * std::sqrt(3.0));
    const double want = std::sqrt(a + b - 2.0 * c);
    const double got = mc::mollification_error(tr, gauss(), 1.0, mc::NormSpec::lp(2.0));
    CHECK(got == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("bandwidth doubling stops at the first adequate k and keeps its trail")
{
    const auto tr = near_identity();
    const mc::DensitySpec g = gauss();

    const auto bw = mc::select_bandwidth(tr, g, 0.02, mc::NormSpec::sup_on_ball(tr.r));
    CHECK(bw.k == 4.0);
    REQUIRE(bw.trail.size() == 3);
    for (std::size_t i = 0; i < bw.trail.size(); ++i) {
        const double k = std::pow(2.0, static_cast<double>(i));
        CHECK(bw.trail[i].first == k);
        CHECK(bw.trail[i].second ==
              doctest::Approx(smoothing_error_closed_form(k)).epsilon(1e-3));
        if (i > 0) CHECK(bw.trail[i].second < bw.trail[i - 1].second);
    }
    CHECK(bw.measured_error == bw.trail.back().second);
    CHECK(bw.measured_error <= 0.02);

    CHECK(mc::select_bandwidth(tr, g, 0.045, mc::NormSpec::sup_on_ball(tr.r)).k == 2.0);
    CHECK(mc::select_bandwidth(tr, g, 0.12, mc::NormSpec::sup_on_ball(tr.r)).k == 1.0);
}

TEST_CASE("bandwidth selection reports failure once the cap is passed")
{
    const auto tr = near_identity();
    mc::BandwidthOptions opts;
    opts.k_cap = 4.0;
    try {
        (void)mc::select_bandwidth(tr, gauss(), 1e-9, mc::NormSpec::sup_on_ball(tr.r), opts);
        FAIL_CHECK("expected the cap to be reported");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::bandwidth_not_found);
    }

    CHECK_THROWS_AS((void)mc::select_bandwidth(tr, gauss(), 0.0, mc::NormSpec::sup_on_ball(tr.r)),
                    mc::Error);
    mc::BandwidthOptions bad;
    bad.k0 = 0.0;
    CHECK_THROWS_AS(
        (void)mc::select_bandwidth(tr, gauss(), 0.1, mc::NormSpec::sup_on_ball(tr.r), bad),
        mc::Error);
}

TEST_CASE("discretizing a fully covered triangle keeps two exact halves")
{
    const auto tr = fake_compact(tri1, 1.0);
    mc::CellPartition part;
    part.dim = 1;
    part.radius = 1.0;
    part.side = 1.0;
    part.delta = 1.0;
    part.cells = {{{-1.0}, {0.0}, {-0.5}}, {{0.0}, {1.0}, {0.5}}};

    const auto dr = mc::discretize(tr, gauss(), 1.0, part, 0.1);
    REQUIRE(dr.mixture.components.size() == 2);
    CHECK(dr.kept_cells == 2);
    CHECK(dr.c_m == 0.0);
    CHECK(dr.k_m == 0.0);
    CHECK(dr.mixture.components[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dr.mixture.components[1].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dr.mixture.components[0].location[0] == -0.5);
    CHECK(dr.mixture.components[1].location[0] == 0.5);
    CHECK(dr.mixture.components[0].scale == 1.0);
    CHECK(dr.mixture.components[1].scale == 1.0);
}

TEST_CASE("cell weights agree with independent per-cell integrals")
{
    const auto tr = mc::truncate(gauss(), {{-1.0}, {1.0}}, 1.0, 0.5);
    const double k = 4.0;
    const auto part = mc::build_partition(tr.r, k, 0.1, 1);
    const auto dr = mc::discretize(tr, gauss(), k, part, 0.02);

    REQUIRE(dr.mixture.components.size() == static_cast<std::size_t>(dr.kept_cells) + 1);
    CHECK(dr.c_m > 0.0);
    CHECK(dr.c_m == doctest::Approx(1.0 - tr.mass).epsilon(1e-6));
    CHECK(dr.C_s == doctest::Approx(kPhi0).epsilon(1e-15));
    CHECK(dr.s == 1.0);
    CHECK(dr.k_m == doctest::Approx(std::min(1.0 / (part.radius / k),
                                             0.02 / (2.0 * dr.c_m * dr.C_s)))
                        .epsilon(1e-12));
    // the leftover stays under half the tail budget on the covered ball
    CHECK(dr.c_m * dr.k_m * dr.C_s <= 0.01 * (1.0 + 1e-9));

    double total = 0.0;
    for (const auto& c : dr.mixture.components) total += c.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // match each cell component to its cell via the representative point
    std::size_t ci = 0;
    for (const auto& cell : part.cells) {
        const double lo = cell.lo[0] / k, hi = cell.hi[0] / k;
        const double want = testutil::adaptive_simpson(
            [&](double x) { return tr.h.at1(x); }, lo, hi, 1e-13);
        if (want <= 1e-16) continue;
        REQUIRE(ci < dr.mixture.components.size() - 1);
        const auto& comp = dr.mixture.components[ci];
        CHECK(comp.location[0] == cell.rep[0] / k);
        CHECK(comp.scale == 1.0 / k);
        CHECK(comp.weight == doctest::Approx(want).epsilon(1e-8));
        ++ci;
    }
    CHECK(ci == dr.mixture.components.size() - 1);

    const auto& tail = dr.mixture.components.back();
    CHECK(tail.location[0] == 0.0);
    CHECK(tail.scale == 1.0 / dr.k_m);
    CHECK(tail.weight == dr.c_m);
}

TEST_CASE("weights summing past one are rejected as inconsistent quadrature")
{
    const auto tr = fake_compact([](double x) { return 2.0 * tri1(x); }, 2.0);
    const auto part = mc::build_partition(1.0, 1.0, 0.5, 1);
    try {
        (void)mc::discretize(tr, gauss(), 1.0, part, 0.1);
        FAIL_CHECK("expected an inconsistency");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::quadrature_inconsistency);
    }
}

TEST_CASE("a kernel that stays zero on every probed ball is rejected")
{
    const auto tr = fake_compact([](double x) { return 0.5 * tri1(x); }, 0.5);
    const auto part = mc::build_partition(1.0, 1.0, 0.5, 1);
    mc::DensitySpec dead;
    dead.family = "nullk";
    dead.dim = 1;
    dead.eval = [](std::span<const double>) { return 0.0; };
    try {
        (void)mc::discretize(tr, dead, 1.0, part, 0.1);
        FAIL_CHECK("expected the zero kernel to be reported");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::zero_kernel);
    }
}

TEST_CASE("discretize validates dimensions and support coverage")
{
    const auto tr = mc::truncate(gauss(), {{-1.0}, {1.0}}, 1.0, 0.5);
    const auto small = mc::build_partition(1.0, 4.0, 0.1, 1); // ball 4 < 1.5 * 4
    CHECK_THROWS_AS((void)mc::discretize(tr, gauss(), 4.0, small, 0.02), mc::Error);
    const auto part = mc::build_partition(tr.r, 4.0, 0.1, 1);
    CHECK_THROWS_AS((void)mc::discretize(tr, gauss(), -4.0, part, 0.02), mc::Error);
    CHECK_THROWS_AS((void)mc::discretize(tr, gauss(), 4.0, part, 0.0), mc::Error);
    CHECK_THROWS_AS(
        (void)mc::discretize(tr, mc::builtin_density("gaussian2", {0.0, 0.0, 1.0}), 4.0, part, 0.02),
        mc::Error);
}

TEST_CASE("the continuity modulus uses Lipschitz metadata when present")
{
    const mc::DensitySpec g = gauss();
    REQUIRE(g.lipschitz.has_value());
    REQUIRE(g.ess_bound.has_value());
    CHECK(mc::modulus_of_continuity(g, 8.0, 0.1) ==
          doctest::Approx(std::min(*g.lipschitz * 0.1, 2.0 * *g.ess_bound)).epsilon(1e-15));
    CHECK(mc::modulus_of_continuity(g, 8.0, 1e6) == doctest::Approx(2.0 * *g.ess_bound));

    const mc::DensitySpec t = mc::builtin_density("triangular", {-1.0, 0.0, 1.0});
    REQUIRE(t.lipschitz.has_value());
    CHECK(mc::modulus_of_continuity(t, 5.0, 0.3) == doctest::Approx(*t.lipschitz * 0.3));

    // without an ess bound the cap falls back to a lattice max
    mc::DensitySpec capped = gauss();
    capped.ess_bound.reset();
    CHECK(mc::modulus_of_continuity(capped, 8.0, 1e6) ==
          doctest::Approx(2.0 * kPhi0).epsilon(1e-6));
}

TEST_CASE("the lattice modulus brackets the true pair supremum")
{
    mc::DensitySpec ep = mc::builtin_density("epanechnikov", {0.0, 1.0});
    ep.lipschitz.reset();
    for (double delta : {0.05, 0.1, 0.2}) {
        // extremes sit against the support edge: 0.75 (2 delta - delta^2)
        const double want = 0.75 * (2.0 * delta - delta * delta);
        const double got = mc::modulus_of_continuity(ep, 2.0, delta);
        CHECK(got >= want * 0.999);
        CHECK(got <= want * 1.10);
    }

    double prev = 0.0;
    for (double delta : {0.02, 0.05, 0.1, 0.2, 0.41, 0.8, 1.7}) {
        const double got = mc::modulus_of_continuity(ep, 2.0, delta);
        CHECK(got >= prev);
        prev = got;
    }

    CHECK_THROWS_AS(
        (void)mc::modulus_of_continuity(mc::builtin_density("uniform", {0.0, 1.0}), 2.0, 0.1),
        mc::Error);
    CHECK_THROWS_AS((void)mc::modulus_of_continuity(ep, 0.0, 0.1), mc::Error);
    CHECK_THROWS_AS((void)mc::modulus_of_continuity(ep, 2.0, -0.1), mc::Error);
}

TEST_CASE("the certified bound combines the modulus term with the leftover term")
{
    const mc::DensitySpec g = gauss();
    const double w = std::min(*g.lipschitz * 0.01, 2.0 * *g.ess_bound);
    CHECK(mc::certified_bound(g, 4.0, 4.0, 0.01, 1.0, 0.0, 0.0, 0.0) ==
          doctest::Approx(w * 4.0).epsilon(1e-14));
    CHECK(mc::certified_bound(g, 4.0, 4.0, 0.01, 1.0, 0.01, 2.0, 0.4) ==
          doctest::Approx(w * 4.0 + 0.01 * 2.0 * 0.4).epsilon(1e-14));

    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        const double cb = mc::certified_bound(g, 4.0, 4.0, delta, 0.97, 0.01, 2.0, 0.4);
        CHECK(cb <= prev);
        prev = cb;
    }

    CHECK_THROWS_AS((void)mc::certified_bound(g, 0.0, 4.0, 0.01, 1.0, 0.0, 0.0, 0.0), mc::Error);
    CHECK_THROWS_AS((void)mc::certified_bound(g, 4.0, 4.0, 0.01, -1.0, 0.0, 0.0, 0.0), mc::Error);
    CHECK_THROWS_AS((void)mc::certified_bound(g, 4.0, 4.0, 0.01, 1.0, -0.1, 0.0, 0.0), mc::Error);
}

TEST_CASE("the certificate dominates the measured gap on spot checks")
{
    struct SpotCase {
        mc::DensitySpec f;
        mc::DensitySpec g;
        mc::Box K;
        double k;
        double delta;
    };
    const std::vector<SpotCase> cases = {
        {gauss(), gauss(), {{-1.5}, {1.5}}, 4.0, 0.1},
        {mc::builtin_density("laplace", {0.0, 1.0}), mc::builtin_density("epanechnikov", {0.0, 1.0}),
         {{-2.0}, {2.0}}, 2.0, 0.2},
    };
    for (const auto& sc : cases) {
        const auto tr = mc::truncate(sc.f, sc.K, 1.0, 0.5);
        const auto part = mc::build_partition(tr.r, sc.k, sc.delta, 1);
        const auto dr = mc::discretize(tr, sc.g, sc.k, part, 0.02);
        const double cb = mc::certified_bound(sc.g, part.radius / sc.k, sc.k, sc.delta, tr.mass,
                                              dr.c_m, dr.k_m, dr.C_s);

        mc::GridSpec grid;
        grid.center = {0.0};
        grid.half_width = {part.radius / sc.k};
        grid.points_per_axis = 1201;
        const auto sup = mc::sup_norm_diff_on_grid(mc::convolution_field(sc.g, sc.k, tr.h),
                                                   mc::field_of(dr.mixture), grid);
        CHECK(sup.value <= cb + 1e-6);
        CHECK(cb < 1.0);
    }
}

TEST_CASE("the uniform pipeline lands inside a loose budget")
{
    mc::ApproxOptions opts;
    opts.grid_points = 513;
    const auto [mix, rep] = mc::approximate_uniform(gauss(), gauss(), {{-2.0}, {2.0}}, 1.0, opts);
    CHECK(rep.mode == "uniform");
    CHECK_FALSE(rep.p.has_value());
    CHECK(rep.eps == 1.0);
    CHECK(rep.r == doctest::Approx(3.0));
    CHECK(rep.k >= 1.0);
    CHECK(rep.m == static_cast<long>(mix.components.size()));
    CHECK(rep.certified_bound <= 0.5 * (1.0 + 1e-9));
    CHECK(rep.measured_total <= 1.0);
    CHECK(rep.measured_mollification <= 0.5);
    CHECK(rep.elapsed_s >= 0.0);
}

TEST_CASE("the uniform pipeline meets a five percent budget on a gaussian")
{
    const auto [mix, rep] = mc::approximate_uniform(gauss(), gauss(), {{-2.0}, {2.0}}, 0.05);
    CHECK(rep.measured_total <= 0.05);
    CHECK(rep.certified_bound <= 0.025 * (1.0 + 1e-9));
    CHECK(rep.measured_mollification <= 0.025);
    CHECK(rep.m > 100);
    CHECK(rep.delta > 0.0);
}

TEST_CASE("the uniform pipeline absorbs a kinked target")
{
    mc::ApproxOptions opts;
    opts.grid_points = 513;
    const auto [mix, rep] = mc::approximate_uniform(mc::builtin_density("laplace", {0.0, 1.0}),
                                                    gauss(), {{-3.0}, {3.0}}, 0.1, opts);
    CHECK(rep.measured_total <= 0.1);
    CHECK(rep.certified_bound <= 0.05 * (1.0 + 1e-9));
}

TEST_CASE("the uniform pipeline rejects what it cannot serve")
{
    const mc::Box K{{-2.0}, {2.0}};
    CHECK_THROWS_AS((void)mc::approximate_uniform(gauss(), gauss(), K, 0.0), mc::Error);

    try {
        (void)mc::approximate_uniform(gauss(), mc::builtin_density("uniform", {-1.0, 1.0}), K, 0.1);
        FAIL_CHECK("expected a continuity rejection for the kernel");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::continuity_required);
    }

    try {
        (void)mc::approximate_uniform(mc::builtin_density("uniform", {-1.0, 1.0}), gauss(), K, 0.1);
        FAIL_CHECK("expected a continuity rejection for the target");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::continuity_required);
    }

    mc::ApproxOptions tight;
    tight.max_components = 100;
    try {
        (void)mc::approximate_uniform(gauss(), gauss(), {{-3.0}, {3.0}}, 0.01, tight);
        FAIL_CHECK("expected the component budget to trip");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::budget_exceeded);
    }

    CHECK_THROWS_AS((void)mc::approximate_uniform(
                        mc::builtin_density("gaussian2", {0.0, 0.0, 1.0}), gauss(),
                        {{-1.0, -1.0}, {1.0, 1.0}}, 0.5),
                    mc::Error);
}

TEST_CASE("anchored runs of a shifted target produce a shifted mixture")
{
    const double shift = 1.0;
    mc::ApproxOptions o1;
    o1.grid_points = 513;
    o1.anchor = std::vector<double>{-1.5};
    mc::ApproxOptions o2 = o1;
    o2.anchor = std::vector<double>{-0.5};

    const auto [m1, r1] =
        mc::approximate_uniform(gauss(), gauss(), {{-1.5}, {0.5}}, 0.25, o1);
    const auto [m2, r2] = mc::approximate_uniform(mc::builtin_density("gaussian", {shift, 1.0}),
                                                  gauss(), {{-0.5}, {1.5}}, 0.25, o2);

    CHECK(r1.r == r2.r);
    CHECK(r1.k == r2.k);
    REQUIRE(m1.components.size() == m2.components.size());

    // The remainder component stays at the origin in both runs, so the shift
    // relation covers lattice components only; the remainders must agree in
    // weight and scale and sit at their own origins.
    const std::vector<double> off{shift};
    const mc::Mixture moved = mc::shift_mixture(m1, off);
    const std::size_t lattice = m2.components.size() - 1;
    for (std::size_t i = 0; i < lattice; ++i) {
        const auto& a = moved.components[i];
        const auto& b = m2.components[i];
        CHECK(std::abs(a.location[0] - b.location[0]) <= 1e-9);
        CHECK(std::abs(a.weight - b.weight) <= 1e-10 * std::max(1e-3, a.weight));
        CHECK(std::abs(a.scale - b.scale) <= 1e-12 * a.scale);
    }
    const auto& t1 = m1.components.back();
    const auto& t2 = m2.components.back();
    CHECK(t1.location[0] == 0.0);
    CHECK(t2.location[0] == 0.0);
    CHECK(std::abs(t1.weight - t2.weight) <= 1e-10 * std::max(1e-3, t1.weight));
    CHECK(std::abs(t1.scale - t2.scale) <= 1e-12 * t1.scale);
    CHECK(r1.measured_total <= 0.25);
    CHECK(r2.measured_total <= 0.25);
}

TEST_CASE("the L_p pipeline meets loose and moderate budgets")
{
    const auto [mix, rep] = mc::approximate_lp(gauss(), gauss(), 1.0, 2.0);
    CHECK(rep.mode == "lp");
    REQUIRE(rep.p.has_value());
    CHECK(*rep.p == 1.0);
    CHECK(rep.measured_total <= 2.0);
    CHECK(rep.m == static_cast<long>(mix.components.size()));
    CHECK(rep.m >= 1);

    const auto [mix2, rep2] = mc::approximate_lp(gauss(), gauss(), 2.0, 0.5);
    CHECK(rep2.measured_total <= 0.5);
    CHECK(*rep2.p == 2.0);
}

TEST_CASE("the L_p pipeline handles a jump target")
{
    const auto [mix, rep] =
        mc::approximate_lp(mc::builtin_density("uniform", {0.0, 1.0}), gauss(), 1.0, 0.4);
    CHECK(rep.measured_total <= 0.4);
    CHECK(rep.m >= 2);
}

TEST_CASE("the L_p pipeline rejects what it cannot serve")
{
    CHECK_THROWS_AS((void)mc::approximate_lp(gauss(), gauss(), 0.5, 0.1), mc::Error);
    CHECK_THROWS_AS((void)mc::approximate_lp(gauss(), gauss(), 1.0, 0.0), mc::Error);

    mc::DensitySpec bare = gauss();
    bare.ess_bound.reset();
    try {
        (void)mc::approximate_lp(gauss(), bare, 1.0, 0.5);
        FAIL_CHECK("expected the kernel ess bound to be demanded");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::ess_bound_required);
    }
    try {
        (void)mc::approximate_lp(bare, gauss(), 1.0, 0.5);
        FAIL_CHECK("expected the target ess bound to be demanded");
    } catch (const mc::Error& e) {
        CHECK(e.code() == mc::errc::ess_bound_required);
    }
}

TEST_CASE("reports serialize with a fixed key layout")
{
    mc::ApproxReport rep;
    rep.mode = "uniform";
    rep.r = 2.0;
    rep.k = 4.0;
    rep.delta = 0.01;
    rep.m = 7;
    rep.eps = 0.05;
    rep.c_m = 0.1;
    rep.k_m = 0.25;
    rep.certified_bound = 0.02;
    rep.measured_mollification = 0.01;
    rep.measured_total = 0.03;
    rep.elapsed_s = 1.5;

    const std::string doc = mc::report_json(rep);
    CHECK(doc.back() == '\n');
    CHECK(doc.find("\"p\"") == std::string::npos);
    CHECK(doc.find("grid_slack") == std::string::npos);

    const char* order[] = {"\"mode\"",           "\"params\"",
                           "\"r\"",              "\"k\"",
                           "\"delta\"",          "\"m\"",
                           "\"eps\"",            "\"c_m\"",
                           "\"k_m\"",            "\"certified_bound\"",
                           "\"measured_mollification\"", "\"measured_total\"",
                           "\"elapsed_s\""};
    std::size_t pos = 0;
    for (const char* key : order) {
        const std::size_t at = doc.find(key, pos);
        REQUIRE(at != std::string::npos);
        pos = at;
    }

    const auto j = nlohmann::json::parse(doc);
    CHECK(j["mode"] == "uniform");
    CHECK(j["params"]["m"] == 7);
    CHECK(j["params"]["eps"] == 0.05);
    CHECK(j["measured_total"] == 0.03);

    rep.p = 2.0;
    const std::string doc2 = mc::report_json(rep);
    const auto j2 = nlohmann::json::parse(doc2);
    CHECK(j2["params"]["p"] == 2.0);
    CHECK(doc2.find("\"p\"") > doc2.find("\"eps\""));
    CHECK(doc2.find("\"p\"") < doc2.find("\"c_m\""));
}
