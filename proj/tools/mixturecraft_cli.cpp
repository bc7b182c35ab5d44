// Command-line frontend. Exit codes: 0 success, 2 usage error (message names
// the offending flag), 1 runtime failure (partial report as JSON on stderr).
// Stdout carries only single-value query results; everything else goes to
// files named by --out/--report.

#include "mixturecraft/analysis.hpp"
#include "mixturecraft/constructor.hpp"
#include "mixturecraft/errors.hpp"
#include "mixturecraft/mixture.hpp"
#include "mixturecraft/sweeps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mc = mixturecraft;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_double_token(const std::string& tok, const std::string& flag)
{
    double v{};
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw UsageError(flag + ": cannot parse number '" + tok + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& flag)
{
    std::vector<double> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t c = s.find(',', pos);
        const std::string tok =
            c == std::string::npos ? s.substr(pos) : s.substr(pos, c - pos);
        if (tok.empty()) throw UsageError(flag + ": empty entry in list '" + s + "'");
        out.push_back(parse_double_token(tok, flag));
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

mc::DensitySpec parse_density(const std::string& s, const std::string& flag)
{
    const std::size_t c = s.find(':');
    const std::string family = s.substr(0, c);
    if (family.empty()) throw UsageError(flag + ": missing density family in '" + s + "'");
    std::vector<double> params;
    if (c != std::string::npos && c + 1 <= s.size() && !s.substr(c + 1).empty())
        params = parse_list(s.substr(c + 1), flag);
    try {
        return mc::builtin_density(family, params);
    } catch (const mc::Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

mc::Box parse_box(const std::string& s, const std::string& flag)
{
    const std::vector<double> v = parse_list(s, flag);
    if (v.size() != 2 && v.size() != 4)
        throw UsageError(flag + ": expected lo,hi or lo,hi,lo,hi, got " +
                         std::to_string(v.size()) + " numbers");
    mc::Box box;
    for (std::size_t a = 0; a < v.size(); a += 2) {
        if (!(v[a] < v[a + 1]))
            throw UsageError(flag + ": interval needs lo < hi, got " + s);
        box.lo.push_back(v[a]);
        box.hi.push_back(v[a + 1]);
    }
    return box;
}

int env_quad_order()
{
    const char* s = std::getenv("MIXTURECRAFT_QUAD_ORDER");
    if (!s) return 8;
    int v{};
    auto [p, ec] = std::from_chars(s, s + std::strlen(s), v);
    if (ec != std::errc{} || *p != '\0' || v < 2)
        throw UsageError(std::string("MIXTURECRAFT_QUAD_ORDER: must be an integer >= 2, got '") +
                         s + "'");
    return v;
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open output file '" + path + "'");
    out << contents;
    if (!out) throw UsageError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path, const std::string& flag)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(flag + ": cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ApproximateArgs {
    std::string target, kernel, K, anchor, out, report;
    std::string mode = "uniform";
    double eps = 0.0;
    double p = 0.0;
    double margin = 1.0;
    double tau = 0.0;
    double eta = 1e-4;
    long max_components = 1000000;
    int grid_points = 1025;
};

int run_approximate(const ApproximateArgs& a)
{
    const mc::DensitySpec f = parse_density(a.target, "--target");
    const mc::DensitySpec g = parse_density(a.kernel, "--kernel");

    mc::ApproxOptions opts;
    opts.margin = a.margin;
    if (a.tau > 0.0) opts.tau = a.tau;
    opts.quad_order = env_quad_order();
    opts.max_components = a.max_components;
    opts.eta = a.eta;
    opts.grid_points = a.grid_points;
    if (!a.anchor.empty()) {
        std::vector<double> anch = parse_list(a.anchor, "--anchor");
        if (static_cast<int>(anch.size()) != f.dim)
            throw UsageError("--anchor: expected " + std::to_string(f.dim) + " coordinates");
        opts.anchor = std::move(anch);
    }

    std::pair<mc::Mixture, mc::ApproxReport> result = [&] {
        if (a.mode == "uniform") {
            if (a.K.empty()) throw UsageError("--K: required in uniform mode");
            const mc::Box K = parse_box(a.K, "--K");
            return mc::approximate_uniform(f, g, K, a.eps, opts);
        }
        if (a.mode == "lp") {
            if (a.p <= 0.0) throw UsageError("--p: required in lp mode");
            return mc::approximate_lp(f, g, a.p, a.eps, opts);
        }
        throw UsageError("--mode: must be 'uniform' or 'lp', got '" + a.mode + "'");
    }();

    if (!a.out.empty()) write_file(a.out, mc::serialize_mixture(result.first));
    if (!a.report.empty()) write_file(a.report, mc::report_json(result.second));
    return 0;
}

struct SweepArgs {
    std::string target, kernel, K, settings, out;
    double p = 0.0;
    double eps_tail = 1e-6;
    double margin = 1.0;
    double tau = 0.0;
    int grid_points = 513;
};

int run_sweep(const SweepArgs& a)
{
    const mc::DensitySpec f = parse_density(a.target, "--target");
    const mc::DensitySpec g = parse_density(a.kernel, "--kernel");
    const mc::Box K = parse_box(a.K, "--K");

    std::vector<mc::SweepSetting> settings;
    std::size_t pos = 0;
    const std::string& s = a.settings;
    for (;;) {
        const std::size_t c = s.find(',', pos);
        const std::string tok =
            c == std::string::npos ? s.substr(pos) : s.substr(pos, c - pos);
        const std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw UsageError("--settings: expected k:delta entries, got '" + tok + "'");
        mc::SweepSetting st;
        st.k = parse_double_token(tok.substr(0, colon), "--settings");
        st.delta = parse_double_token(tok.substr(colon + 1), "--settings");
        settings.push_back(st);
        if (c == std::string::npos) break;
        pos = c + 1;
    }

    mc::SweepOptions opts;
    opts.margin = a.margin;
    if (a.tau > 0.0) opts.tau = a.tau;
    opts.eps_tail = a.eps_tail;
    opts.quad_order = env_quad_order();
    opts.grid_points = a.grid_points;
    if (a.p > 0.0) opts.p = a.p;

    const mc::SweepTable table = mc::convergence_sweep(f, g, K, settings, opts);
    for (const mc::SweepRow& row : table.rows)
        if (!row.error.empty())
            std::cerr << "row k=" << row.labels[0] << " delta=" << row.labels[1] << ": "
                      << row.error << "\n";
    write_file(a.out, mc::sweep_csv(table));
    return 0;
}

struct CurveArgs {
    std::string target, kernel, ks, out;
    double radius = 0.0;
    double p = 0.0;
    int grid_points = 0;
};

int run_identity_curve(const CurveArgs& a)
{
    const mc::DensitySpec f = parse_density(a.target, "--target");
    const mc::DensitySpec g = parse_density(a.kernel, "--kernel");
    const std::vector<double> ks = parse_list(a.ks, "--ks");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] > ks[i - 1]))
            throw UsageError("--ks: values must be strictly increasing");
    if ((a.radius > 0.0) == (a.p > 0.0))
        throw UsageError("exactly one of --radius (sup norm) or --p (L_p norm) is required");

    const mc::NormSpec norm =
        a.radius > 0.0 ? mc::NormSpec::sup_on_ball(a.radius) : mc::NormSpec::lp(a.p);
    const mc::SweepTable table =
        mc::approximate_identity_curve(f, g, norm, ks, a.grid_points);
    for (const mc::SweepRow& row : table.rows)
        if (!row.error.empty())
            std::cerr << "row k=" << row.labels[0] << ": " << row.error << "\n";
    write_file(a.out, mc::sweep_csv(table));
    return 0;
}

struct YoungArgs {
    std::string f, g;
    double p = 1.0;
};

int run_young(const YoungArgs& a)
{
    const mc::DensitySpec f = parse_density(a.f, "--f");
    const mc::DensitySpec g = parse_density(a.g, "--g");
    const mc::YoungResult res = mc::young_inequality_check(f, g, a.p);
    nlohmann::ordered_json j;
    j["lhs"] = res.lhs;
    j["rhs"] = res.rhs;
    j["holds"] = res.holds;
    std::cout << j.dump() << "\n";
    return 0;
}

struct EvalArgs {
    std::string mixture, at;
};

int run_eval(const EvalArgs& a)
{
    const std::string doc = read_file(a.mixture, "--mixture");
    const mc::Mixture mix = mc::parse_mixture(doc);
    const std::vector<double> x = parse_list(a.at, "--at");
    if (static_cast<int>(x.size()) != mix.dim)
        throw UsageError("--at: expected " + std::to_string(mix.dim) + " coordinates");
    std::cout << mc::format_double(mc::eval_mixture(mix, x)) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Location-scale mixture construction with computable error certificates"};
    app.require_subcommand(1);

    ApproximateArgs aa;
    CLI::App* ap = app.add_subcommand("approximate",
                                      "Build a mixture approximating a target density");
    ap->add_option("--target", aa.target, "Target density, family:p1,p2,...")->required();
    ap->add_option("--kernel", aa.kernel, "Kernel density, family:p1,p2,...")->required();
    ap->add_option("--mode", aa.mode, "uniform or lp");
    ap->add_option("--K", aa.K, "Box lo,hi (1-D) or lo,hi,lo,hi (2-D), uniform mode");
    ap->add_option("--eps", aa.eps, "Error budget")->required()->check(CLI::PositiveNumber);
    ap->add_option("--p", aa.p, "L_p exponent, lp mode");
    ap->add_option("--margin", aa.margin, "Truncation margin")->check(CLI::PositiveNumber);
    ap->add_option("--tau", aa.tau, "Truncation ramp width")->check(CLI::PositiveNumber);
    ap->add_option("--eta", aa.eta, "Tail mass not captured, lp mode")->check(CLI::PositiveNumber);
    ap->add_option("--max-components", aa.max_components, "Component budget")
        ->check(CLI::PositiveNumber);
    ap->add_option("--grid-points", aa.grid_points, "Measurement grid points per axis")
        ->check(CLI::Range(2, 1 << 20));
    ap->add_option("--anchor", aa.anchor, "Partition anchor point, comma list");
    ap->add_option("--out", aa.out, "Mixture JSON output path");
    ap->add_option("--report", aa.report, "Report JSON output path");

    SweepArgs sa;
    CLI::App* sp = app.add_subcommand("sweep", "Convergence sweep over (k, delta) settings");
    sp->add_option("--target", sa.target, "Target density")->required();
    sp->add_option("--kernel", sa.kernel, "Kernel density")->required();
    sp->add_option("--K", sa.K, "Box lo,hi or lo,hi,lo,hi")->required();
    sp->add_option("--settings", sa.settings, "Comma list of k:delta pairs")->required();
    sp->add_option("--p", sa.p, "Also record the L_p error for this p");
    sp->add_option("--eps-tail", sa.eps_tail, "Leftover-weight budget")
        ->check(CLI::PositiveNumber);
    sp->add_option("--margin", sa.margin, "Truncation margin")->check(CLI::PositiveNumber);
    sp->add_option("--tau", sa.tau, "Truncation ramp width")->check(CLI::PositiveNumber);
    sp->add_option("--grid-points", sa.grid_points, "Sup-error grid points per axis")
        ->check(CLI::Range(2, 1 << 20));
    sp->add_option("--out", sa.out, "CSV output path")->required();

    CurveArgs ca;
    CLI::App* cp = app.add_subcommand("identity-curve",
                                      "Smoothing error of the dilated kernel across k");
    cp->add_option("--target", ca.target, "Target density")->required();
    cp->add_option("--kernel", ca.kernel, "Kernel density")->required();
    cp->add_option("--ks", ca.ks, "Strictly increasing comma list of k values")->required();
    cp->add_option("--radius", ca.radius, "Sup-norm ball radius");
    cp->add_option("--p", ca.p, "L_p exponent");
    cp->add_option("--grid-points", ca.grid_points, "Sup-norm grid points per axis")
        ->check(CLI::Range(2, 1 << 20));
    cp->add_option("--out", ca.out, "CSV output path")->required();

    YoungArgs ya;
    CLI::App* yp = app.add_subcommand("young-check",
                                      "Check the convolution norm inequality numerically");
    yp->add_option("--f", ya.f, "First density")->required();
    yp->add_option("--g", ya.g, "Second density")->required();
    yp->add_option("--p", ya.p, "Norm exponent")->check(CLI::PositiveNumber);

    EvalArgs ea;
    CLI::App* ep = app.add_subcommand("eval", "Evaluate a mixture file at a point");
    ep->add_option("--mixture", ea.mixture, "Mixture JSON path")->required();
    ep->add_option("--at", ea.at, "Evaluation point, comma list")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    std::string mode = "none";
    try {
        if (ap->parsed()) {
            mode = aa.mode;
            return run_approximate(aa);
        }
        if (sp->parsed()) {
            mode = "sweep";
            return run_sweep(sa);
        }
        if (cp->parsed()) {
            mode = "identity-curve";
            return run_identity_curve(ca);
        }
        if (yp->parsed()) {
            mode = "young-check";
            return run_young(ya);
        }
        if (ep->parsed()) {
            mode = "eval";
            return run_eval(ea);
        }
        std::cerr << "no command given\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const mc::Error& e) {
        nlohmann::ordered_json j;
        j["mode"] = mode;
        j["error"] = mc::errc_name(e.code());
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
}
