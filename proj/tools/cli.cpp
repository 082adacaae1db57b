#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "curvflow/elliptic.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/gauss.hpp"
#include "curvflow/presets.hpp"
#include "curvflow/psiexpr.hpp"
#include "curvflow/random_field.hpp"
#include "curvflow/spectral.hpp"
#include "curvflow/trace_io.hpp"

namespace curvflow::cli {
namespace {

std::string num(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sci(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

struct Options {
    std::string torus;
    std::string off;
    std::string psi;
    std::string init;
    std::string c = "default";
    std::string scheme = "explicit";
    std::string preset;
    std::string out;
    double p = 3.0;
    std::optional<double> dt0, tmax, tol_f, tol_res;
    std::optional<long> max_steps;
    int trace_every = 1;
    std::uint64_t seed = 1;
    int starts = 8;
};

void add_common(CLI::App* sub, Options& o)
{
    sub->add_option("--torus", o.torus, "periodic grid N:L[,N:L...]");
    sub->add_option("--off", o.off, "closed triangle mesh in OFF format");
    sub->add_option("--psi", o.psi, "potential expression in x1..xn");
    sub->add_option("--p", o.p, "nonlinearity exponent (> 1)");
    sub->add_option("--c", o.c, "diffusion coefficient or 'auto' = 4(n-1)/(n-2)");
    sub->add_option("--scheme", o.scheme, "explicit|imex")
        ->check(CLI::IsMember({"explicit", "imex"}));
    sub->add_option("--dt0", o.dt0, "imex step / explicit step cap");
    sub->add_option("--tmax", o.tmax, "final time");
    sub->add_option("--max-steps", o.max_steps, "step budget");
    sub->add_option("--tol-f", o.tol_f, "stop when f <= tol-f");
    sub->add_option("--tol-res", o.tol_res, "and residual <= tol-res");
    sub->add_option("--seed", o.seed, "seed for random initial data");
    sub->add_option("--out", o.out, "output CSV path");
    sub->add_option("--preset", o.preset, "thm2|thm3|flip|torus2");
    sub->add_option("--trace-every", o.trace_every, "record every N-th step")
        ->check(CLI::PositiveNumber);
    sub->add_option("--init", o.init, "initial data expression, or 'lognormal'");
}

DiscreteManifold parse_torus(const std::string& text)
{
    std::vector<std::size_t> counts;
    std::vector<double> lengths;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, end - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw InvalidGridSpec("torus item '" + item + "' is not N:L");
        try {
            std::size_t used = 0;
            const long n = std::stol(item.substr(0, colon), &used);
            if (used != colon || n <= 0)
                throw InvalidGridSpec("bad node count in '" + item + "'");
            const std::string len = item.substr(colon + 1);
            const double l = std::stod(len, &used);
            if (used != len.size() || !(l > 0.0) || !std::isfinite(l))
                throw InvalidGridSpec("bad length in '" + item + "'");
            counts.push_back(static_cast<std::size_t>(n));
            lengths.push_back(l);
        } catch (const std::logic_error&) {
            throw InvalidGridSpec("cannot read torus item '" + item + "'");
        }
        pos = end + 1;
    }
    return build_torus_grid(counts, lengths);
}

// Manifold, potential and initial data resolved from flags; a preset supplies
// whatever the flags leave open. Without manifold flags or preset, thm2 is used.
struct Setup {
    std::optional<Scenario> preset;
    std::optional<DiscreteManifold> custom;
    NodeField psi;
    NodeField u0;
    FlowParams params;
    FlowConfig cfg;

    const DiscreteManifold& man() const { return custom ? *custom : preset->man; }
};

Setup resolve(const Options& o, bool log_factor_init)
{
    Setup s;
    const bool has_manifold = !o.torus.empty() || !o.off.empty();
    if (!o.torus.empty() && !o.off.empty())
        throw InvalidArgument("give either --torus or --off, not both");
    if (!o.preset.empty() || !has_manifold)
        s.preset = make_preset(o.preset.empty() ? "thm2" : o.preset, o.seed);
    if (!o.torus.empty())
        s.custom = parse_torus(o.torus);
    else if (!o.off.empty())
        s.custom = load_off_mesh(o.off);
    const DiscreteManifold& man = s.man();

    std::string psi_text = o.psi;
    if (psi_text.empty())
        psi_text = s.preset && !s.custom ? s.preset->psi_text : "0";
    s.psi = psi::evaluate(psi::parse(psi_text), man);

    std::string init = o.init;
    if (init.empty())
        init = s.preset && !s.custom ? s.preset->init_text : (log_factor_init ? "0" : "lognormal");
    if (init == "lognormal") {
        s.u0 = log_normal_field(man, o.seed);
        if (log_factor_init)
            for (auto& x : s.u0)
                x = std::log(x);
    } else {
        s.u0 = psi::evaluate(psi::parse(init), man);
    }

    s.params.p = o.p;
    if (o.c == "auto") {
        s.params.c = conformal_coefficient(man.dim());
    } else if (o.c == "default") {
        s.params.c = man.dim() >= 3 ? conformal_coefficient(man.dim()) : 1.0;
    } else {
        std::size_t used = 0;
        try {
            s.params.c = std::stod(o.c, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used != o.c.size())
            throw InvalidArgument("--c expects a number or 'auto'");
    }

    s.cfg = s.preset && !s.custom ? s.preset->cfg : FlowConfig{};
    s.cfg.scheme = o.scheme == "imex" ? Scheme::Imex : Scheme::Explicit;
    s.cfg.seed = o.seed;
    s.cfg.trace_every = o.trace_every;
    if (o.dt0)
        s.cfg.dt0 = *o.dt0;
    if (o.tmax)
        s.cfg.t_max = *o.tmax;
    if (o.tol_f)
        s.cfg.tol_f = *o.tol_f;
    if (o.tol_res)
        s.cfg.tol_res = *o.tol_res;
    if (o.max_steps)
        s.cfg.max_steps = *o.max_steps;
    return s;
}

int stop_code(StopReason stop)
{
    return stop == StopReason::PositivityFailure ? 2 : 0;
}

void maybe_write_trace(const Options& o, std::span<const TraceRecord> trace)
{
    if (!o.out.empty())
        write_trace_csv(std::filesystem::path(o.out), trace);
}

int cmd_run(const Options& o, std::ostream& out)
{
    const Setup s = resolve(o, false);
    const FlowResult res = run_flow(s.man(), s.psi, s.u0, s.params, s.cfg);
    maybe_write_trace(o, res.trace);
    const TraceRecord& last = res.trace.back();
    out << "stop=" << to_string(res.stop) << " r_inf=" << num(res.r_infinity)
        << " f=" << sci(last.f) << " res=" << sci(last.res_linf) << " steps=" << res.final.step;
    if (res.decay_rate)
        out << " decay_rate=" << num(*res.decay_rate);
    out << '\n';
    return stop_code(res.stop);
}

int cmd_eigen(const Options& o, std::ostream& out)
{
    const Setup s = resolve(o, false);
    const EigenResult e = lambda1(s.man(), s.psi, s.params.c);
    out << "lambda1=" << num(e.lambda1) << " iterations=" << e.iterations
        << " residual=" << sci(e.residual) << '\n';
    return 0;
}

int cmd_oracle(const Options& o, std::ostream& out)
{
    const Setup s = resolve(o, false);
    const FlowResult res = run_flow(s.man(), s.psi, s.u0, s.params, s.cfg);
    maybe_write_trace(o, res.trace);
    if (res.stop == StopReason::PositivityFailure) {
        out << "stop=" << to_string(res.stop) << '\n';
        return 2;
    }
    const NewtonResult nr =
        newton_constrained(s.man(), s.psi, s.params.c, s.params.p, res.final.u);
    double gap = 0.0;
    for (std::size_t i = 0; i < nr.u.size(); ++i)
        gap = std::max(gap, std::abs(nr.u[i] - res.final.u[i]));
    out << "stop=" << to_string(res.stop) << " gap_u=" << sci(gap)
        << " gap_r=" << sci(std::abs(nr.r - res.r_infinity)) << " r_flow=" << num(res.r_infinity)
        << " r_newton=" << num(nr.r) << " newton_iterations=" << nr.iterations << '\n';
    return 0;
}

int cmd_gauss(const Options& o, std::ostream& out)
{
    const Setup s = resolve(o, true);
    const GaussResult res = run_gauss_flow(s.man(), s.psi, s.u0, s.cfg);
    maybe_write_trace(o, res.trace);
    const TraceRecord& last = res.trace.back();
    out << "stop=" << to_string(res.stop) << " r_inf=" << num(res.r_infinity)
        << " f=" << sci(last.f) << " res=" << sci(last.res_linf) << " steps=" << res.final.step
        << " area_drift=" << sci(last.norm_err) << '\n';
    return stop_code(res.stop);
}

int cmd_sweep(const Options& o, std::ostream& out)
{
    const Setup s = resolve(o, false);
    const YEstimate est = estimate_Y(s.man(), s.psi, s.params, o.starts, o.seed, s.cfg);
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file)
            throw Error("cannot open " + o.out + " for writing");
    }
    std::ostream& csv = o.out.empty() ? out : file;
    csv << "start,r_final,E_final,stop\n";
    for (std::size_t k = 0; k < est.starts.size(); ++k)
        csv << k << ',' << num(est.starts[k].r_final) << ',' << num(est.starts[k].energy) << ','
            << to_string(est.starts[k].stop) << '\n';
    out << (o.out.empty() ? "# " : "") << "Y_psi_upper=" << num(est.upper) << '\n';
    return 0;
}

}  // namespace

void configure_logging()
{
    auto logger = spdlog::stderr_logger_mt("curvflow");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CURVFLOW_LOG")) {
        const std::string v = env;
        if (v == "quiet")
            spdlog::set_level(spdlog::level::off);
        else if (v == "info")
            spdlog::set_level(spdlog::level::info);
        else if (v == "debug")
            spdlog::set_level(spdlog::level::debug);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"curvflow: Yamabe-type flow laboratory"};
    app.require_subcommand(1);
    Options o;
    auto* run = app.add_subcommand("run", "integrate the flow and write its trace");
    auto* eigen = app.add_subcommand("eigen", "smallest eigenvalue of -c lap + psi");
    auto* oracle = app.add_subcommand("oracle", "flow limit against the stationary Newton solve");
    auto* gauss = app.add_subcommand("gauss", "psi-Gauss flow on a surface");
    auto* sweep = app.add_subcommand("sweep", "multistart upper bound on Y_psi");
    for (auto* sub : {run, eigen, oracle, gauss, sweep})
        add_common(sub, o);
    sweep->add_option("--starts", o.starts, "number of random starts")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*run)
            return cmd_run(o, out);
        if (*eigen)
            return cmd_eigen(o, out);
        if (*oracle)
            return cmd_oracle(o, out);
        if (*gauss)
            return cmd_gauss(o, out);
        return cmd_sweep(o, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const DimensionMismatch& e) {
        err << "error: dimension mismatch: " << e.what() << '\n';
    } catch (const PositivityLost& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace curvflow::cli
