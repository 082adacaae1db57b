#include "curvflow/presets.hpp"

#include <numbers>

#include "curvflow/errors.hpp"
#include "curvflow/psiexpr.hpp"
#include "curvflow/random_field.hpp"

namespace curvflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DiscreteManifold circle(std::size_t n)
{
    const std::size_t counts[] = {n};
    const double lengths[] = {kTwoPi};
    return build_torus_grid(counts, lengths);
}

DiscreteManifold square_torus(std::size_t n)
{
    const std::size_t counts[] = {n, n};
    const double lengths[] = {kTwoPi, kTwoPi};
    return build_torus_grid(counts, lengths);
}

Scenario assemble(std::string name, std::string description, DiscreteManifold man,
                  std::string psi_text, std::string init_text, std::uint64_t seed)
{
    NodeField psi = psi::evaluate(psi::parse(psi_text), man);
    NodeField u0 = init_text == "lognormal" ? log_normal_field(man, seed)
                                            : psi::evaluate(psi::parse(init_text), man);
    FlowConfig cfg;
    cfg.seed = seed;
    return Scenario{std::move(name), std::move(description), std::move(man),
                    std::move(psi_text), std::move(psi), FlowParams{1.0, 3.0},
                    std::move(init_text), std::move(u0), cfg};
}

}  // namespace

Scenario make_preset(std::string_view name, std::uint64_t seed, std::size_t resolution)
{
    const std::size_t n1 = resolution ? resolution : 128;
    if (name == "thm2")
        return assemble("thm2", "negative constant potential on a circle", circle(n1), "-1",
                        "lognormal", seed);
    if (name == "thm3")
        return assemble("thm3", "zero potential on a circle", circle(n1), "0",
                        "1 + 0.5*cos(x1)", seed);
    if (name == "flip")
        return assemble("flip", "negative potential, initial r > 0", circle(n1), "-1",
                        "1 + 0.9*cos(4*x1)", seed);
    if (name == "torus2")
        return assemble("torus2", "variable negative potential on a flat 2-torus",
                        square_torus(resolution ? resolution : 32), "-1 + 0.3*cos(x1)",
                        "lognormal", seed);
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"thm2", "thm3", "flip", "torus2"};
}

}  // namespace curvflow
