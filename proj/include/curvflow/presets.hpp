#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/manifold.hpp"

namespace curvflow {

// A frozen scenario: manifold, potential, exponent and initial data.
struct Scenario {
    std::string name;
    std::string description;
    DiscreteManifold man;
    std::string psi_text;
    NodeField psi;
    FlowParams params;
    std::string init_text;  // "lognormal" or a psi-grammar expression
    NodeField u0;
    FlowConfig cfg;
};

//   thm2    circle N=128, L=2pi, psi=-1, p=3, c=1, log-normal u0
//   thm3    circle N=128, L=2pi, psi=0, p=3, c=1, u0 = 1 + 0.5 cos(x1)
//   flip    thm2 with u0 = 1 + 0.9 cos(4 x1), for which r(0) > 0
//   torus2  32x32 torus, L=2pi, psi = -1 + 0.3 cos(x1), p=3, c=1, log-normal u0
// `resolution` replaces the nodes per side when nonzero; `seed` drives log-normal data.
Scenario make_preset(std::string_view name, std::uint64_t seed = 1, std::size_t resolution = 0);

std::vector<std::string> preset_names();

}  // namespace curvflow
