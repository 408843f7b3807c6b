#pragma once

#include "mapf/map_model.hpp"

namespace mapf::fixtures {

// FIX-A: 2x5 corridor with a single niche at (1,1); the agents swap ends.
inline Instance fix_a()
{
    return parse_instance("2 5\n.....\n@.@@@\n0 0 0 4\n0 4 0 0\n");
}

// FIX-B: empty 3x3, crossing diagonals.
inline Instance fix_b()
{
    return parse_instance("3 3\n...\n...\n...\n0 0 2 2\n2 0 0 2\n");
}

// FIX-C: 1x4 corridor without a passing place.
inline Instance fix_c()
{
    return parse_instance("1 4\n....\n0 0 0 3\n0 3 0 0\n");
}

}  // namespace mapf::fixtures
