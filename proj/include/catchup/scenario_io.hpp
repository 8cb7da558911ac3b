#pragma once

#include <stdexcept>
#include <string>

#include "catchup/solver.hpp"

// Scenario files: a JSON document with sections for the clock, the operator
// family, the perturbation, initial data, declared constants, the mesh
// schedule and tolerances. Parsing is strict: unknown fields and malformed
// values are rejected with their path.

namespace catchup {

struct scenario_parse_error : std::runtime_error {
    explicit scenario_parse_error(const std::string& what) : std::runtime_error(what) {}
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Serializes with round-trip-exact numbers; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& scn);

}  // namespace catchup
