#pragma once

#include <iosfwd>
#include <string>

#include "eniac/mdp.hpp"

namespace eniac {

// Fixture format (JSON):
//   {"format": "eniac-tabular-mdp", "version": 1,
//    "states": S, "actions": A, "gamma": g, "initial_state": s0,
//    "transitions": [[[p(s'|s,a) for s'] for a] for s],
//    "rewards": [[r(s,a) for a] for s]}

std::string tabular_mdp_to_json(const TabularMdp& mdp);
TabularMdp tabular_mdp_from_json(const std::string& text);

void save_tabular_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_tabular_mdp(const std::string& path);

}  // namespace eniac
