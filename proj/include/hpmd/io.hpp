#pragma once

#include "hpmd/mdp.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace hpmd {

/// MDP file format:
///   {"num_states": S, "num_actions": A, "gamma": g,
///    "cost": [S*A numbers, row-major (s, a)],
///    "transition": [S*A*S numbers, row-major (s, a, s')]}
/// Nested arrays with the same row-major order are also accepted on input.
nlohmann::json mdp_to_json(const Mdp& m);
Mdp mdp_from_json(const nlohmann::json& j);

Mdp load_mdp(const std::string& path);
void save_mdp(const Mdp& m, const std::string& path);

nlohmann::json policy_to_json(const Policy& pi);
Policy policy_from_json(const nlohmann::json& j, int num_states, int num_actions);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace hpmd
