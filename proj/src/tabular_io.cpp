#include "eniac/tabular_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace eniac {

using nlohmann::json;

std::string tabular_mdp_to_json(const TabularMdp& mdp) {
  json j;
  j["format"] = "eniac-tabular-mdp";
  j["version"] = 1;
  j["states"] = mdp.state_count();
  j["actions"] = mdp.num_actions();
  j["gamma"] = mdp.gamma();
  j["initial_state"] = mdp.start();
  j["transitions"] = mdp.transitions();
  j["rewards"] = mdp.rewards();
  return j.dump(1);
}

TabularMdp tabular_mdp_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("tabular MDP: malformed JSON: ") + e.what());
  }
  if (j.value("format", "") != "eniac-tabular-mdp")
    throw std::invalid_argument("tabular MDP: missing or unknown format tag");
  auto transitions = j.at("transitions").get<std::vector<std::vector<std::vector<double>>>>();
  auto rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
  const auto states = j.at("states").get<std::size_t>();
  const auto actions = j.at("actions").get<std::size_t>();
  if (transitions.size() != states || (states > 0 && transitions.front().size() != actions))
    throw std::invalid_argument("tabular MDP: declared sizes do not match tables");
  return TabularMdp(std::move(transitions), std::move(rewards), j.at("gamma").get<double>(),
                    j.at("initial_state").get<std::size_t>());
}

void save_tabular_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << tabular_mdp_to_json(mdp) << '\n';
}

TabularMdp load_tabular_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return tabular_mdp_from_json(buf.str());
}

}  // namespace eniac
