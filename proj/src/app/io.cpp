#include "hpmd/io.hpp"

#include "hpmd/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace hpmd {

using nlohmann::json;

namespace {

// Flattens arbitrarily nested numeric arrays in row-major order.
void flatten(const json& j, std::vector<double>& out) {
    if (j.is_array()) {
        for (const auto& e : j) flatten(e, out);
    } else if (j.is_number()) {
        out.push_back(j.get<double>());
    } else {
        throw ValidationError("MDP arrays must contain only numbers");
    }
}

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw ValidationError(std::string("MDP JSON is missing field '") + name + "'");
    return j.at(name);
}

}  // namespace

json mdp_to_json(const Mdp& m) {
    const int S = m.num_states(), A = m.num_actions();
    std::vector<double> cost, trans;
    cost.reserve(static_cast<std::size_t>(S) * A);
    trans.reserve(static_cast<std::size_t>(S) * A * S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            cost.push_back(m.cost(s, a));
            for (int t = 0; t < S; ++t) trans.push_back(m.prob(s, a, t));
        }
    return json{{"num_states", S}, {"num_actions", A}, {"gamma", m.gamma()}, {"cost", cost}, {"transition", trans}};
}

Mdp mdp_from_json(const json& j) {
    const int S = field(j, "num_states").get<int>();
    const int A = field(j, "num_actions").get<int>();
    const double gamma = field(j, "gamma").get<double>();
    if (S < 1 || A < 1) throw ValidationError("num_states and num_actions must be >= 1");
    std::vector<double> cost, trans;
    flatten(field(j, "cost"), cost);
    flatten(field(j, "transition"), trans);
    const std::size_t sa = static_cast<std::size_t>(S) * static_cast<std::size_t>(A);
    if (cost.size() != sa) throw ValidationError("cost must have |S|*|A| entries");
    if (trans.size() != sa * static_cast<std::size_t>(S)) throw ValidationError("transition must have |S|*|A|*|S| entries");
    Eigen::MatrixXd c(S, A);
    Eigen::MatrixXd P(static_cast<Eigen::Index>(sa), S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const std::size_t r = static_cast<std::size_t>(s) * A + a;
            c(s, a) = cost[r];
            for (int t = 0; t < S; ++t) P(static_cast<Eigen::Index>(r), t) = trans[r * S + t];
        }
    return Mdp(S, A, gamma, std::move(c), std::move(P));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
}

Mdp load_mdp(const std::string& path) { return mdp_from_json(read_json_file(path)); }

void save_mdp(const Mdp& m, const std::string& path) { write_text_file(path, mdp_to_json(m).dump(2) + "\n"); }

json policy_to_json(const Policy& pi) {
    json rows = json::array();
    for (int s = 0; s < pi.num_states(); ++s) {
        json r = json::array();
        for (int a = 0; a < pi.num_actions(); ++a) r.push_back(pi(s, a));
        rows.push_back(r);
    }
    return rows;
}

Policy policy_from_json(const json& j, int num_states, int num_actions) {
    if (j.is_string()) {
        if (j.get<std::string>() == "uniform") return Policy::uniform(num_states, num_actions);
        throw ValidationError("initial_policy must be \"uniform\" or a |S| x |A| array");
    }
    std::vector<double> flat;
    flatten(j, flat);
    if (flat.size() != static_cast<std::size_t>(num_states) * num_actions)
        throw ValidationError("initial_policy must have |S|*|A| entries");
    Eigen::MatrixXd p(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) p(s, a) = flat[static_cast<std::size_t>(s) * num_actions + a];
    return Policy(p);
}

}  // namespace hpmd
