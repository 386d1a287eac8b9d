#include "evac/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "evac/error.hpp"

namespace evac {

Json graph_to_json(const CityGraph &graph) {
    Json nodes = Json::array();
    for (const auto &n : graph.nodes()) {
        nodes.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}});
    }
    Json edges = Json::array();
    for (const auto &e : graph.edges()) {
        edges.push_back({{"u", e.u}, {"v", e.v}, {"length_m", e.length_m}, {"speed_kmh", e.speed_kmh}});
    }
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

CityGraph graph_from_json(const Json &doc) {
    try {
        std::vector<Node> nodes;
        for (const auto &n : doc.at("nodes")) {
            nodes.push_back({n.at("id").get<NodeId>(), {n.at("x").get<double>(), n.at("y").get<double>()}});
        }
        std::vector<Edge> edges;
        for (const auto &e : doc.at("edges")) {
            edges.push_back({e.at("u").get<NodeId>(), e.at("v").get<NodeId>(),
                             e.at("length_m").get<double>(), e.at("speed_kmh").get<double>()});
        }
        return CityGraph(std::move(nodes), std::move(edges));
    } catch (const Json::exception &ex) {
        throw IoError(std::string("malformed graph document: ") + ex.what());
    }
}

CityGraph load_graph(const std::filesystem::path &path) { return graph_from_json(load_json(path)); }

void save_graph(const CityGraph &graph, const std::filesystem::path &path) {
    write_text(path, graph_to_json(graph).dump(1) + "\n");
}

Json scenario_to_json(const ScenarioConfig &s) {
    return {{"epicenter", {{"x", s.epicenter.x}, {"y", s.epicenter.y}}},
            {"start", s.start},
            {"exits", s.exits},
            {"chosen_exit", s.chosen_exit},
            {"rng_seed", s.rng_seed},
            {"max_steps", s.max_steps},
            {"sigma_frac", s.sigma_frac}};
}

ScenarioConfig scenario_from_json(const Json &doc) {
    try {
        ScenarioConfig s;
        const auto &epi = doc.at("epicenter");
        if (epi.is_array()) {
            s.epicenter = {epi.at(0).get<double>(), epi.at(1).get<double>()};
        } else {
            s.epicenter = {epi.at("x").get<double>(), epi.at("y").get<double>()};
        }
        s.start = doc.at("start").get<NodeId>();
        s.exits = doc.at("exits").get<std::vector<NodeId>>();
        s.chosen_exit = doc.value("chosen_exit", s.exits.empty() ? NodeId{0} : s.exits.front());
        s.rng_seed = doc.value("rng_seed", std::uint64_t{0});
        s.max_steps = doc.value("max_steps", 0);
        s.sigma_frac = doc.value("sigma_frac", 0.1);
        return s;
    } catch (const Json::exception &ex) {
        throw IoError(std::string("malformed scenario document: ") + ex.what());
    }
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Json load_json(const std::filesystem::path &path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error &ex) {
        throw IoError(path.string() + ": " + ex.what());
    }
}

} // namespace evac
