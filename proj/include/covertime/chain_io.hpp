#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertime/chain.hpp"

namespace covertime {

// Chain file format:
//   {"states": ["x", ...],              // optional; first-appearance order otherwise
//    "transitions": [["from", "to", "p/q"], ...]}
inline MarkovChain parse_chain_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ChainFormatError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ChainFormatError("chain file must be a JSON object");
    if (!doc.contains("transitions") || !doc["transitions"].is_array())
        throw ChainFormatError("chain file needs a \"transitions\" array");

    std::vector<std::string> labels;
    if (doc.contains("states")) {
        if (!doc["states"].is_array())
            throw ChainFormatError("\"states\" must be an array of labels");
        for (const auto& entry : doc["states"]) {
            if (!entry.is_string()) throw ChainFormatError("state labels must be strings");
            labels.push_back(entry.get<std::string>());
        }
    }

    std::vector<RawEdge> edges;
    for (const auto& entry : doc["transitions"]) {
        if (!entry.is_array() || entry.size() != 3 || !entry[0].is_string() ||
            !entry[1].is_string() || !entry[2].is_string())
            throw ChainFormatError(
                "each transition must be a [\"from\", \"to\", \"p/q\"] string triple");
        edges.push_back({entry[0].get<std::string>(), entry[1].get<std::string>(),
                         entry[2].get<std::string>()});
    }
    return MarkovChain::from_edges(edges, labels);
}

// Canonical rendering: explicit state list, transitions in row-major order,
// rationals in "p/q" form. parse(render(chain)) reproduces the chain exactly.
inline std::string render_chain_json(const MarkovChain& chain) {
    nlohmann::ordered_json doc;
    doc["states"] = chain.labels();
    auto& transitions = doc["transitions"] = nlohmann::ordered_json::array();
    for (StateId s = 0; s < chain.size(); ++s)
        for (const auto& t : chain.row(s))
            transitions.push_back({chain.label(s), chain.label(t.to), render_rational(t.prob)});
    return doc.dump(2) + "\n";
}

inline MarkovChain load_chain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ChainFormatError("cannot open chain file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_chain_json(buffer.str());
}

}  // namespace covertime
