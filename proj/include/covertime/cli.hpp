#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covertime/aux_chain.hpp"
#include "covertime/chain_io.hpp"
#include "covertime/hitting.hpp"
#include "covertime/simulate.hpp"

namespace covertime::cli {

namespace detail {

inline std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t comma = text.find(',', begin);
        if (comma == std::string::npos) {
            parts.push_back(text.substr(begin));
            break;
        }
        parts.push_back(text.substr(begin, comma - begin));
        begin = comma + 1;
    }
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

inline std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

inline std::string set_notation(const MarkovChain& chain, const StateSet& set) {
    std::string text = "{";
    bool first = true;
    for (std::size_t s : set.members()) {
        if (!first) text += ",";
        text += chain.label(static_cast<StateId>(s));
        first = false;
    }
    return text + "}";
}

inline WalkVector resolve_walks(const MarkovChain& chain, const std::vector<std::string>& labels) {
    WalkVector walks;
    walks.reserve(labels.size());
    for (const auto& label : labels) walks.push_back(chain.require(label));
    return walks;
}

inline StateSet resolve_set(const MarkovChain& chain, const std::vector<std::string>& labels) {
    StateSet set(chain.size());
    for (const auto& label : labels) set.set(chain.require(label));
    return set;
}

inline void emit(std::ostream& out, bool json_mode, const nlohmann::ordered_json& doc,
                 const std::string& text) {
    if (json_mode)
        out << doc.dump() << "\n";
    else
        out << text;
}

inline nlohmann::ordered_json result_core(const std::optional<Rational>& value) {
    nlohmann::ordered_json result;
    if (value) {
        result["rational"] = render_rational(*value);
        result["decimal"] = decimal_string(*value);
        result["infinite"] = false;
    } else {
        result["rational"] = nullptr;
        result["decimal"] = nullptr;
        result["infinite"] = true;
    }
    return result;
}

}  // namespace detail

// Runs one invocation. Subcommands: validate, hit, cover, aux-export,
// simulate (cover|hit). Exit codes: 0 success (an infinite cover time is a
// successful answer), 1 usage or file-format error, 2 domain error,
// 3 state budget exceeded.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact hitting times and k-walk cover times of rational Markov chains"};
    app.require_subcommand(1);
    bool json_mode = false;
    app.add_flag("--json", json_mode, "emit a single JSON object instead of text");

    std::string chain_path;
    std::string from_label;
    std::string targets_csv;
    std::string start_csv;
    std::string out_path;
    std::size_t k = 1;
    std::size_t budget = kDefaultStateBudget;
    SimConfig sim_cfg;

    auto add_chain_arg = [&](CLI::App* cmd) {
        cmd->add_option("chain", chain_path, "chain JSON file")->required();
        cmd->fallthrough();
    };

    CLI::App* validate = app.add_subcommand("validate", "parse a chain file and check invariants");
    add_chain_arg(validate);

    CLI::App* hit = app.add_subcommand("hit", "exact expected hitting time of a target set");
    add_chain_arg(hit);
    hit->add_option("--from", from_label, "start state label")->required();
    hit->add_option("--targets", targets_csv, "comma-separated target labels")->required();

    CLI::App* cover = app.add_subcommand("cover", "exact k-walk cover time");
    add_chain_arg(cover);
    cover->add_option("--k", k, "number of simultaneous walks")->check(CLI::PositiveNumber);
    cover->add_option("--start", start_csv, "comma-separated start labels, one per walk")
        ->required();
    cover->add_option("--budget", budget, "auxiliary state budget")->check(CLI::PositiveNumber);

    CLI::App* aux_export = app.add_subcommand("aux-export", "write the auxiliary chain as DOT");
    add_chain_arg(aux_export);
    aux_export->add_option("--k", k, "number of simultaneous walks")->check(CLI::PositiveNumber);
    aux_export->add_option("--start", start_csv, "comma-separated start labels, one per walk")
        ->required();
    aux_export->add_option("--out", out_path, "output DOT file")->required();
    aux_export->add_option("--budget", budget, "auxiliary state budget")
        ->check(CLI::PositiveNumber);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo cross-check");
    simulate->require_subcommand(1);
    simulate->fallthrough();
    auto add_sim_opts = [&](CLI::App* cmd) {
        cmd->add_option("--trials", sim_cfg.trials, "number of independent trials")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", sim_cfg.seed, "RNG seed");
        cmd->add_option("--max-steps", sim_cfg.max_steps, "per-trial step cap")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* sim_cover = simulate->add_subcommand("cover", "simulate k-walk cover times");
    add_chain_arg(sim_cover);
    sim_cover->add_option("--k", k, "number of simultaneous walks")->check(CLI::PositiveNumber);
    sim_cover->add_option("--start", start_csv, "comma-separated start labels, one per walk")
        ->required();
    add_sim_opts(sim_cover);
    CLI::App* sim_hit = simulate->add_subcommand("hit", "simulate hitting times");
    add_chain_arg(sim_hit);
    sim_hit->add_option("--from", from_label, "start state label")->required();
    sim_hit->add_option("--targets", targets_csv, "comma-separated target labels")->required();
    add_sim_opts(sim_hit);

    std::vector<const char*> argv;
    argv.push_back("covertime");
    for (const auto& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    std::string command;
    try {
        if (validate->parsed()) {
            command = "validate";
            const MarkovChain chain = load_chain_file(chain_path);
            std::size_t edges = 0;
            for (StateId s = 0; s < chain.size(); ++s) edges += chain.row(s).size();
            nlohmann::ordered_json doc{{"command", command},
                                       {"result",
                                        {{"valid", true},
                                         {"states", chain.size()},
                                         {"transitions", edges}}}};
            detail::emit(out, json_mode, doc,
                         "valid: " + std::to_string(chain.size()) + " states, " +
                             std::to_string(edges) + " transitions\n");
        } else if (hit->parsed()) {
            command = "hit";
            const MarkovChain chain = load_chain_file(chain_path);
            const StateId from = chain.require(from_label);
            const StateSet targets = detail::resolve_set(chain, detail::split_csv(targets_csv));
            const HittingSolution solution = hitting_times(chain, targets);
            const bool member = solution.finite_set.test(from);
            const std::string set_text = detail::set_notation(chain, targets);

            std::optional<Rational> value;
            if (member) value = solution.times.at(from);
            nlohmann::ordered_json result = detail::result_core(value);
            result["from"] = from_label;
            result["targets"] = nlohmann::ordered_json::array();
            for (std::size_t s : targets.members())
                result["targets"].push_back(chain.label(static_cast<StateId>(s)));
            result["in_finite_set"] = member;
            nlohmann::ordered_json doc{{"command", command}, {"result", result}};

            std::string text;
            if (member) {
                text = from_label + " ∈ B(" + set_text + ")\n" + render_rational(*value) +
                       "\n" + decimal_string(*value) + "\n";
            } else {
                text = from_label + " ∉ B(" + set_text + ")\n";
            }
            detail::emit(out, json_mode, doc, text);
        } else if (cover->parsed()) {
            command = "cover";
            const MarkovChain chain = load_chain_file(chain_path);
            const auto start_labels = detail::split_csv(start_csv);
            if (start_labels.size() != k)
                throw DimensionMismatch("--start lists " + std::to_string(start_labels.size()) +
                                        " states, --k is " + std::to_string(k));
            const WalkVector start = detail::resolve_walks(chain, start_labels);
            const CoverTime value = cover_time(chain, k, start, budget);

            nlohmann::ordered_json result = detail::result_core(value);
            result["k"] = k;
            result["start"] = start_labels;
            nlohmann::ordered_json doc{{"command", command}, {"result", result}};
            const std::string text = value ? render_rational(*value) + "\n" +
                                                 decimal_string(*value) + "\n"
                                           : "infinite\n";
            detail::emit(out, json_mode, doc, text);
        } else if (aux_export->parsed()) {
            command = "aux-export";
            const MarkovChain chain = load_chain_file(chain_path);
            const auto start_labels = detail::split_csv(start_csv);
            if (start_labels.size() != k)
                throw DimensionMismatch("--start lists " + std::to_string(start_labels.size()) +
                                        " states, --k is " + std::to_string(k));
            const WalkVector start = detail::resolve_walks(chain, start_labels);
            const AuxChain aux = build_aux_chain(chain, k, start, budget);

            std::ofstream file(out_path);
            if (!file) throw ChainFormatError("cannot write to '" + out_path + "'");
            file << export_dot(aux);
            file.close();

            nlohmann::ordered_json doc{{"command", command},
                                       {"result",
                                        {{"out", out_path},
                                         {"states", aux.size()},
                                         {"targets", aux.targets().size()}}}};
            detail::emit(out, json_mode, doc,
                         "wrote " + out_path + " (" + std::to_string(aux.size()) + " states, " +
                             std::to_string(aux.targets().size()) + " targets)\n");
        } else if (simulate->parsed()) {
            const MarkovChain chain = load_chain_file(chain_path);
            SimSummary summary{};
            nlohmann::ordered_json result;
            if (sim_cover->parsed()) {
                command = "simulate-cover";
                const auto start_labels = detail::split_csv(start_csv);
                if (start_labels.size() != k)
                    throw DimensionMismatch("--start lists " +
                                            std::to_string(start_labels.size()) + " states, --k is " +
                                            std::to_string(k));
                summary = simulate_cover(chain, k, detail::resolve_walks(chain, start_labels),
                                         sim_cfg);
            } else {
                command = "simulate-hit";
                const StateId from = chain.require(from_label);
                const StateSet targets =
                    detail::resolve_set(chain, detail::split_csv(targets_csv));
                summary = simulate_hitting(chain, from, targets, sim_cfg);
            }
            result = detail::result_core(std::nullopt);
            result["infinite"] = false;  // simulation never proves divergence
            result["mean"] = summary.mean;
            result["std_error"] = summary.std_error;
            result["samples"] = summary.samples;
            result["truncated"] = summary.truncated;
            nlohmann::ordered_json doc{{"command", command}, {"result", result}};
            detail::emit(out, json_mode, doc,
                         "mean: " + detail::format_double(summary.mean) +
                             "\nstd_error: " + detail::format_double(summary.std_error) +
                             "\nsamples: " + std::to_string(summary.samples) +
                             "\ntruncated: " + std::to_string(summary.truncated) + "\n");
        }
    } catch (const Error& e) {
        if (json_mode) {
            nlohmann::ordered_json doc{
                {"command", command},
                {"error", {{"type", e.kind()}, {"message", e.what()}}}};
            out << doc.dump() << "\n";
        } else {
            err << "error: " << e.what() << "\n";
        }
        switch (e.category()) {
            case ErrorCategory::parse:
                return 1;
            case ErrorCategory::domain:
                return 2;
            case ErrorCategory::budget:
                return 3;
        }
    }
    return 0;
}

}  // namespace covertime::cli
