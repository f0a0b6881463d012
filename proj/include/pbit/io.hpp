#pragma once

#include "pbit/learning.hpp"
#include "pbit/model.hpp"
#include "pbit/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"

namespace pbit {

// Shortest round-trip decimal rendering; used for every double that lands in
// a CSV or a JSON string so output bodies are byte-stable.
std::string format_double(double v);
double parse_double(const std::string& s);

// Model document: topology parameters, per-edge {node_a, node_b, code,
// enabled}, per-node {id, bias_code}, scales as decimal strings. Codes are
// integers, so a load/save round trip is bit-exact.
nlohmann::json model_to_json(const IsingModel& model);
IsingModel model_from_json(const nlohmann::json& j);
void save_model(const IsingModel& model, const std::filesystem::path& path);
IsingModel load_model(const std::filesystem::path& path);

// Graph formats: text edge list ("u v w" per line, '#' comments) and a JSON
// variant {"nodes": n, "edges": [[u, v, w], ...]}.
Graph parse_graph_edgelist(const std::string& text);
Graph graph_from_json(const nlohmann::json& j);
Graph load_graph(const std::filesystem::path& path); // dispatches on .json extension

// Target distribution: {"nodes": [...], "probs": {"bitstring": p, ...}}.
// Bitstrings read left to right in designated-node order ("110" over (A,B,Out)
// means A=1, B=1, Out=0); omitted patterns have probability zero.
nlohmann::json target_to_json(const TargetDistribution& target);
TargetDistribution target_from_json(const nlohmann::json& j);

std::string pattern_bitstring(std::uint64_t pattern, std::size_t bits);

// 64-bit FNV-1a, hex-encoded; stamped into every output file.
std::string fnv1a_hex(const std::string& bytes);

} // namespace pbit
