// output.hpp: Tables, CSV/JSON writers and run manifests
//
// Every CSV starts with a block of '#' comment lines carrying the manifest
// hash; the JSON file next to it holds the same rows as an array of objects.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "entdyn/greens.hpp"
#include "entdyn/model.hpp"
#include "entdyn/sweep.hpp"

namespace entdyn {

inline constexpr const char* kToolVersion = "1.0.0";

// Fixed column orders.
extern const std::vector<std::string> kEvolveColumns;
extern const std::vector<std::string> kSweepColumns;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows; // numbers, strings or booleans

    nlohmann::json to_json() const;
};

struct RunManifest {
    std::string command;
    Configuration config;
    nlohmann::json grid = nlohmann::json::object();
    std::string created; // UTC timestamp, excluded from the hash

    nlohmann::json to_json() const;
    // FNV-1a 64 over the canonical JSON without the timestamp, as 16 hex digits.
    std::string hash() const;
};

RunManifest manifest_from_json(const nlohmann::json& j);

// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

std::string current_utc_timestamp();

std::string render_csv(const Table& table, const std::vector<std::string>& comments);

// Writes `stem`.csv and `stem`.json into `dir`, creating it if needed.
// Throws IoError on any filesystem failure.
void write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                 const RunManifest& manifest);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

// Per-step observables for the evolve CSV.
Table evolution_table(const GreensSeries& series, const ModelConfig& model);

Table sweep_table(const std::vector<PhasePoint>& points);

// Gnuplot nonuniform matrix of `field` (u_inf_abs, v_inf or en_inf) over
// (eta, s) for temperature slice `i_t`: first row holds the eta values,
// every following row starts with s.
std::string gnuplot_matrix(const std::vector<PhasePoint>& points, const SweepGrid& grid, std::size_t i_t,
                           const std::string& field);

} // namespace entdyn
