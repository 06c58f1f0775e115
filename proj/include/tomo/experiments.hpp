#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomo/config.hpp"

namespace tomo {

struct Check {
    std::string id;
    std::string description;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct Report {
    std::string experiment;
    int criterion = 0;
    std::string config_hash;
    std::vector<std::uint64_t> seeds;
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();
    std::vector<std::string> outputs;
    double runtime_s = 0.0;

    bool passed() const;
    nlohmann::json to_json() const;
};

/// Experiment names in acceptance-criterion order.
const std::vector<std::string>& experiment_names();

/// Built-in configuration of an experiment; a user config is merged over it
/// (JSON merge patch) before validation.
nlohmann::json default_experiment_config(const std::string& name);

/// Runs one experiment, writing report.json and any CSV outputs into out_dir.
/// Throws InvalidArgument for an unknown name and ConfigError for a bad config.
Report run_experiment(const std::string& name, const nlohmann::json& user_config,
                      const std::filesystem::path& out_dir);

void write_report(const Report& report, const std::filesystem::path& path);

struct KnRow {
    int n;
    double R;
    double mu;
    double b;
    double quadrature;
    double closed_form;
    double residual;
};

/// Quadrature versus closed form for n = 1..2 m_max over the given lattice.
/// For even n the closed form includes the (-1)^m 4 pi delta^b(R) term.
std::vector<KnRow> kn_table(int m_max, const std::vector<double>& mus,
                            const std::vector<double>& Rs, const std::vector<double>& bs);
void write_kn_csv(const std::vector<KnRow>& rows, const std::filesystem::path& path);

/// Truncated prediction along the x and y lines through y0, written as CSV with
/// columns direction,offset,x,y,R,predicted,noise_free.
void write_point_prediction(const ExperimentConfig& cfg, Point y0, double b,
                            const std::filesystem::path& path);

}  // namespace tomo
