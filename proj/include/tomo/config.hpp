#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomo/forward.hpp"
#include "tomo/scatter.hpp"

namespace tomo {

/// Uniform disk added to the phantom grids. Overlapping disks add up.
struct DiskSpec {
    Point center;
    double radius = 0.0;
    double emission = 0.0;
    double attenuation = 0.0;
};

struct ExperimentConfig {
    double domain_radius = 1.0;
    std::vector<PointSource> point_sources;
    std::vector<DiskSpec> disks;
    std::size_t grid_n = 128;
    std::optional<std::filesystem::path> emission_file;
    std::optional<std::filesystem::path> attenuation_file;
    ColoredNoise noise{0.0, 1.0};
    Acquisition acquisition;
    double b = 0.0;
    std::optional<AngularKernel> scatter;
    std::size_t mc_samples = 1000;
    std::uint64_t mc_seed = 1;
    std::size_t recon_nx = 128;
    std::optional<double> mu_star;
    std::filesystem::path output_dir = ".";
    /// Quadrature step along rays; 0 selects half the phantom grid spacing.
    double step = 0.0;
    /// The merged JSON the fields were read from, kept for reports.
    nlohmann::json raw;

    Domain domain() const { return {{0.0, 0.0}, domain_radius}; }
};

/// Reads and validates a config. Every invalid entry is collected; the thrown
/// ConfigError lists them all by dotted path (e.g. "noise.h").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Phantom grids: loaded from files when given, otherwise rasterized from the
/// disks (4x4 supersampling) on a grid_n^2 lattice covering 1.1x the domain.
Phantom build_phantom(const ExperimentConfig& cfg);

double quadrature_step(const ExperimentConfig& cfg, const Phantom& phantom);

}  // namespace tomo
