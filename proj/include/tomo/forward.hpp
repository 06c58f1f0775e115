#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tomo/geometry.hpp"
#include "tomo/noise.hpp"

namespace tomo {

enum class Modality { Spect, Pet, Xray };

Modality parse_modality(const std::string& name);
std::string to_string(Modality m);

struct PointSource {
    Point y0;
    double intensity = 1.0;
};

/// Emission density f and mean attenuation on grids, plus optional point
/// sources (delta emitters) that are deposited analytically.
struct Phantom {
    Domain domain;
    Grid2D emission;
    Grid2D attenuation_mean;
    std::vector<PointSource> sources;

    void validate() const;
};

/// How a delta source at lateral offset u_src is spread over detector bins.
enum class DepositMode { Nearest, Gaussian };

struct Deposit {
    double du = 0.0;
    DepositMode mode = DepositMode::Nearest;

    /// Density per unit offset seen by a bin centred at u for a unit source at
    /// u_src. Nearest: 1/du on the half-open bin [u - du/2, u + du/2).
    /// Gaussian: normal density with standard deviation du/2, averaged over the bin.
    double weight(double u, double u_src) const;
};

/// Uniform samples of f and mean attenuation on the chord of a ray through
/// the domain. Empty when the ray misses or is tangent.
struct ChordSamples {
    double s_entry = 0.0;
    double s_exit = 0.0;
    double h = 0.0;
    std::vector<double> f;
    std::vector<double> mu;

    std::size_t intervals() const { return f.empty() ? 0 : f.size() - 1; }
    double length() const { return s_exit - s_entry; }
};

ChordSamples sample_chord(const Phantom& phantom, const Ray& ray, double step);

/// Attenuation from each node to the chord exit by one backward trapezoid sweep.
std::vector<double> cumulative_to_exit(const std::vector<double>& mu, double h);

/// int f(s) exp(-int_s^exit mu) ds by trapezoid on the nodes.
double attenuated_integral(const std::vector<double>& f, const std::vector<double>& mu, double h);

/// SPECT: int exp(-int_y^exit mu) f(y) dl, plus deposited point sources.
/// chord.mu is the total attenuation (mean, or mean plus a noise realization).
double spect_projection(const Phantom& phantom, const Ray& ray, const ChordSamples& chord,
                        const Deposit& deposit);

/// PET: exp(-int_chord mu) * (int_chord f + deposited point sources).
double pet_projection(const Phantom& phantom, const Ray& ray, const ChordSamples& chord,
                      const Deposit& deposit);

/// X-ray: I0 * exp(-int_chord mu). A missed or tangent ray returns I0.
double xray_projection(double I0, const ChordSamples& chord);

double project(const Phantom& phantom, Modality modality, const Ray& ray,
               const ChordSamples& chord, const Deposit& deposit, double I0);

/// Closed-form noise averages. Every attenuation exponent uses mu* = mubar - h
/// together with the factor exp{(h/alpha)(exp(-alpha D) - 1)} for the segment
/// length D.
double averaged_spect_projection(const Phantom& phantom, const ColoredNoise& noise,
                                 const Ray& ray, double step, const Deposit& deposit);
double averaged_pet_projection(const Phantom& phantom, const ColoredNoise& noise, const Ray& ray,
                               double step, const Deposit& deposit);
double averaged_xray_projection(double I0, double mubar_integral, const ColoredNoise& noise,
                                double L);

/// Inverse of averaged_xray_projection: returns int mu* over the chord.
double correct_xray_projection(double g_avg, double I0, const ColoredNoise& noise, double L);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

/// Sample mean and standard error over independent noise realizations added
/// to the mean attenuation on the chord. Realization i is seeded with
/// stream_seed(seed, i); the reduction runs in index order.
McEstimate mc_average_projection(const Phantom& phantom, const ColoredNoise& noise,
                                 const Ray& ray, Modality modality, std::size_t n_samples,
                                 double step, std::uint64_t seed, const Deposit& deposit,
                                 double I0 = 1.0);

/// Projection data on an angle x offset lattice; values[view * n_bins + bin].
struct Sinogram {
    std::vector<double> phis;
    std::vector<double> us;
    double du = 0.0;
    std::vector<double> values;
    Modality modality = Modality::Spect;
    double I0 = 1.0;

    std::size_t n_views() const { return phis.size(); }
    std::size_t n_bins() const { return us.size(); }
    double& at(std::size_t v, std::size_t j) { return values[v * us.size() + j]; }
    double at(std::size_t v, std::size_t j) const { return values[v * us.size() + j]; }
    void validate() const;
};

struct Acquisition {
    std::size_t n_views = 180;
    std::size_t n_bins = 128;
    double du = 0.0;
    double I0 = 1.0;
    DepositMode deposit = DepositMode::Nearest;

    void validate() const;
    /// phi_v = 2 pi v / n_views.
    std::vector<double> angles() const;
    /// Bin centres symmetric about zero.
    std::vector<double> offsets() const;
};

Sinogram empty_sinogram(const Acquisition& acq, Modality modality);

/// Deterministic (mean attenuation) sinogram, or one noisy realization when
/// `noise` is given; ray (v, j) then uses stream_seed(seed, v * n_bins + j).
Sinogram project_sinogram(const Phantom& phantom, Modality modality, const Acquisition& acq,
                          double step, const ColoredNoise* noise = nullptr,
                          std::uint64_t seed = 0);

Sinogram average_sinogram(const Phantom& phantom, const ColoredNoise& noise, Modality modality,
                          const Acquisition& acq, double step);

/// Applies correct_xray_projection to every bin; chord lengths come from the
/// domain. The result carries the SPECT-style tag for line integrals.
Sinogram correct_sinogram(const Sinogram& xray, const ColoredNoise& noise, const Domain& domain);

void write_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path);
/// Reads `phi,u,value` rows; the lattice must be complete and u uniform.
Sinogram read_sinogram_csv(const std::filesystem::path& path, Modality modality = Modality::Spect);

}  // namespace tomo
