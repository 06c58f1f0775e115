#include "tomo/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomo/error.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

Modality parse_modality(const std::string& name) {
    if (name == "spect") return Modality::Spect;
    if (name == "pet") return Modality::Pet;
    if (name == "xray") return Modality::Xray;
    throw InvalidArgument("unknown modality '" + name + "' (expected spect, pet or xray)");
}

std::string to_string(Modality m) {
    switch (m) {
        case Modality::Spect: return "spect";
        case Modality::Pet: return "pet";
        case Modality::Xray: return "xray";
    }
    return "?";
}

void Phantom::validate() const {
    domain.validate();
    emission.validate();
    attenuation_mean.validate();
    for (double v : emission.values)
        if (v < 0.0) throw InvalidArgument("emission density must be nonnegative");
    for (const auto& src : sources) {
        if (!(src.intensity > 0.0)) throw InvalidArgument("point source intensity must be positive");
        if (!domain.contains(src.y0)) throw InvalidArgument("point source lies outside the domain");
    }
}

double Deposit::weight(double u, double u_src) const {
    if (!(du > 0.0)) throw InvalidArgument("point sources need a positive bin width du");
    const double d = u_src - u;
    if (mode == DepositMode::Nearest) return (d >= -0.5 * du && d < 0.5 * du) ? 1.0 / du : 0.0;
    // Gaussian of width du/2 averaged over the bin, so the bins sum to one.
    const double scale = 1.0 / (std::sqrt(2.0) * 0.5 * du);
    return 0.5 * (std::erf((d + 0.5 * du) * scale) - std::erf((d - 0.5 * du) * scale)) / du;
}

ChordSamples sample_chord(const Phantom& phantom, const Ray& ray, double step) {
    ChordSamples c;
    if (chord_length(phantom.domain, ray) <= 0.0) return c;
    c.s_entry = entry_parameter(phantom.domain, ray);
    c.s_exit = exit_parameter(phantom.domain, ray);
    const std::size_t n = interval_count(c.length(), step);
    c.h = c.length() / static_cast<double>(n);
    c.f = sample_along(phantom.emission, ray, c.s_entry, c.s_exit, n);
    c.mu = sample_along(phantom.attenuation_mean, ray, c.s_entry, c.s_exit, n);
    return c;
}

std::vector<double> cumulative_to_exit(const std::vector<double>& mu, double h) {
    std::vector<double> a(mu.size(), 0.0);
    for (std::size_t k = mu.size(); k-- > 1;) a[k - 1] = a[k] + 0.5 * h * (mu[k - 1] + mu[k]);
    return a;
}

namespace {

double weighted_sweep(const std::vector<double>& f, const std::vector<double>& a, double h) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f.front() * std::exp(-a.front()) + f.back() * std::exp(-a.back()));
    for (std::size_t k = 1; k + 1 < f.size(); ++k) sum += f[k] * std::exp(-a[k]);
    return sum * h;
}

void check_finite(const ChordSamples& chord) {
    for (double v : chord.mu)
        if (!std::isfinite(v)) throw NonFiniteValue("non-finite attenuation on ray");
    for (double v : chord.f)
        if (!std::isfinite(v)) throw NonFiniteValue("non-finite emission on ray");
}

// Linear interpolation of node values at ray coordinate s.
double interpolate(const ChordSamples& chord, const std::vector<double>& values, double s) {
    const std::size_t n = chord.intervals();
    double pos = (s - chord.s_entry) / chord.h;
    pos = std::clamp(pos, 0.0, static_cast<double>(n));
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 1);
    const double t = pos - static_cast<double>(k);
    return (1.0 - t) * values[k] + t * values[k + 1];
}

// Sum over point sources of I * w(u) * exp(-attenuation(s_src)) * extra(d),
// where d is the source-to-exit distance.
template <class Extra>
double deposit_sources(const Phantom& phantom, const Ray& ray, const ChordSamples& chord,
                       const std::vector<double>& a, const Deposit& deposit, Extra extra) {
    double sum = 0.0;
    for (const auto& src : phantom.sources) {
        const double w = deposit.weight(ray.u, dot(src.y0, ray.perp()));
        if (w == 0.0) continue;
        const double s_src = dot(src.y0, ray.dir());
        const double atten = chord.intervals() ? interpolate(chord, a, s_src) : 0.0;
        sum += src.intensity * w * std::exp(-atten) * extra(chord.s_exit - s_src);
    }
    return sum;
}

double plain_sources(const Phantom& phantom, const Ray& ray, const Deposit& deposit) {
    double sum = 0.0;
    for (const auto& src : phantom.sources)
        sum += src.intensity * deposit.weight(ray.u, dot(src.y0, ray.perp()));
    return sum;
}

}  // namespace

double attenuated_integral(const std::vector<double>& f, const std::vector<double>& mu, double h) {
    return weighted_sweep(f, cumulative_to_exit(mu, h), h);
}

double spect_projection(const Phantom& phantom, const Ray& ray, const ChordSamples& chord,
                        const Deposit& deposit) {
    if (chord.intervals() == 0) return 0.0;
    check_finite(chord);
    const auto a = cumulative_to_exit(chord.mu, chord.h);
    double g = weighted_sweep(chord.f, a, chord.h);
    if (!phantom.sources.empty())
        g += deposit_sources(phantom, ray, chord, a, deposit, [](double) { return 1.0; });
    return g;
}

double pet_projection(const Phantom& phantom, const Ray& ray, const ChordSamples& chord,
                      const Deposit& deposit) {
    if (chord.intervals() == 0) return 0.0;
    check_finite(chord);
    double emitted = trapezoid(chord.f, chord.h);
    if (!phantom.sources.empty()) emitted += plain_sources(phantom, ray, deposit);
    return std::exp(-trapezoid(chord.mu, chord.h)) * emitted;
}

double xray_projection(double I0, const ChordSamples& chord) {
    if (!(I0 > 0.0)) throw InvalidArgument("I0 must be positive");
    if (chord.intervals() == 0) return I0;
    check_finite(chord);
    return I0 * std::exp(-trapezoid(chord.mu, chord.h));
}

double project(const Phantom& phantom, Modality modality, const Ray& ray,
               const ChordSamples& chord, const Deposit& deposit, double I0) {
    switch (modality) {
        case Modality::Spect: return spect_projection(phantom, ray, chord, deposit);
        case Modality::Pet: return pet_projection(phantom, ray, chord, deposit);
        case Modality::Xray: return xray_projection(I0, chord);
    }
    throw InvalidArgument("unknown modality");
}

double averaged_spect_projection(const Phantom& phantom, const ColoredNoise& noise,
                                 const Ray& ray, double step, const Deposit& deposit) {
    noise.validate();
    const ChordSamples chord = sample_chord(phantom, ray, step);
    if (chord.intervals() == 0) return 0.0;
    check_finite(chord);
    auto a = cumulative_to_exit(chord.mu, chord.h);
    // Effective exponent: int mu* - (h/alpha)(exp(-alpha D) - 1), D = distance to exit.
    auto a_eff = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = chord.s_exit - (chord.s_entry + static_cast<double>(k) * chord.h);
        a_eff[k] = a[k] - noise.h * d - g_exponent(noise, d);
    }
    double g = weighted_sweep(chord.f, a_eff, chord.h);
    if (!phantom.sources.empty()) {
        auto a_star = a;
        for (std::size_t k = 0; k < a.size(); ++k)
            a_star[k] -= noise.h * (chord.s_exit - (chord.s_entry + static_cast<double>(k) * chord.h));
        g += deposit_sources(phantom, ray, chord, a_star, deposit,
                             [&](double d) { return std::exp(g_exponent(noise, d)); });
    }
    return g;
}

double averaged_pet_projection(const Phantom& phantom, const ColoredNoise& noise, const Ray& ray,
                               double step, const Deposit& deposit) {
    noise.validate();
    const ChordSamples chord = sample_chord(phantom, ray, step);
    if (chord.intervals() == 0) return 0.0;
    check_finite(chord);
    double emitted = trapezoid(chord.f, chord.h);
    if (!phantom.sources.empty()) emitted += plain_sources(phantom, ray, deposit);
    return mean_attenuation_factor(noise, trapezoid(chord.mu, chord.h), chord.length()) * emitted;
}

double averaged_xray_projection(double I0, double mubar_integral, const ColoredNoise& noise,
                                double L) {
    if (!(I0 > 0.0)) throw InvalidArgument("I0 must be positive");
    if (L < 0.0) throw InvalidArgument("chord length must be >= 0");
    return I0 * std::exp(g_exponent(noise, L) - (mubar_integral - noise.h * L));
}

double correct_xray_projection(double g_avg, double I0, const ColoredNoise& noise, double L) {
    if (!(I0 > 0.0)) throw InvalidArgument("I0 must be positive");
    if (!(g_avg > 0.0)) throw InvalidArgument("averaged projection must be positive");
    if (g_avg > I0 * (1.0 + 1e-9)) throw InvalidArgument("averaged projection exceeds I0");
    if (L < 0.0) throw InvalidArgument("chord length must be >= 0");
    return -std::log(g_avg / I0) + g_exponent(noise, L);
}

McEstimate mc_average_projection(const Phantom& phantom, const ColoredNoise& noise,
                                 const Ray& ray, Modality modality, std::size_t n_samples,
                                 double step, std::uint64_t seed, const Deposit& deposit,
                                 double I0) {
    noise.validate();
    if (n_samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
    const ChordSamples base = sample_chord(phantom, ray, step);
    std::vector<double> values(n_samples);
    parallel_for(n_samples, [&](std::size_t i) {
        ChordSamples chord = base;
        if (chord.intervals() > 0) {
            Rng rng(stream_seed(seed, i));
            std::vector<double> path;
            fill_path(noise, chord.h, chord.mu.size(), rng, path);
            for (std::size_t k = 0; k < path.size(); ++k) chord.mu[k] += path[k];
        }
        values[i] = project(phantom, modality, ray, chord, deposit, I0);
    });
    // Shifted sums: exact zero spread when every realization is identical.
    const double shift = values.front();
    double s1 = 0.0;
    double s2 = 0.0;
    for (double v : values) {
        s1 += v - shift;
        s2 += (v - shift) * (v - shift);
    }
    const auto n = static_cast<double>(n_samples);
    McEstimate est;
    est.samples = n_samples;
    est.mean = shift + s1 / n;
    const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
    est.stderr_ = std::sqrt(var / n);
    return est;
}

}  // namespace tomo
