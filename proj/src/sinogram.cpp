#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tomo/error.hpp"
#include "tomo/forward.hpp"
#include "tomo/parallel.hpp"

namespace tomo {

void Sinogram::validate() const {
    if (phis.empty() || us.empty()) throw InvalidArgument("sinogram has no views or bins");
    if (values.size() != phis.size() * us.size())
        throw InvalidArgument("sinogram value count does not match views x bins");
    if (!(du > 0.0)) throw InvalidArgument("sinogram bin width must be positive");
    if (!std::is_sorted(phis.begin(), phis.end())) throw InvalidArgument("view angles must be sorted");
    for (double v : values)
        if (!std::isfinite(v)) throw NonFiniteValue("sinogram contains a non-finite value");
    if (modality == Modality::Xray)
        for (double v : values)
            if (!(v > 0.0) || v > I0 * (1.0 + 1e-9))
                throw InvalidArgument("X-ray sinogram values must lie in (0, I0]");
}

void Acquisition::validate() const {
    if (n_views < 1 || n_bins < 1) throw InvalidArgument("acquisition needs views and bins");
    if (!(du > 0.0)) throw InvalidArgument("acquisition bin width must be positive");
    if (!(I0 > 0.0)) throw InvalidArgument("I0 must be positive");
}

std::vector<double> Acquisition::angles() const {
    std::vector<double> phis(n_views);
    for (std::size_t v = 0; v < n_views; ++v)
        phis[v] = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(n_views);
    return phis;
}

std::vector<double> Acquisition::offsets() const {
    std::vector<double> us(n_bins);
    const double mid = 0.5 * static_cast<double>(n_bins - 1);
    for (std::size_t j = 0; j < n_bins; ++j) us[j] = (static_cast<double>(j) - mid) * du;
    return us;
}

Sinogram empty_sinogram(const Acquisition& acq, Modality modality) {
    acq.validate();
    Sinogram s;
    s.phis = acq.angles();
    s.us = acq.offsets();
    s.du = acq.du;
    s.values.assign(acq.n_views * acq.n_bins, 0.0);
    s.modality = modality;
    s.I0 = acq.I0;
    return s;
}

Sinogram project_sinogram(const Phantom& phantom, Modality modality, const Acquisition& acq,
                          double step, const ColoredNoise* noise, std::uint64_t seed) {
    phantom.validate();
    if (noise) noise->validate();
    Sinogram s = empty_sinogram(acq, modality);
    const Deposit deposit{acq.du, acq.deposit};
    const std::size_t nb = acq.n_bins;
    parallel_for(s.values.size(), [&](std::size_t idx) {
        const Ray ray{s.phis[idx / nb], s.us[idx % nb]};
        ChordSamples chord = sample_chord(phantom, ray, step);
        if (noise && chord.intervals() > 0) {
            Rng rng(stream_seed(seed, idx));
            std::vector<double> path;
            fill_path(*noise, chord.h, chord.mu.size(), rng, path);
            for (std::size_t k = 0; k < path.size(); ++k) chord.mu[k] += path[k];
        }
        s.values[idx] = project(phantom, modality, ray, chord, deposit, acq.I0);
    });
    return s;
}

Sinogram average_sinogram(const Phantom& phantom, const ColoredNoise& noise, Modality modality,
                          const Acquisition& acq, double step) {
    phantom.validate();
    noise.validate();
    Sinogram s = empty_sinogram(acq, modality);
    const Deposit deposit{acq.du, acq.deposit};
    const std::size_t nb = acq.n_bins;
    parallel_for(s.values.size(), [&](std::size_t idx) {
        const Ray ray{s.phis[idx / nb], s.us[idx % nb]};
        switch (modality) {
            case Modality::Spect:
                s.values[idx] = averaged_spect_projection(phantom, noise, ray, step, deposit);
                break;
            case Modality::Pet:
                s.values[idx] = averaged_pet_projection(phantom, noise, ray, step, deposit);
                break;
            case Modality::Xray: {
                const ChordSamples chord = sample_chord(phantom, ray, step);
                s.values[idx] = averaged_xray_projection(acq.I0, trapezoid(chord.mu, chord.h),
                                                         noise, chord.length());
                break;
            }
        }
    });
    return s;
}

Sinogram correct_sinogram(const Sinogram& xray, const ColoredNoise& noise, const Domain& domain) {
    noise.validate();
    Sinogram out = xray;
    out.modality = Modality::Spect;
    for (std::size_t v = 0; v < xray.n_views(); ++v)
        for (std::size_t j = 0; j < xray.n_bins(); ++j) {
            const double L = chord_length(domain, Ray{xray.phis[v], xray.us[j]});
            out.at(v, j) = correct_xray_projection(xray.at(v, j), xray.I0, noise, L);
        }
    return out;
}

void write_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "phi,u,value\n";
    char line[96];
    for (std::size_t v = 0; v < sino.n_views(); ++v)
        for (std::size_t j = 0; j < sino.n_bins(); ++j) {
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", sino.phis[v], sino.us[j],
                          sino.at(v, j));
            out << line;
        }
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<double> unique_sorted(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs)
        if (out.empty() || std::abs(x - out.back()) > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
}

std::size_t locate(const std::vector<double>& xs, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x - 1e-12 * std::max(1.0, std::abs(x)));
    return static_cast<std::size_t>(it - xs.begin());
}

}  // namespace

Sinogram read_sinogram_csv(const std::filesystem::path& path, Modality modality) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("phi,u,value", 0) != 0)
        throw IoError(path.string() + ": expected header 'phi,u,value'");
    struct Row {
        double phi, u, value;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        Row r{};
        char c1 = 0;
        char c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> r.phi >> c1 >> r.u >> c2 >> r.value) || c1 != ',' || c2 != ',')
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        rows.push_back(r);
    }
    if (rows.empty()) throw IoError(path.string() + ": no data rows");

    std::vector<double> phis;
    std::vector<double> us;
    for (const auto& r : rows) {
        phis.push_back(r.phi);
        us.push_back(r.u);
    }
    Sinogram s;
    s.phis = unique_sorted(std::move(phis));
    s.us = unique_sorted(std::move(us));
    s.modality = modality;
    if (rows.size() != s.phis.size() * s.us.size())
        throw IoError(path.string() + ": rows do not form a complete angle x offset lattice");
    s.du = s.us.size() > 1 ? (s.us.back() - s.us.front()) / static_cast<double>(s.us.size() - 1) : 1.0;
    for (std::size_t j = 1; j < s.us.size(); ++j)
        if (std::abs(s.us[j] - s.us[j - 1] - s.du) > 1e-6 * s.du)
            throw IoError(path.string() + ": offsets are not uniformly spaced");
    s.values.assign(rows.size(), std::nan(""));
    for (const auto& r : rows) s.at(locate(s.phis, r.phi), locate(s.us, r.u)) = r.value;
    for (double v : s.values)
        if (std::isnan(v)) throw IoError(path.string() + ": duplicate or missing lattice entries");
    if (modality == Modality::Xray) s.I0 = *std::max_element(s.values.begin(), s.values.end());
    return s;
}

}  // namespace tomo
