#include "tomo/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tomo/error.hpp"
#include "tomo/grid_io.hpp"

namespace tomo {

using nlohmann::json;

namespace {

// Collects schema violations while reading optional fields.
class Reader {
public:
    std::vector<std::string> bad;
    std::vector<std::string> why;

    const json* find(const json& j, const std::string& section, const std::string& key) {
        if (!j.contains(section)) return nullptr;
        const json& s = j.at(section);
        if (!s.is_object()) {
            fail(section, "must be an object");
            return nullptr;
        }
        return s.contains(key) ? &s.at(key) : nullptr;
    }

    double number(const json& j, const std::string& section, const std::string& key, double fallback) {
        const json* v = find(j, section, key);
        if (!v) return fallback;
        if (!v->is_number()) {
            fail(section + "." + key, "must be a number");
            return fallback;
        }
        return v->get<double>();
    }

    std::size_t count(const json& j, const std::string& section, const std::string& key,
                      std::size_t fallback) {
        const json* v = find(j, section, key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0) {
            fail(section + "." + key, "must be a nonnegative integer");
            return fallback;
        }
        return v->get<std::size_t>();
    }

    void require(bool ok, const std::string& field, const std::string& message) {
        if (!ok) fail(field, message);
    }

    void fail(const std::string& field, const std::string& message) {
        bad.push_back(field);
        why.push_back(field + " " + message);
    }

    Point point(const json& v, const std::string& field) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(field, "must be a two-element numeric array");
            return {};
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }
};

}  // namespace

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError({"<root>"}, "config must be a JSON object");
    Reader rd;
    ExperimentConfig c;
    c.raw = j;

    c.domain_radius = rd.number(j, "domain", "radius", 1.0);
    rd.require(c.domain_radius > 0.0, "domain.radius", "must be > 0");

    if (j.contains("phantom")) {
        const json& ph = j.at("phantom");
        if (ph.contains("point_sources")) {
            const json& arr = ph.at("point_sources");
            if (!arr.is_array()) {
                rd.fail("phantom.point_sources", "must be an array");
            } else {
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string base = "phantom.point_sources[" + std::to_string(i) + "]";
                    const json& s = arr[i];
                    PointSource src;
                    if (!s.is_object() || !s.contains("y0")) {
                        rd.fail(base + ".y0", "is required");
                        continue;
                    }
                    src.y0 = rd.point(s.at("y0"), base + ".y0");
                    if (s.contains("intensity")) {
                        if (!s.at("intensity").is_number()) rd.fail(base + ".intensity", "must be a number");
                        else src.intensity = s.at("intensity").get<double>();
                    }
                    rd.require(src.intensity > 0.0, base + ".intensity", "must be > 0");
                    rd.require(norm(src.y0) < c.domain_radius, base + ".y0", "must lie inside the domain");
                    c.point_sources.push_back(src);
                }
            }
        }
        if (ph.contains("disks")) {
            const json& arr = ph.at("disks");
            if (!arr.is_array()) {
                rd.fail("phantom.disks", "must be an array");
            } else {
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string base = "phantom.disks[" + std::to_string(i) + "]";
                    const json& d = arr[i];
                    if (!d.is_object()) {
                        rd.fail(base, "must be an object");
                        continue;
                    }
                    DiskSpec disk;
                    disk.center = d.contains("center") ? rd.point(d.at("center"), base + ".center") : Point{};
                    auto num = [&](const char* key, double fallback) {
                        if (!d.contains(key)) return fallback;
                        if (!d.at(key).is_number()) {
                            rd.fail(base + "." + key, "must be a number");
                            return fallback;
                        }
                        return d.at(key).get<double>();
                    };
                    disk.radius = num("radius", 0.0);
                    disk.emission = num("emission", 0.0);
                    disk.attenuation = num("attenuation", 0.0);
                    rd.require(disk.radius > 0.0, base + ".radius", "must be > 0");
                    rd.require(std::isfinite(disk.emission), base + ".emission", "must be finite");
                    rd.require(std::isfinite(disk.attenuation), base + ".attenuation", "must be finite");
                    c.disks.push_back(disk);
                }
            }
        }
        for (const char* key : {"emission_file", "attenuation_file"}) {
            if (!ph.contains(key)) continue;
            if (!ph.at(key).is_string()) {
                rd.fail(std::string("phantom.") + key, "must be a path string");
                continue;
            }
            (std::string(key) == "emission_file" ? c.emission_file : c.attenuation_file) =
                ph.at(key).get<std::string>();
        }
    }
    c.grid_n = rd.count(j, "phantom", "grid_n", 128);
    rd.require(c.grid_n >= 2, "phantom.grid_n", "must be >= 2");

    c.noise.h = rd.number(j, "noise", "h", 0.0);
    c.noise.alpha = rd.number(j, "noise", "alpha", 1.0);
    rd.require(c.noise.h >= 0.0, "noise.h", "must be >= 0");
    rd.require(c.noise.alpha > 0.0, "noise.alpha", "must be > 0");

    auto& acq = c.acquisition;
    acq.n_views = rd.count(j, "acquisition", "n_views", 180);
    acq.n_bins = rd.count(j, "acquisition", "n_bins", 129);
    rd.require(acq.n_views >= 1, "acquisition.n_views", "must be >= 1");
    rd.require(acq.n_bins >= 2, "acquisition.n_bins", "must be >= 2");
    const double default_du =
        acq.n_bins >= 2 ? 2.0 * c.domain_radius / static_cast<double>(acq.n_bins - 1) : 1.0;
    acq.du = rd.number(j, "acquisition", "du", default_du);
    acq.I0 = rd.number(j, "acquisition", "I0", 1.0);
    rd.require(acq.du > 0.0, "acquisition.du", "must be > 0");
    rd.require(acq.I0 > 0.0, "acquisition.I0", "must be > 0");
    if (const json* dep = rd.find(j, "acquisition", "deposit")) {
        if (*dep == "nearest") acq.deposit = DepositMode::Nearest;
        else if (*dep == "gaussian") acq.deposit = DepositMode::Gaussian;
        else rd.fail("acquisition.deposit", "must be \"nearest\" or \"gaussian\"");
    }

    c.b = rd.number(j, "filter", "b", std::numbers::pi / (acq.du > 0.0 ? acq.du : 1.0));
    rd.require(c.b > 0.0, "filter.b", "must be > 0");

    if (j.contains("scatter")) {
        const json& s = j.at("scatter");
        const std::string type = s.is_object() && s.contains("type") && s.at("type").is_string()
                                     ? s.at("type").get<std::string>()
                                     : "";
        if (type == "isotropic") {
            const double w0 = rd.number(j, "scatter", "w0", 0.0);
            rd.require(w0 >= 0.0, "scatter.w0", "must be >= 0");
            c.scatter = AngularKernel::isotropic(w0);
        } else if (type == "poly") {
            std::vector<double> coeffs;
            if (!s.contains("coeffs") || !s.at("coeffs").is_array()) {
                rd.fail("scatter.coeffs", "must be a numeric array");
            } else {
                for (const auto& v : s.at("coeffs")) {
                    if (!v.is_number()) rd.fail("scatter.coeffs", "must be a numeric array");
                    else coeffs.push_back(v.get<double>());
                }
            }
            c.scatter = AngularKernel::poly(coeffs);
            try {
                c.scatter->validate();
            } catch (const InvalidArgument&) {
                rd.fail("scatter.coeffs", "must give a kernel >= 0 on [-1, 1]");
            }
        } else {
            rd.fail("scatter.type", "must be \"isotropic\" or \"poly\"");
        }
    }

    c.mc_samples = rd.count(j, "mc", "samples", 1000);
    rd.require(c.mc_samples >= 2, "mc.samples", "must be >= 2");
    if (const json* seed = rd.find(j, "mc", "seed")) {
        if (seed->is_number_unsigned()) c.mc_seed = seed->get<std::uint64_t>();
        else rd.fail("mc.seed", "must be a nonnegative integer");
    }

    c.recon_nx = rd.count(j, "recon", "nx", 128);
    rd.require(c.recon_nx >= 2, "recon.nx", "must be >= 2");
    if (const json* ms = rd.find(j, "recon", "mu_star")) {
        if (!ms->is_number()) rd.fail("recon.mu_star", "must be a number");
        else c.mu_star = ms->get<double>();
        rd.require(!c.mu_star || *c.mu_star >= 0.0, "recon.mu_star", "must be >= 0");
    }
    c.step = rd.number(j, "recon", "step", 0.0);
    rd.require(c.step >= 0.0, "recon.step", "must be >= 0");

    if (const json* dir = rd.find(j, "output", "dir")) {
        if (dir->is_string()) c.output_dir = dir->get<std::string>();
        else rd.fail("output.dir", "must be a string");
    }

    if (!rd.bad.empty()) {
        std::string msg = "invalid config:";
        for (const auto& w : rd.why) msg += "\n  " + w;
        throw ConfigError(rd.bad, msg);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

std::string config_hash(const json& j) {
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Phantom build_phantom(const ExperimentConfig& cfg) {
    Phantom p;
    p.domain = cfg.domain();
    p.sources = cfg.point_sources;
    const Grid2D lattice = Grid2D::centered(cfg.grid_n, 1.1 * cfg.domain_radius);
    p.emission = cfg.emission_file ? load_grid(*cfg.emission_file) : lattice;
    p.attenuation_mean = cfg.attenuation_file ? load_grid(*cfg.attenuation_file) : lattice;

    constexpr int kSuper = 4;
    auto rasterize = [&](Grid2D& g, double DiskSpec::*field) {
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i) {
                const Point c = g.position(i, j);
                double acc = 0.0;
                for (int a = 0; a < kSuper; ++a)
                    for (int b = 0; b < kSuper; ++b) {
                        const Point q{c.x + ((a + 0.5) / kSuper - 0.5) * g.dx,
                                      c.y + ((b + 0.5) / kSuper - 0.5) * g.dy};
                        for (const auto& d : cfg.disks)
                            if (norm(q - d.center) < d.radius) acc += d.*field;
                    }
                g.at(i, j) += acc / (kSuper * kSuper);
            }
    };
    if (!cfg.emission_file) rasterize(p.emission, &DiskSpec::emission);
    if (!cfg.attenuation_file) rasterize(p.attenuation_mean, &DiskSpec::attenuation);
    p.validate();
    return p;
}

double quadrature_step(const ExperimentConfig& cfg, const Phantom& phantom) {
    if (cfg.step > 0.0) return cfg.step;
    return std::min(default_step(phantom.emission), default_step(phantom.attenuation_mean));
}

}  // namespace tomo
