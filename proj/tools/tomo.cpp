// tomo: command line front end for the stochastic-attenuation tomography library.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tomo/config.hpp"
#include "tomo/error.hpp"
#include "tomo/experiments.hpp"
#include "tomo/grid_io.hpp"
#include "tomo/kernels.hpp"
#include "tomo/parallel.hpp"
#include "tomo/pointsrc.hpp"
#include "tomo/recon.hpp"

namespace {

using nlohmann::json;
using namespace tomo;

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument(std::string("bad number '") + item + "' in " + what);
        }
    }
    if (out.empty()) throw InvalidArgument(std::string(what) + " is empty");
    return out;
}

struct Setup {
    ExperimentConfig cfg;
    Phantom phantom;
    double step;
};

Setup setup(const std::string& config_path) {
    Setup s{load_config(config_path), {}, 0.0};
    s.phantom = build_phantom(s.cfg);
    s.step = quadrature_step(s.cfg, s.phantom);
    return s;
}

int cmd_project(const std::string& config, const std::string& modality, const std::string& out,
                bool stochastic, std::uint64_t seed) {
    const Setup s = setup(config);
    const Modality m = parse_modality(modality);
    const Sinogram sino = stochastic ? project_sinogram(s.phantom, m, s.cfg.acquisition, s.step, &s.cfg.noise, seed)
                                     : project_sinogram(s.phantom, m, s.cfg.acquisition, s.step);
    write_sinogram_csv(sino, out);
    return 0;
}

int cmd_average(const std::string& config, const std::string& modality, const std::string& out) {
    const Setup s = setup(config);
    write_sinogram_csv(average_sinogram(s.phantom, s.cfg.noise, parse_modality(modality), s.cfg.acquisition, s.step),
                       out);
    return 0;
}

// Monte Carlo mean against the closed-form average on a coarse subset of the
// acquisition lattice: 8 views x 5 offsets.
int cmd_mc_validate(const std::string& config, const std::string& modality, std::size_t samples,
                    std::uint64_t seed, double z_max, const std::string& out) {
    const Setup s = setup(config);
    const Modality m = parse_modality(modality);
    const Acquisition& acq = s.cfg.acquisition;
    const auto phis = acq.angles();
    const auto us = acq.offsets();
    const Deposit dep{acq.du, acq.deposit};
    json rays = json::array();
    bool ok = true;
    std::uint64_t idx = 0;
    for (std::size_t v = 0; v < 8; ++v)
        for (std::size_t k = 0; k < 5; ++k, ++idx) {
            const Ray ray{phis[v * phis.size() / 8], us[(2 * k + 1) * us.size() / 10]};
            const McEstimate mc =
                mc_average_projection(s.phantom, s.cfg.noise, ray, m, samples, s.step, stream_seed(seed, idx), dep,
                                      acq.I0);
            double closed = 0.0;
            if (m == Modality::Spect) closed = averaged_spect_projection(s.phantom, s.cfg.noise, ray, s.step, dep);
            else if (m == Modality::Pet) closed = averaged_pet_projection(s.phantom, s.cfg.noise, ray, s.step, dep);
            else {
                const ChordSamples c = sample_chord(s.phantom, ray, s.step);
                closed = averaged_xray_projection(acq.I0, c.intervals() ? trapezoid(c.mu, c.h) : 0.0, s.cfg.noise,
                                                  c.length());
            }
            const double diff = std::abs(mc.mean - closed);
            const double z = mc.stderr_ > 0.0 ? diff / mc.stderr_ : (diff <= 1e-12 * std::abs(closed) ? 0.0 : INFINITY);
            const bool pass = z <= z_max;
            ok = ok && pass;
            rays.push_back({{"phi", ray.phi}, {"u", ray.u}, {"mc_mean", mc.mean}, {"mc_stderr", mc.stderr_},
                            {"closed_form", closed}, {"z", z}, {"passed", pass}});
        }
    const json report = {{"command", "mc-validate"}, {"modality", modality}, {"config_hash", config_hash(s.cfg.raw)},
                         {"seed", seed}, {"samples", samples}, {"z_max", z_max}, {"rays", rays}, {"passed", ok}};
    std::ofstream(out) << report.dump(2) << '\n';
    std::printf("mc-validate: %s (%zu rays)\n", ok ? "PASS" : "FAIL", rays.size());
    return ok ? 0 : 1;
}

int cmd_correct(const std::string& in, const std::string& out, const std::string& config, double i0, double h,
                double alpha, double radius) {
    ColoredNoise noise{h, alpha};
    Domain domain{{0.0, 0.0}, radius};
    if (!config.empty()) {
        const ExperimentConfig cfg = load_config(config);
        noise = cfg.noise;
        domain = cfg.domain();
        i0 = cfg.acquisition.I0;
    }
    Sinogram sino = read_sinogram_csv(in, Modality::Xray);
    sino.I0 = i0;
    write_sinogram_csv(correct_sinogram(sino, noise, domain), out);
    return 0;
}

int cmd_reconstruct(const std::string& in, double mu_star, double b, std::size_t nx, double radius,
                    const std::string& out, const std::string& pgm) {
    const Sinogram sino = read_sinogram_csv(in);
    const Domain domain{{0.0, 0.0}, radius};
    const ReconImage img = exponential_fbp(sino, mu_star, domain, Grid2D::centered(nx, radius), FilterSpec{b});
    save_grid(img.grid, out);
    if (!pgm.empty()) save_pgm(img.grid, pgm);
    return 0;
}

int cmd_kn_table(int m_max, const std::string& mu, const std::string& r, const std::string& b,
                 const std::string& out) {
    write_kn_csv(kn_table(m_max, parse_list(mu, "--mu"), parse_list(r, "--r"), parse_list(b, "--b")), out);
    return 0;
}

int cmd_predict_point(const std::string& config, const std::string& y0, double b, const std::string& out) {
    const ExperimentConfig cfg = load_config(config);
    const auto y = parse_list(y0, "--y0");
    if (y.size() != 2) throw InvalidArgument("--y0 needs two numbers X,Y");
    write_point_prediction(cfg, {y[0], y[1]}, b > 0.0 ? b : cfg.b, out);
    return 0;
}

int cmd_run(const std::string& name, const std::string& config, const std::string& out) {
    const json user = config.empty() ? json() : read_json(config);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path("out") / name : std::filesystem::path(out);
    const Report r = run_experiment(name, user, dir);
    for (const auto& c : r.checks)
        std::printf("%-4s %-16s measured=%-12.6g tol=%-10.4g %s\n", c.passed ? "ok" : "FAIL", c.id.c_str(),
                    c.measured, c.tolerance, c.description.c_str());
    std::printf("%s: %s in %.2f s -> %s\n", name.c_str(), r.passed() ? "PASS" : "FAIL", r.runtime_s,
                (dir / "report.json").string().c_str());
    return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tomography under stochastic attenuation"};
    app.require_subcommand(1);

    std::string config, out, modality = "spect", in;
    std::uint64_t seed = 1;

    auto* project = app.add_subcommand("project", "forward-project a phantom to a sinogram CSV");
    bool stochastic = false;
    project->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    project->add_option("--modality", modality, "spect, pet or xray");
    project->add_option("--out", out, "output sinogram CSV")->required();
    project->add_flag("--stochastic", stochastic, "one noisy realization instead of the mean attenuation");
    project->add_option("--seed", seed, "seed for --stochastic");

    auto* average = app.add_subcommand("average", "closed-form noise-averaged sinogram");
    average->add_option("--config", config)->required()->check(CLI::ExistingFile);
    average->add_option("--modality", modality, "spect, pet or xray");
    average->add_option("--out", out)->required();

    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo averages vs the closed form on sample rays");
    std::size_t samples = 10000;
    double z_max = 4.0;
    mc->add_option("--config", config)->required()->check(CLI::ExistingFile);
    mc->add_option("--modality", modality, "spect, pet or xray");
    mc->add_option("--samples", samples)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    mc->add_option("--seed", seed);
    mc->add_option("--z-max", z_max, "largest accepted |mean - closed form| / stderr");
    mc->add_option("--out", out, "report JSON")->required();

    auto* correct = app.add_subcommand("correct", "undo the noise average of an X-ray sinogram");
    double i0 = 1.0, h = 0.0, alpha = 1.0, radius = 1.0;
    correct->add_option("--in", in)->required()->check(CLI::ExistingFile);
    correct->add_option("--out", out)->required();
    correct->add_option("--config", config, "take I0, noise and domain from a config")->check(CLI::ExistingFile);
    correct->add_option("--i0", i0);
    correct->add_option("--noise-h", h, "noise amplitude h");
    correct->add_option("--noise-alpha", alpha, "noise inverse correlation length");
    correct->add_option("--radius", radius, "domain radius");

    auto* recon = app.add_subcommand("reconstruct", "exponential filtered back projection");
    double mu_star = 0.0, b = 0.0;
    std::size_t nx = 128;
    std::string pgm;
    recon->add_option("--in", in)->required()->check(CLI::ExistingFile);
    recon->add_option("--mu-star", mu_star);
    recon->add_option("--b", b, "filter cutoff")->required();
    recon->add_option("--nx", nx);
    recon->add_option("--radius", radius, "domain radius; the image covers [-radius, radius]^2");
    recon->add_option("--out", out, "float32 image; a JSON sidecar is written next to it")->required();
    recon->add_option("--pgm", pgm, "8-bit quick-look image");

    auto* kn = app.add_subcommand("kn-table", "K_n quadrature vs closed form");
    int m_max = 3;
    std::string mus = "0,0.15,0.3", rs = "0.5,1,2", bs = "100,200,400";
    kn->add_option("--m-max", m_max)->check(CLI::Range(1, 16));
    kn->add_option("--mu", mus);
    kn->add_option("--r", rs);
    kn->add_option("--b", bs);
    kn->add_option("--out", out)->required();

    auto* predict = app.add_subcommand("predict-point", "truncated point-source prediction along two lines");
    std::string y0;
    double pb = 0.0;
    predict->add_option("--config", config)->required()->check(CLI::ExistingFile);
    predict->add_option("--y0", y0, "X,Y")->required();
    predict->add_option("--b", pb, "filter cutoff (default: config filter.b)");
    predict->add_option("--out", out)->required();

    auto* run = app.add_subcommand("run", "run a named experiment and write its report");
    std::string name;
    run->add_option("name", name, "experiment name")->required();
    run->add_option("--config", config, "JSON merged over the built-in defaults")->check(CLI::ExistingFile);
    run->add_option("--out", out, "output directory (default out/<name>)");

    auto* list = app.add_subcommand("list", "print experiment names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*project) return cmd_project(config, modality, out, stochastic, seed);
        if (*average) return cmd_average(config, modality, out);
        if (*mc) return cmd_mc_validate(config, modality, samples, seed, z_max, out);
        if (*correct) return cmd_correct(in, out, config, i0, h, alpha, radius);
        if (*recon) return cmd_reconstruct(in, mu_star, b, nx, radius, out, pgm);
        if (*kn) return cmd_kn_table(m_max, mus, rs, bs, out);
        if (*predict) return cmd_predict_point(config, y0, pb, out);
        if (*run) return cmd_run(name, config, out);
        if (*list) {
            for (const auto& n : experiment_names()) std::printf("%s\n", n.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "tomo: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "tomo: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "tomo: unexpected error: %s\n", e.what());
        return 3;
    }
    return 0;
}
