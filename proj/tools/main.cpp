// Command-line front end: Touchstone conversion and passivity checks, plus
// the Monte-Carlo sweep/simulate/rate drivers over plain-text configs.
//
// Exit codes (stable contract, see README):
//   0 success
//   1 usage or config error
//   2 input parse or file i/o error
//   3 network-parameter conversion singularity
//   4 non-passive network
//   5 runtime numeric failure

#include <algorithm>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mpmimo/errors.hpp"
#include "mpmimo/experiments.hpp"
#include "mpmimo/netparams.hpp"

namespace {

using namespace mpmimo;

int fail(int code, const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return code;
}

int run_convert(const std::string& in, const std::string& to, double zref,
                const std::string& out) {
    NetworkParams p;
    try {
        p = parse_touchstone_file(in);
    } catch (const Error& e) {
        return fail(2, e.what());
    }
    try {
        NetworkParams conv = p;
        conv.z_ref = zref;
        conv.kind = (to == "s") ? ParamKind::Scattering : ParamKind::Impedance;
        for (CMat& m : conv.matrices) {
            if (conv.kind == ParamKind::Scattering && p.kind == ParamKind::Impedance) {
                m = z_to_s(m, zref);
            } else if (conv.kind == ParamKind::Impedance && p.kind == ParamKind::Scattering) {
                m = s_to_z(m, p.z_ref);
            } else if (conv.kind == ParamKind::Scattering && p.z_ref != zref) {
                m = z_to_s(s_to_z(m, p.z_ref), zref);  // renormalize reference
            }
        }
        write_touchstone_file(conv, out);
    } catch (const SingularConversion& e) {
        return fail(3, e.what());
    } catch (const Error& e) {
        return fail(2, e.what());
    }
    return 0;
}

int run_validate(const std::string& in) {
    NetworkParams p;
    try {
        p = parse_touchstone_file(in);
    } catch (const Error& e) {
        return fail(2, e.what());
    }
    try {
        if (p.kind == ParamKind::Impedance) {
            for (CMat& m : p.matrices) m = z_to_s(m, p.z_ref);
            p.kind = ParamKind::Scattering;
        }
        const PassivityReport rep = check_passivity(p);
        const double worst =
            rep.max_singular.empty()
                ? 0.0
                : *std::max_element(rep.max_singular.begin(), rep.max_singular.end());
        std::printf("max singular value %.12g at %.12g Hz\n", worst, rep.worst_frequency);
        std::printf("%s\n", rep.passive ? "passive" : "non-passive");
        return rep.passive ? 0 : 4;
    } catch (const SingularConversion& e) {
        return fail(3, e.what());
    } catch (const Error& e) {
        return fail(5, e.what());
    }
}

int load_config(const std::string& path, ExperimentConfig* cfg) {
    try {
        *cfg = parse_config_file(path);
        return 0;
    } catch (const ConfigError& e) {
        return fail(1, e.what());
    } catch (const Error& e) {
        return fail(2, e.what());
    }
}

int run_sweep_cmd(const std::string& cfg_path, const std::string& out, const std::string& format,
                  std::size_t threads) {
    ExperimentConfig cfg;
    if (const int rc = load_config(cfg_path, &cfg)) return rc;
    try {
        const SweepResult res = run_sweep(cfg, threads);
        emit(res, out, format);
        for (std::size_t i = 0; i < res.axis.size(); ++i)
            std::fprintf(stderr, "sweep %s: point %zu/%zu (%s = %.6g) done\n",
                         cfg.scenario.c_str(), i + 1, res.axis.size(), res.axis_name.c_str(),
                         res.axis[i]);
        return 0;
    } catch (const ConfigError& e) {
        return fail(1, e.what());
    } catch (const IoError& e) {
        return fail(2, e.what());
    } catch (const Error& e) {
        return fail(5, std::string("numeric failure during sweep: ") + e.what());
    }
}

int run_simulate(const std::string& cfg_path) {
    ExperimentConfig cfg;
    if (const int rc = load_config(cfg_path, &cfg)) return rc;
    try {
        cfg.scenario = "snr-vs-frequency";
        cfg.grid = {cfg.carrier};
        const SweepResult res = run_sweep(cfg, 1);
        std::printf("snr = %.12g\n", res.series[0][0]);
        return 0;
    } catch (const ConfigError& e) {
        return fail(1, e.what());
    } catch (const Error& e) {
        return fail(5, std::string("numeric failure during simulation: ") + e.what());
    }
}

int run_rate(const std::string& cfg_path, std::size_t threads) {
    ExperimentConfig cfg;
    if (const int rc = load_config(cfg_path, &cfg)) return rc;
    try {
        cfg.scenario = "rate-vs-power";
        cfg.grid = {cfg.power_dbm};
        const SweepResult res = run_sweep(cfg, threads);
        for (std::size_t m = 0; m < res.methods.size(); ++m)
            std::printf("%s = %.12g\n", res.methods[m].c_str(), res.series[m][0]);
        return 0;
    } catch (const ConfigError& e) {
        return fail(1, e.what());
    } catch (const Error& e) {
        return fail(5, std::string("numeric failure during rate evaluation: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled-array mimo channel toolkit"};
    app.require_subcommand(1);

    std::string conv_in, conv_to, conv_out;
    double conv_zref = 50.0;
    CLI::App* conv = app.add_subcommand("convert", "convert a Touchstone file between S and Z");
    conv->add_option("--in", conv_in, "input Touchstone file")->required();
    conv->add_option("--to", conv_to, "target parameter kind")
        ->required()
        ->check(CLI::IsMember({"s", "z"}));
    conv->add_option("--zref", conv_zref, "reference impedance in ohms")
        ->check(CLI::PositiveNumber);
    conv->add_option("--out", conv_out, "output path")->required();

    std::string val_in;
    CLI::App* val = app.add_subcommand("validate", "check passivity of a Touchstone file");
    val->add_option("--in", val_in, "input Touchstone file")->required();

    std::string sw_cfg, sw_out, sw_format = "csv";
    std::size_t sw_threads = 1;
    CLI::App* sw = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
    sw->add_option("--config", sw_cfg, "sweep config file")->required();
    sw->add_option("--out", sw_out, "result output path")->required();
    sw->add_option("--format", sw_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sw->add_option("--threads", sw_threads, "worker thread count")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}));

    std::string sim_cfg;
    CLI::App* sim = app.add_subcommand(
        "simulate", "estimate the empirical link SNR at the config's carrier");
    sim->add_option("--config", sim_cfg, "config file")->required();

    std::string rate_cfg;
    std::size_t rate_threads = 1;
    CLI::App* rt = app.add_subcommand(
        "rate", "mean achievable-rate lower bounds at the config's power");
    rt->add_option("--config", rate_cfg, "config file")->required();
    rt->add_option("--threads", rate_threads, "worker thread count")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (conv->parsed()) return run_convert(conv_in, conv_to, conv_zref, conv_out);
    if (val->parsed()) return run_validate(val_in);
    if (sw->parsed()) return run_sweep_cmd(sw_cfg, sw_out, sw_format, sw_threads);
    if (sim->parsed()) return run_simulate(sim_cfg);
    if (rt->parsed()) return run_rate(rate_cfg, rate_threads);
    return 1;
}
