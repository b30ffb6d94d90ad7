#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "qmetro/bayes_mc.hpp"
#include "qmetro/bounds.hpp"
#include "qmetro/estimation.hpp"
#include "qmetro/networks.hpp"
#include "qmetro/quadrature.hpp"

#ifndef QMETRO_VERSION
#define QMETRO_VERSION "0.0.0"
#endif

namespace qm::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string probe = "noon";
    double nbar = 2.0;
    double gamma = 1.0;
    int d = 2;
    double alpha = 1.0;
    int big_n = 4;
    std::string pom = "optimal";
    std::string mean;
    std::string width;
    std::string weights;
    std::string V;
    Index grid_points = 0;
    Index outer_steps = 0;
    Index mc_samples = 0;
    std::uint64_t seed = 0;
    int mu_max = 0;
    std::string mu_eval;
    int threads = 0;
    std::string out;
    std::string config;
    bool taylor = false;
    double eta = 0.9;
    std::string theta;
    std::string geometry;
    std::string dims = "2";
    int n_max = 20;
};

struct Setup {
    ProbeState probe;
    Generator gen;
    bool interferometer = false;  // two-mode optical probe with the J_z encoding
};

Setup make_setup(const Options& o) {
    Setup s;
    if (o.probe == "qubit_gamma") {
        s.probe = make_qubit_network(o.gamma, o.d);
        s.gen = qubit_network_generators(o.d);
    } else if (o.probe == "imaging_global") {
        if (o.nbar != std::floor(o.nbar)) throw ConfigError("imaging_global needs an integer nbar");
        s.probe = make_imaging_global(o.d, int(o.nbar), o.alpha);
        std::vector<int> modes;
        for (int j = 1; j <= o.d; ++j) modes.push_back(j);
        s.gen = number_generators(s.probe.space, modes);
    } else if (o.probe == "imaging_local") {
        s.probe = make_imaging_local(o.d, o.nbar, o.big_n);
        std::vector<int> modes;
        for (int j = 1; j <= o.d; ++j) modes.push_back(j);
        s.gen = number_generators(s.probe.space, modes);
    } else {
        ProbeKind kind;
        try {
            kind = parse_probe_kind(o.probe);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        s.probe = make_probe(kind, o.nbar);
        s.gen = interferometer_generator(s.probe.space);
        s.interferometer = true;
    }
    return s;
}

std::vector<double> broadcast(const std::string& text, const std::string& fallback, Index n, const char* what) {
    std::vector<double> v = parse_real_list(text.empty() ? fallback : text);
    if (v.size() == 1) v.assign(size_t(n), v.front());
    if (Index(v.size()) != n) throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " values");
    return v;
}

FlatPrior make_prior(const Options& o, Index dims, Index grid, const std::string& mean0 = "0",
                     const std::string& width0 = "pi/2") {
    const auto m = broadcast(o.mean, mean0, dims, "mean");
    const auto w = broadcast(o.width, width0, dims, "width");
    for (double x : w)
        if (!(x > 0.0)) throw ConfigError("width must be positive");
    if (dims == 1) return FlatPrior(m[0], w[0], grid);
    return FlatPrior(Eigen::Map<const RVector>(m.data(), dims), Eigen::Map<const RVector>(w.data(), dims), grid);
}

RVector function_weights(const Options& o, Index l) {
    if (o.weights.empty()) return RVector::Constant(l, 1.0 / double(l));
    const auto w = parse_real_list(o.weights);
    if (Index(w.size()) != l) throw ConfigError("weights: expected " + std::to_string(l) + " values");
    RVector out = Eigen::Map<const RVector>(w.data(), l);
    if ((out.array() < 0.0).any() || std::abs(out.sum() - 1.0) > 1e-9)
        throw ConfigError("weights must be nonnegative and sum to 1");
    return out;
}

// Columns of V listed one after the other; identity by default.
RMatrix function_matrix(const Options& o, Index d) {
    if (o.V.empty()) return RMatrix::Identity(d, d);
    const auto v = parse_real_list(o.V);
    if (v.size() % size_t(d) != 0) throw ConfigError("V: length must be a multiple of the parameter count");
    return Eigen::Map<const RMatrix>(v.data(), d, Index(v.size()) / d);
}

PriorMoments moments_for(const Setup& s, const FlatPrior& prior) {
    if (s.interferometer && prior.dims() == 1) return prior_moments_interferometer(s.probe, prior);
    return prior_moments_generic(s.probe, s.gen, prior);
}

Pom make_pom(const Options& o, const Setup& s, const FlatPrior& prior) {
    if (o.pom == "optimal") return optimal_pom(solve_estimator(moments_for(s, prior)), s.probe.space, prior);
    PomName name;
    try {
        name = parse_pom_name(o.pom);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return catalog_pom(name, s.probe.space);
}

McConfig mc_config(const Options& o, bool two_d) {
    McConfig c = two_d ? McConfig::defaults_2d() : McConfig();
    if (o.grid_points > 0) c.grid_points = o.grid_points;
    if (o.outer_steps > 0) c.outer_steps = o.outer_steps;
    if (o.mc_samples > 0) c.mc_samples = o.mc_samples;
    if (o.mu_max > 0) c.mu_max = o.mu_max;
    if (!o.mu_eval.empty()) c.mu_eval = parse_int_list(o.mu_eval);
    c.seed = o.seed;
    c.threads = o.threads;
    try {
        c.validate(two_d ? 2 : 1);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

CsvTable curve_table(const MseCurve& c, const std::optional<RVector>& crb = std::nullopt) {
    std::vector<std::string> header = {"mu", "error", "stderr"};
    if (crb) header.push_back("crb");
    CsvTable t(header);
    t.set_integer_columns({true});
    for (size_t i = 0; i < c.mu.size(); ++i) {
        std::vector<double> row = {double(c.mu[i]), c.errors(Index(i)), c.sigma(Index(i))};
        if (crb) row.push_back((*crb)(Index(i)));
        t.add_row(row);
    }
    return t;
}

CsvTable value_curve(const RVector& v) {
    CsvTable t({"mu", "value"});
    t.set_integer_columns({true});
    for (Index i = 0; i < v.size(); ++i) t.add_row({double(i + 1), v(i)});
    return t;
}

void record_mc(json& m, const MseCurve& c) {
    m["mc_stderr_max"] = c.sigma.size() ? c.sigma.maxCoeff() : 0.0;
    m["mc_underflows"] = c.underflows;
}

double fisher_of(const Setup& s) {
    return s.probe.is_pure() ? qfi(s.probe, s.gen) : qfi_mixed(s.probe, s.gen);
}

RVector crb_at(const std::vector<int>& mu, double fq) {
    RVector out(Index(mu.size()));
    for (size_t i = 0; i < mu.size(); ++i) out(Index(i)) = 1.0 / (mu[i] * fq);
    return out;
}

struct Command {
    CLI::App* app;
    std::function<CsvTable(json&)> body;
    bool stochastic = false;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian quantum metrology toolkit"};
    app.require_subcommand(1);
    Options o;

    auto probe_opts = [&](CLI::App* s) {
        s->add_option("--probe", o.probe, "coherent, noon, tsv, ses, tsc_optimal, tsc_intermediate, qubit_gamma, "
                                          "imaging_global, imaging_local");
        s->add_option("--nbar", o.nbar, "mean number of quanta");
        s->add_option("--gamma", o.gamma, "qubit network parameter");
        s->add_option("--d", o.d, "sensors of a network probe");
        s->add_option("--alpha", o.alpha, "reference amplitude of the global imaging probe");
        s->add_option("--big-n", o.big_n, "photons per mode of the local imaging probe");
    };
    auto prior_opts = [&](CLI::App* s) {
        s->add_option("--mean", o.mean, "prior means (comma list, pi allowed)");
        s->add_option("--width", o.width, "prior widths");
    };
    auto mc_opts = [&](CLI::App* s) {
        s->add_option("--pom", o.pom, "catalog POM or 'optimal'");
        s->add_option("--grid-points", o.grid_points);
        s->add_option("--outer-steps", o.outer_steps);
        s->add_option("--mc-samples", o.mc_samples);
        s->add_option("--seed", o.seed);
        s->add_option("--mu-max", o.mu_max);
        s->add_option("--mu-eval", o.mu_eval, "trial counts to report (comma list)");
        s->add_option("--threads", o.threads, "worker threads, 0 for the hardware count");
    };
    auto common = [&](CLI::App* s) {
        s->add_option("--out", o.out, "CSV path; a manifest is written next to it");
        s->add_option("--config", o.config, "flat key = value file, overridden by flags");
    };

    std::vector<Command> commands;
    auto add = [&](const std::string& name, const std::string& help, bool stochastic) {
        CLI::App* s = app.add_subcommand(name, help);
        common(s);
        commands.push_back({s, nullptr, stochastic});
        return s;
    };

    {
        CLI::App* s = add("mse", "Monte-Carlo mean square error of one parameter", true);
        probe_opts(s), prior_opts(s), mc_opts(s);
        s->add_flag("--taylor", o.taylor, "report the Taylor error estimate instead");
        commands.back().body = [&](json& m) {
            const Setup st = make_setup(o);
            const FlatPrior prior = make_prior(o, 1, 1000);
            const Pom pom = make_pom(o, st, prior);
            const McConfig c = mc_config(o, false);
            const MseCurve curve = o.taylor ? taylor_error_curve(st.probe, st.gen, pom, prior, c)
                                            : mse_curve_1d(st.probe, st.gen, pom, prior, c);
            record_mc(m, curve);
            return curve_table(curve);
        };
    }
    {
        CLI::App* s = add("mse2d", "Monte-Carlo error of two parameters with weighted linear functions", true);
        probe_opts(s), prior_opts(s), mc_opts(s);
        s->add_option("--V", o.V, "function coefficients, columns listed in turn");
        s->add_option("--weights", o.weights, "function weights");
        commands.back().body = [&](json& m) {
            if (o.probe != "qubit_gamma" && o.probe != "imaging_global" && o.probe != "imaging_local")
                throw ConfigError("mse2d needs a two-parameter probe");
            const Setup st = make_setup(o);
            const FlatPrior prior = make_prior(o, st.gen.size(), 100);
            const McConfig c = mc_config(o, true);
            FunctionWeights fw;
            fw.V = function_matrix(o, st.gen.size());
            fw.wf = function_weights(o, fw.V.cols());
            const Pom pom = make_pom(o, st, prior);
            const MseCurve curve = mse_curve_2d(st.probe, st.gen, pom, prior, fw, c);
            record_mc(m, curve);
            return curve_table(curve);
        };
    }
    {
        CLI::App* s = add("single-shot", "Optimal single-shot bound", false);
        probe_opts(s), prior_opts(s);
        s->add_option("--weights", o.weights, "parameter weights");
        commands.back().body = [&](json& m) {
            const Setup st = make_setup(o);
            const FlatPrior prior = make_prior(o, st.gen.size(), 200);
            const QuantumEstimator est = solve_estimator(moments_for(st, prior));
            const RVector w = function_weights(o, st.gen.size());
            double prior_error = 0.0;
            for (Index k = 0; k < prior.dims(); ++k) prior_error += w(k) * prior.variance(k);
            const double bound = single_shot_bound(est, prior, w);
            m["sylvester_residual"] = est.sylvester_residual;
            CsvTable t({"bound", "prior_error", "commutator", "residual"});
            t.add_row({bound, prior_error, commutation_check(est), est.sylvester_residual});
            return t;
        };
    }
    {
        CLI::App* s = add("prior-scan", "Posterior snapshots for a fixed true value", true);
        probe_opts(s), prior_opts(s);
        s->add_option("--pom", o.pom, "catalog POM or 'optimal'");
        s->add_option("--theta", o.theta, "true parameter values")->required();
        s->add_option("--mu-eval", o.mu_eval, "trial counts to snapshot")->required();
        s->add_option("--grid-points", o.grid_points, "posterior grid per axis");
        s->add_option("--seed", o.seed);
        commands.back().body = [&](json& m) {
            const Setup st = make_setup(o);
            const Index dims = st.gen.size();
            const FlatPrior prior = make_prior(o, dims, o.grid_points > 0 ? o.grid_points : (dims == 1 ? 1000 : 100));
            const Pom pom = make_pom(o, st, prior);
            const auto th = broadcast(o.theta, "0", dims, "theta");
            const PriorScan scan = prior_scan(st.probe, st.gen, pom, prior, Eigen::Map<const RVector>(th.data(), dims),
                                              parse_int_list(o.mu_eval), o.seed);
            m["maxima"] = scan.maxima;
            std::vector<std::string> header = {"mu", "theta1"};
            if (dims == 2) header.push_back("theta2");
            header.push_back("density");
            CsvTable t(header);
            t.set_integer_columns({true});
            for (size_t i = 0; i < scan.mu.size(); ++i) {
                const RVector& p = scan.posteriors[i];
                if (dims == 1) {
                    for (Index j = 0; j < p.size(); ++j) t.add_row({double(scan.mu[i]), scan.axes[0](j), p(j)});
                } else {
                    const Index n2 = scan.axes[1].size();
                    for (Index j = 0; j < p.size(); ++j)
                        t.add_row({double(scan.mu[i]), scan.axes[0](j / n2), scan.axes[1](j % n2), p(j)});
                }
            }
            return t;
        };
    }
    {
        CLI::App* s = add("qcrb", "Quantum Cramer-Rao bound curve", false);
        probe_opts(s);
        s->add_option("--mu-max", o.mu_max);
        s->add_option("--V", o.V, "function coefficients, columns listed in turn");
        s->add_option("--weights", o.weights, "function weights");
        commands.back().body = [&](json& m) {
            const Setup st = make_setup(o);
            const int mu_max = o.mu_max > 0 ? o.mu_max : 100;
            if (st.gen.size() == 1) {
                const double fq = fisher_of(st);
                m["fq"] = fq;
                return value_curve(qcrb_curve(fq, mu_max));
            }
            const RMatrix V = function_matrix(o, st.gen.size());
            const RMatrix W = V * function_weights(o, V.cols()).asDiagonal() * V.transpose();
            return value_curve(qcrb_curve(qfim(st.probe, st.gen), W, mu_max));
        };
    }
    for (const std::string which : {"zzb", "wwb"}) {
        CLI::App* s = add(which, which == "zzb" ? "Quantum Ziv-Zakai bound" : "Quantum Weiss-Weinstein bound", false);
        probe_opts(s);
        s->add_option("--width", o.width, "prior width");
        s->add_option("--mu-max", o.mu_max);
        commands.back().body = [&, which](json&) {
            const Setup st = make_setup(o);
            const double w = parse_real(o.width.empty() ? "pi/2" : o.width);
            const FidelityProfile f = fidelity_profile(st.probe, st.gen, w);
            const int mu_max = o.mu_max > 0 ? o.mu_max : 100;
            return value_curve(which == "zzb" ? qzzb(f, w, mu_max) : qwwb(f, w, mu_max));
        };
    }
    {
        CLI::App* s = add("mu-tau", "Saturation threshold of the Cramer-Rao bound", true);
        probe_opts(s), prior_opts(s), mc_opts(s);
        commands.back().body = [&](json& m) {
            const Setup st = make_setup(o);
            const FlatPrior prior = make_prior(o, 1, 1000);
            const Pom pom = make_pom(o, st, prior);
            const McConfig c = mc_config(o, false);
            const MseCurve curve = mse_curve_1d(st.probe, st.gen, pom, prior, c);
            const double fq = fisher_of(st);
            const RVector crb = crb_at(curve.mu, fq);
            const auto tau = saturation_mu(curve.mu, curve.errors, crb);
            m["fq"] = fq;
            if (tau) m["mu_tau"] = *tau;
            else m["mu_tau"] = "not reached";
            record_mc(m, curve);
            return curve_table(curve, crb);
        };
    }
    {
        CLI::App* s = add("network-asym", "Optimal correlations of sensor-symmetric networks", false);
        s->add_option("--d", o.dims, "sensor counts (comma list)");
        s->add_option("--geometry", o.geometry, "geometry parameters (comma list); default sweep");
        commands.back().body = [&](json&) {
            CsvTable t({"d", "G", "J_opt", "h_opt"});
            t.set_integer_columns({true});
            for (int d : parse_int_list(o.dims)) {
                if (d < 2) throw ConfigError("d must be at least 2");
                std::vector<double> gs;
                if (o.geometry.empty()) {
                    for (int i = 1; i < 40; ++i) gs.push_back(-1.0 + double(d) * i / 40.0);
                } else {
                    gs = parse_real_list(o.geometry);
                }
                for (double g : gs) {
                    const double j = j_opt(g, d);
                    t.add_row({double(d), g, j, h_factor(j, g, d)});
                }
            }
            return t;
        };
    }
    {
        CLI::App* s = add("imaging-scaling", "Local and global phase-imaging bounds", false);
        s->add_option("--d", o.dims, "sensor counts (comma list)");
        s->add_option("--nbar", o.nbar, "mean number of photons");
        s->add_option("--n-max", o.n_max, "largest photon number per mode");
        commands.back().body = [&](json&) {
            CsvTable t({"d", "N", "f", "local_bound", "global_bound"});
            t.set_integer_columns({true, true});
            for (int d : parse_int_list(o.dims)) {
                if (d < 1) throw ConfigError("d must be positive");
                const double global = imaging_global_bound(o.nbar, d);
                for (int n = 1; n <= o.n_max; ++n)
                    t.add_row({double(d), double(n), imaging_local_f(n, o.nbar, d), imaging_local_bound(n, o.nbar, d),
                               global});
            }
            return t;
        };
    }
    {
        CLI::App* s = add("loss-demo", "Shot-by-shot error of the lossy two-photon interferometer", true);
        prior_opts(s), mc_opts(s);
        s->add_option("--eta", o.eta, "transmissivity of the lossy arm");
        commands.back().body = [&](json& m) {
            const auto c = lossy_optimal_amplitudes(o.eta);
            Setup st;
            st.probe = lossy_encode(make_two_photon_state({c[0], c[1], c[2]}), o.eta, 0.0);
            st.gen = number_generators(st.probe.space, {0});
            const FlatPrior prior = make_prior(o, 1, 1000, "pi/4", "pi/2");
            const Pom pom = make_pom(o, st, prior);
            const McConfig cfg = mc_config(o, false);
            const MseCurve curve = mse_curve_1d(st.probe, st.gen, pom, prior, cfg);
            const double fq = fisher_of(st);
            m["amplitudes"] = c;
            m["fq"] = fq;
            const RVector grid = linspace(prior.lower(0), prior.upper(0), 41);
            const auto f = classical_fisher(st.probe, st.gen, pom, RMatrix(grid.transpose()));
            double lo = f.front()(0, 0), hi = lo;
            for (const auto& x : f) lo = std::min(lo, x(0, 0)), hi = std::max(hi, x(0, 0));
            m["fisher_min"] = lo;
            m["fisher_max"] = hi;
            record_mc(m, curve);
            return curve_table(curve, crb_at(curve.mu, fq));
        };
    }
    {
        CLI::App* s = add("time-demo", "Elapsed-time estimation with a two-level system", true);
        prior_opts(s), mc_opts(s);
        commands.back().body = [&](json& m) {
            // hbar = E = 1, K = sigma_z, rho_0 = (I + sigma_x)/2
            Setup st;
            st.probe.space = ModeSpace(2, 1);
            st.probe.psi = CVector::Constant(2, 1.0 / std::sqrt(2.0));
            st.probe.kind = "qubit_time";
            RVector z(2);
            z << 1.0, -1.0;
            st.gen = Generator::from_diagonals({z});
            const FlatPrior prior = make_prior(o, 1, 1000, "pi/2", "pi/2");
            const QuantumEstimator est = solve_estimator(moments_for(st, prior));
            const CMatrix S = est.full_S(0);
            const CMatrix closed = 0.5 * kPi * (identity(2) - 2.0 / (kPi * kPi) * pauli(Axis::y));
            m["estimator"] = {{S(0, 0).real(), S(0, 1).real(), S(0, 1).imag()},
                              {S(1, 0).real(), S(1, 0).imag(), S(1, 1).real()}};
            m["estimator_closed_form_deviation"] = max_abs(S - closed);
            const Pom pom = make_pom(o, st, prior);
            const MseCurve curve = mse_curve_1d(st.probe, st.gen, pom, prior, mc_config(o, false));
            record_mc(m, curve);
            return curve_table(curve, crb_at(curve.mu, qfi(st.probe, st.gen)));
        };
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    for (auto& cmd : commands) {
        if (!cmd.app->parsed()) continue;
        try {
            if (!o.config.empty()) apply_key_values(*cmd.app, read_key_values_file(o.config));
            if (cmd.stochastic) {
                auto* seed = cmd.app->get_option_no_throw("--seed");
                if (seed && seed->count() == 0) throw ConfigError("--seed is required for Monte-Carlo runs");
            }
            json manifest;
            manifest["subcommand"] = cmd.app->get_name();
            manifest["version"] = QMETRO_VERSION;
            json cfg = json::object();
            for (const CLI::Option* opt : cmd.app->get_options()) {
                if (opt->get_lnames().empty() || opt->count() == 0) continue;
                cfg[opt->get_lnames().front()] = opt->as<std::string>();
            }
            manifest["config"] = cfg;
            const CsvTable table = cmd.body(manifest);
            manifest["wall_time_s"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (o.out.empty()) {
                table.write(out);
            } else {
                std::ofstream f(o.out);
                if (!f) throw ConfigError("cannot write " + o.out);
                table.write(f);
                std::ofstream mf(o.out + ".manifest.json");
                mf << manifest.dump(2) << '\n';
            }
            if (manifest.contains("mu_tau")) err << "mu_tau: " << manifest["mu_tau"].dump() << '\n';
            return 0;
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << '\n';
            return 2;
        } catch (const NumericalError& e) {
            err << "numerical failure [" << e.invariant() << "]: " << e.what() << '\n';
            return 3;
        } catch (const std::invalid_argument& e) {
            err << "config error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}

}  // namespace qm::cli
