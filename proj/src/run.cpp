#include "fracdecay/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracdecay/analysis.hpp"
#include "fracdecay/csv.hpp"
#include "fracdecay/errors.hpp"
#include "fracdecay/fundamental.hpp"
#include "fracdecay/profile.hpp"
#include "fracdecay/representation.hpp"

namespace fracdecay {

namespace {

using json = nlohmann::ordered_json;

constexpr double kOdeResidualLimit = 5e-3;
constexpr double kMassTolerance = 1e-6;

std::string which_name(SliceKind which) {
    switch (which) {
        case SliceKind::W1: return "w1";
        case SliceKind::W2: return "w2";
        case SliceKind::VPlus: return "v_plus";
        case SliceKind::VMinus: return "v_minus";
        case SliceKind::W2MinusTwoME: return "w2m2mE";
    }
    return "?";
}

std::string p_name(double p) { return std::isinf(p) ? "inf" : format_double(p); }

json bound_json(const BoundReport& r) {
    return json{{"pass", r.pass}, {"max_ratio", r.max_ratio}, {"worst_node", r.worst_x}};
}

ProfileTable build_table(const RunConfig& cfg, double alpha) {
    BuildOptions opts;
    opts.n_nodes = cfg.n_nodes;
    opts.grading = cfg.grading;
    return build_profile(FracOrder(alpha), cfg.x_max, cfg.tol, opts);
}

// Composite Simpson of E_t over [0, X] on an independent uniform lattice,
// plus the fitted profile tail beyond (scale invariant in t).
double half_line_mass(const FundamentalSolution& fs, double t, std::size_t n_panels = 100000) {
    const double beta = fs.order().similarity_exponent();
    const double X = fs.x_max() * std::pow(t, beta);
    const double h = X / static_cast<double>(2 * n_panels);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < 2 * n_panels; ++i) {
        const double v = fs(static_cast<double>(i) * h, t);
        if (i % 2 == 1)
            odd += v;
        else
            even += v;
    }
    const double simpson = h / 3.0 * (fs(0.0, t) + fs(X, t) + 4.0 * odd + 2.0 * even);
    return simpson + fs.a0() * fs.profile_tail_mass(fs.x_max());
}

std::vector<double> geometric_times(double t0, double factor, std::size_t count) {
    std::vector<double> out;
    double t = t0;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(t);
        t *= factor;
    }
    return out;
}

struct AlphaOutcome {
    json section;
    std::vector<std::string> failures;
    std::string decay_rows;
};

AlphaOutcome verify_one_alpha(const RunConfig& cfg, double alpha) {
    AlphaOutcome out;
    json& sec = out.section;
    auto note_fail = [&](const std::string& what) { out.failures.push_back(what); };

    // profile table with invariants, overlap cross-validation inside
    const ProfileTable table = build_table(cfg, alpha);
    double worst_est = 0.0;
    for (double e : table.est_error) worst_est = std::max(worst_est, e);
    sec["profile"] = json{{"nodes", table.size()},
                          {"x_max", table.x_max()},
                          {"max_est_error", worst_est},
                          {"pass", true}};

    // decay bounds on Phi and Phi'
    json bounds;
    for (const BoundReport& r : verify_profile_bounds(table)) {
        bounds[r.bound_id] = bound_json(r);
        if (r.bound_id == "lemma5_phiprime_sharp") {
            bounds[r.bound_id]["informational"] = true;
        } else if (!r.pass) {
            note_fail("bound " + r.bound_id);
        }
    }
    sec["bounds"] = bounds;
    sec["phi_prime_decay_order"] = phi_prime_decay_order(table);

    // profile equation residual at h = 1e-3 on [0,5], order check under h -> h/2
    {
        BuildOptions uo;
        uo.grading = 1.0;
        uo.n_nodes = 5001;
        const ProfileTable coarse = build_profile(FracOrder(alpha), 5.0, cfg.tol, uo);
        uo.n_nodes = 10001;
        const ProfileTable fine = build_profile(FracOrder(alpha), 5.0, cfg.tol, uo);
        const OdeResidual rc = verify_ode(coarse);
        const OdeResidual rf = verify_ode(fine);
        const double ratio = rc.max_residual / rf.max_residual;
        const bool pass = rc.max_residual <= kOdeResidualLimit && ratio >= 2.0;
        sec["ode_residual"] = json{{"pass", pass},
                                   {"max_residual", rc.max_residual},
                                   {"worst_node", rc.worst_x},
                                   {"refinement_ratio", ratio}};
        if (!pass) note_fail("ode residual");
    }

    // normalisation and the half-line mass identity
    const FundamentalSolution fs(table, cfg.a0_tol);
    sec["a0"] = json{{"value", fs.a0()}, {"est_error", fs.a0_error()}};
    {
        json mass;
        for (double t : {1.0, 16.0}) {
            const double dev = std::fabs(half_line_mass(fs, t) - 0.5);
            const bool pass = dev <= kMassTolerance;
            mass["t=" + format_double(t)] =
                json{{"pass", pass}, {"max_ratio", dev / kMassTolerance}, {"worst_node", t}};
            if (!pass) note_fail("mass identity at t=" + format_double(t));
        }
        sec["mass"] = mass;
    }

    // pointwise far-field estimate and weak (1,1) levels
    {
        json lemma6, weak;
        const std::vector<std::pair<std::string, InitialDatum>> data = {
            {"indicator:0:1", InitialDatum::indicator(0.0, 1.0)},
            {"bump:0.5:2", InitialDatum::smooth_bump(0.5, 2.0)}};
        const double beta = 1.0 / (1.0 + alpha);
        for (const auto& [name, g] : data) {
            json l6d, wkd;
            for (double t : {4.0, 16.0, 64.0}) {
                const double tb = std::pow(t, beta);
                const RadialGrid grid =
                    make_eval_grid(std::max(2.0 * g.support_end(), 2.0 * tb),
                                   60.0 * tb + 2.0 * g.support_end(), 200, 400);
                json l6t, wkt;
                for (bool plus : {true, false}) {
                    const BoundReport pb = verify_pointwise_bound(fs, g, t, grid, plus);
                    l6t[plus ? "plus" : "minus"] = bound_json(pb);
                    if (!pb.pass) note_fail("lemma6 " + name + " t=" + format_double(t));

                    // sigma ladder spanning four decades below the observed max error
                    const double m = g.mass();
                    double max_err = 0.0;
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        max_err = std::max(max_err, std::fabs(eval_v(fs, g, grid[i], t, plus) -
                                                              m * fs(grid[i], t)));
                    std::vector<double> sigmas;
                    for (int k = 0; k <= 16; ++k)
                        sigmas.push_back(max_err * 0.999 * std::pow(10.0, -k / 4.0));
                    const BoundReport wb = verify_weak11(fs, g, t, sigmas, grid, plus);
                    wkt[plus ? "plus" : "minus"] = bound_json(wb);
                    if (!wb.pass) note_fail("weak11 " + name + " t=" + format_double(t));
                }
                l6d["t=" + format_double(t)] = l6t;
                wkd["t=" + format_double(t)] = wkt;
            }
            lemma6[name] = l6d;
            weak[name] = wkd;
        }
        sec["lemma6_pointwise"] = lemma6;
        sec["weak11"] = weak;
    }

    // decay exponents over t = 2^0 .. 2^10
    {
        const InitialDatum g = InitialDatum::indicator(0.0, 1.0);
        const std::vector<double> times = geometric_times(1.0, 2.0, 11);
        const double gap_limit = alpha == 0.5 ? 0.07 : 0.10;
        json decay;
        std::ostringstream rows;
        for (SliceKind which : {SliceKind::W1, SliceKind::W2MinusTwoME}) {
            for (double p : {2.0, std::numeric_limits<double>::infinity()}) {
                const DecayReport r = decay_fit(fs, g, which, p, times);
                const bool pass = r.relative_gap <= gap_limit && r.prefactor_no_drift;
                const std::string key = which_name(which) + "_p" + p_name(p);
                decay[key] = json{{"pass", pass},
                                  {"fitted_slope", r.fitted_slope},
                                  {"theoretical_slope", r.theoretical_slope},
                                  {"relative_gap", r.relative_gap},
                                  {"sup_prefactor", r.sup_prefactor},
                                  {"no_drift", r.prefactor_no_drift}};
                if (!pass) note_fail("decay " + key);
                for (std::size_t i = 0; i < r.times.size(); ++i) {
                    rows << format_double(alpha) << ',' << which_name(which) << ',' << p_name(p)
                         << ',' << format_double(r.times[i]) << ',' << format_double(r.norms[i])
                         << ',' << format_double(r.prefactors[i]) << ','
                         << format_double(r.fitted_slope) << ','
                         << format_double(r.theoretical_slope) << ','
                         << format_double(r.relative_gap) << '\n';
                }
            }
        }
        sec["decay"] = decay;
        out.decay_rows = rows.str();
    }
    return out;
}

int run_verify(const RunConfig& cfg) {
    json report;
    report["tool"] = "fracdecay verify";
    report["config"] = json{{"alphas", cfg.alphas}, {"tol", cfg.tol},
                            {"x_max", cfg.x_max},   {"n_nodes", cfg.n_nodes},
                            {"grading", cfg.grading}};
    std::string decay_csv = "alpha,which,p,t,norm,prefactor,fitted_slope,theoretical_slope,"
                            "relative_gap\n";
    bool all_pass = true;
    json alphas_json;
    for (double alpha : cfg.alphas) {
        AlphaOutcome one = verify_one_alpha(cfg, alpha);
        alphas_json[format_double(alpha)] = one.section;
        decay_csv += one.decay_rows;
        if (!one.failures.empty()) {
            all_pass = false;
            for (const std::string& f : one.failures)
                std::cerr << "verify failure (alpha=" << format_double(alpha) << "): " << f
                          << '\n';
        }
    }
    report["alpha"] = alphas_json;
    report["all_pass"] = all_pass;

    const std::filesystem::path dir(cfg.out_dir);
    write_file_atomic(dir / "report.json", report.dump(2) + "\n");
    write_file_atomic(dir / "decay.csv", decay_csv);
    std::cout << (all_pass ? "verify: PASS" : "verify: FAIL") << " (report in "
              << (dir / "report.json").string() << ")\n";
    return all_pass ? 0 : 1;
}

int run_profile(const RunConfig& cfg) {
    const ProfileTable table = build_table(cfg, cfg.alphas.front());
    std::ostringstream body;
    table.write_csv(body);
    const std::string path = cfg.out.empty() ? "profile.csv" : cfg.out;
    write_file_atomic(path, body.str());
    std::cout << "profile: " << table.size() << " nodes -> " << path << "\n";
    return 0;
}

int run_fundsol(const RunConfig& cfg) {
    const ProfileTable table = build_table(cfg, cfg.alphas.front());
    const FundamentalSolution fs(table, cfg.a0_tol);
    const std::vector<double> times = cfg.times.empty() ? std::vector<double>{1.0} : cfg.times;
    std::ostringstream body;
    body << "x,t,E\n";
    const double x0 = -cfg.eval_x_max;
    const double dx = 2.0 * cfg.eval_x_max / static_cast<double>(cfg.eval_nx - 1);
    for (double t : times) {
        for (std::size_t i = 0; i < cfg.eval_nx; ++i) {
            const double x = x0 + dx * static_cast<double>(i);
            body << format_double(x) << ',' << format_double(t) << ',' << format_double(fs(x, t))
                 << '\n';
        }
    }
    const std::string path = cfg.out.empty() ? "fundsol.csv" : cfg.out;
    write_file_atomic(path, body.str());
    std::cout << "fundsol -> " << path << "\n";
    return 0;
}

int run_evolve(const RunConfig& cfg) {
    if (cfg.times.empty()) throw UsageError("evolve: --times is required");
    const ProfileTable table = build_table(cfg, cfg.alphas.front());
    const FundamentalSolution fs(table, cfg.a0_tol);
    const InitialDatum g = make_datum(cfg.datum);
    const bool dirichlet = cfg.bc == "dirichlet";
    std::ostringstream body;
    body << "t,x,value\n";
    const double dx = cfg.eval_x_max / static_cast<double>(cfg.eval_nx - 1);
    for (double t : cfg.times) {
        for (std::size_t i = 0; i < cfg.eval_nx; ++i) {
            const double x = dx * static_cast<double>(i);
            const double v = dirichlet ? eval_w1(fs, g, x, t) : eval_w2(fs, g, x, t);
            body << format_double(t) << ',' << format_double(x) << ',' << format_double(v)
                 << '\n';
        }
    }
    const std::string path = cfg.out.empty() ? "evolve.csv" : cfg.out;
    write_file_atomic(path, body.str());
    std::cout << "evolve -> " << path << "\n";
    return 0;
}

int run_decay(const RunConfig& cfg) {
    const ProfileTable table = build_table(cfg, cfg.alphas.front());
    const FundamentalSolution fs(table, cfg.a0_tol);
    const InitialDatum g = make_datum(cfg.datum);
    const std::vector<double> times =
        cfg.times.empty() ? geometric_times(1.0, 2.0, 11) : cfg.times;
    std::ostringstream body;
    body << "which,p,t,norm,prefactor,fitted_slope,theoretical_slope,relative_gap\n";
    bool ok = true;
    for (SliceKind which : {SliceKind::W1, SliceKind::W2MinusTwoME}) {
        for (double p : cfg.p_values) {
            const DecayReport r = decay_fit(fs, g, which, p, times);
            if (r.relative_gap > 0.10 || !r.prefactor_no_drift) ok = false;
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                body << which_name(which) << ',' << p_name(p) << ',' << format_double(r.times[i])
                     << ',' << format_double(r.norms[i]) << ',' << format_double(r.prefactors[i])
                     << ',' << format_double(r.fitted_slope) << ','
                     << format_double(r.theoretical_slope) << ','
                     << format_double(r.relative_gap) << '\n';
            }
        }
    }
    const std::string path = cfg.out.empty() ? "decay.csv" : cfg.out;
    write_file_atomic(path, body.str());
    std::cout << "decay -> " << path << (ok ? "" : " (FAIL)") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

InitialDatum make_datum(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    auto num = [&](std::size_t i) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(parts[i], &pos);
            if (pos != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw UsageError("datum: '" + parts[i] + "' is not a number in '" + spec + "'");
        }
    };
    try {
        if (parts[0] == "indicator" && parts.size() == 3)
            return InitialDatum::indicator(num(1), num(2));
        if (parts[0] == "triangle" && parts.size() == 3)
            return InitialDatum::triangle(num(1), num(2));
        if ((parts[0] == "bump" || parts[0] == "smooth-bump") && parts.size() == 3)
            return InitialDatum::smooth_bump(num(1), num(2));
        if (parts[0] == "csv" && parts.size() == 2) {
            std::ifstream in(parts[1]);
            if (!in) throw UsageError("datum: cannot read file '" + parts[1] + "'");
            return InitialDatum::from_csv(in);
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError("datum: invalid specification '" + spec + "': " + e.what());
    }
    throw UsageError("datum: expected indicator:a:b, triangle:a:b, bump:a:b or csv:path, got '" +
                     spec + "'");
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"fracdecay: profile, fundamental solution and decay-rate toolkit for the "
                 "half-line space-fractional diffusion equation"};
    app.set_config("--config", "", "flat key=value configuration file (flags override keys)");
    app.allow_config_extras(false);

    app.add_option("subcommand", cfg.subcommand, "profile | fundsol | evolve | verify | decay")
        ->required()
        ->check(CLI::IsMember({"profile", "fundsol", "evolve", "verify", "decay"}));
    app.add_option("--alpha", cfg.alphas, "fractional order(s) in (0,1), comma separated "
                                          "(default 0.5)")
        ->delimiter(',');
    app.add_option("--tol", cfg.tol, "profile tolerance (default 1e-8)");
    app.add_option("--xmax", cfg.x_max, "profile table extent (default 20)");
    app.add_option("--nodes", cfg.n_nodes, "profile node count (default 20000)");
    app.add_option("--grading", cfg.grading, "grid grading exponent, 1 = uniform (default 2)");
    app.add_option("--a0-tol", cfg.a0_tol, "normalisation error budget (default 1e-2)");
    app.add_option("--datum", cfg.datum,
                   "initial datum: indicator:a:b | triangle:a:b | bump:a:b | csv:path");
    app.add_option("--bc", cfg.bc, "boundary condition for evolve (default dirichlet)")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    app.add_option("--times", cfg.times, "comma separated evaluation times")->delimiter(',');
    std::vector<std::string> p_strings;
    app.add_option("--p", p_strings, "Lebesgue exponents for decay (numbers or inf)")
        ->delimiter(',');
    app.add_option("--eval-xmax", cfg.eval_x_max, "lattice extent for fundsol/evolve");
    app.add_option("--nx", cfg.eval_nx, "lattice point count for fundsol/evolve");
    app.add_option("--out", cfg.out, "output file (subcommand-specific default)");
    app.add_option("--out-dir", cfg.out_dir, "verify artifact directory (default out)");

    std::vector<std::string> argv_like(args.rbegin(), args.rend());
    try {
        app.parse(argv_like);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    for (double a : cfg.alphas)
        if (!(a > 0.0) || !(a < 1.0))
            throw UsageError("--alpha " + format_double(a) +
                             " rejected: the order must lie in the open interval (0,1)");
    if (cfg.alphas.empty()) throw UsageError("--alpha: need at least one order");
    if (!(cfg.tol > 0.0)) throw UsageError("--tol must be > 0");
    if (!(cfg.x_max > 0.0)) throw UsageError("--xmax must be > 0");
    if (cfg.n_nodes < 8) throw UsageError("--nodes must be at least 8");
    if (!(cfg.grading >= 1.0)) throw UsageError("--grading must be >= 1");
    if (cfg.eval_nx < 2) throw UsageError("--nx must be at least 2");
    for (double t : cfg.times)
        if (!(t > 0.0)) throw UsageError("--times must be positive");
    if (cfg.subcommand == "decay") {
        for (double t : cfg.times)
            if (!(t >= 1.0)) throw UsageError("--times must be >= 1 for decay runs");
    }
    if (!p_strings.empty()) {
        cfg.p_values.clear();
        for (const std::string& s : p_strings) {
            if (s == "inf" || s == "Inf" || s == "INF") {
                cfg.p_values.push_back(std::numeric_limits<double>::infinity());
            } else {
                try {
                    cfg.p_values.push_back(std::stod(s));
                } catch (const std::exception&) {
                    throw UsageError("--p: '" + s + "' is not a number or inf");
                }
            }
            if (!(cfg.p_values.back() > 1.0))
                throw UsageError("--p must lie in (1, inf]");
        }
    }
    (void)make_datum(cfg.datum);  // validate the spec eagerly; diagnostics map to exit 2
    return cfg;
}

int run(const RunConfig& cfg) {
    if (cfg.subcommand == "verify") return run_verify(cfg);
    if (cfg.subcommand == "profile") return run_profile(cfg);
    if (cfg.subcommand == "fundsol") return run_fundsol(cfg);
    if (cfg.subcommand == "evolve") return run_evolve(cfg);
    if (cfg.subcommand == "decay") return run_decay(cfg);
    throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace fracdecay
