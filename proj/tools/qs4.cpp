// Command-line front end: one subcommand per experiment.
#include "qs4/asymptotics.hpp"
#include "qs4/bilinear.hpp"
#include "qs4/error.hpp"
#include "qs4/extremizer.hpp"
#include "qs4/io.hpp"
#include "qs4/profiles.hpp"
#include "qs4/weights.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace qs4;

namespace {

struct GridOpts {
    int n = 128;
    double extent = 16.0;
};

struct WindowOpts {
    double t_max = 2.0;
    int n_t = 129;
};

void add_grid(CLI::App* sub, GridOpts& g)
{
    sub->add_option("--grid-n", g.n, "points per axis (power of two >= 16)")->capture_default_str();
    sub->add_option("--extent", g.extent, "box side length L")->capture_default_str();
}

void add_window(CLI::App* sub, WindowOpts& w)
{
    sub->add_option("--t-max", w.t_max, "time window half-width")->capture_default_str();
    sub->add_option("--nt", w.n_t, "time nodes (odd)")->capture_default_str();
}

Json grid_json(const GridOpts& g) { return Json{{"grid_n", g.n}, {"extent", g.extent}}; }
Json window_json(const WindowOpts& w) { return Json{{"t_max", w.t_max}, {"n_t", w.n_t}}; }

Format parse_format(const std::string& s)
{
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    throw ValidationError("unknown format '" + s + "' (json or csv)");
}

// Opens the output once before any computation so a bad path fails early.
void check_writable(const std::string& path)
{
    require(!path.empty(), "--out is required");
    std::ofstream os(path, std::ios::app);
    if (!os) throw ValidationError("cannot write output path: " + path);
}

Json base_config(const std::string& sub)
{
    return Json{{"tool", "qs4"}, {"version", kToolVersion}, {"subcommand", sub}};
}

// CSV and field outputs carry their config in a sidecar file.
void write_outputs(const Record& r, Format fmt, const std::string& path)
{
    emit_results(r, fmt, path);
    if (fmt == Format::csv) {
        std::ofstream os(path + ".config.json", std::ios::binary);
        if (!os) throw ValidationError("cannot write " + path + ".config.json");
        os << dump_json(r.config) << "\n";
    }
}

Json vec_json(const std::vector<double>& v) { return Json(v); }

Json params_json(const SymmetryParams& p)
{
    return Json{{"h", p.h}, {"x0", {p.x0.x, p.x0.y}}, {"t0", p.t0}, {"xi0", {p.xi0.x, p.xi0.y}}};
}

Json defect_json(const OrthogonalityDefect& d)
{
    return Json{{"l2_defect", d.l2_defect},
                {"strichartz_defect", d.strichartz_defect},
                {"strichartz_relative", d.strichartz_relative},
                {"flagged", d.flagged}};
}

Json fit_json(const LineFit& f)
{
    return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"rms_residual", f.rms_residual},
                {"r_squared", f.r_squared}, {"points", f.points}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qs4: numerical experiments for the fourth-order Strichartz inequality"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::function<void()> run;
    std::string out;
    // scans default to CSV tables, reports are always JSON
    std::string format = "csv";

    // propagate
    GridOpts pg;
    double p_width = 1.0, p_time = 0.0;
    std::vector<double> p_center{0.0, 0.0}, p_mod{0.0, 0.0};
    std::string p_in, p_disp = "quartic";
    bool p_spectral = false;
    auto* prop = app.add_subcommand("propagate", "evolve a field and write it as a field file");
    add_grid(prop, pg);
    prop->add_option("--in", p_in, "input field file (default: Gaussian)");
    prop->add_option("--width", p_width, "Gaussian width")->capture_default_str();
    prop->add_option("--center", p_center, "Gaussian center x,y")->delimiter(',')->expected(2);
    prop->add_option("--modulation", p_mod, "Gaussian modulation xi1,xi2")->delimiter(',')->expected(2);
    prop->add_option("--time", p_time, "evolution time")->capture_default_str();
    prop->add_option("--dispersion", p_disp, "quartic or schrodinger")->capture_default_str();
    prop->add_flag("--spectral", p_spectral, "write the spectral representation");
    prop->add_option("--out", out, "output field file")->required();
    prop->callback([&] {
        run = [&] {
            require(p_disp == "quartic" || p_disp == "schrodinger", "--dispersion must be quartic or schrodinger");
            require(std::isfinite(p_time), "--time must be finite");
            Field f = [&] {
                if (!p_in.empty()) {
                    AnyField a = read_field(p_in);
                    return std::holds_alternative<Field>(a) ? std::get<Field>(a)
                                                            : dft_inverse(std::get<SpectralField>(a));
                }
                return make_gaussian(Grid2D(pg.n, pg.extent), {p_center[0], p_center[1]}, p_width,
                                     {p_mod[0], p_mod[1]});
            }();
            check_writable(out);
            const Dispersion d = p_disp == "quartic" ? Dispersion::quartic : Dispersion::schrodinger;
            const Field u = evolve(f, p_time, d);
            if (p_spectral) write_field(dft_forward(u), out);
            else write_field(u, out);
            Json cfg = base_config("propagate");
            cfg["input"] = p_in;
            cfg["grid"] = grid_json(pg);
            cfg["width"] = p_width;
            cfg["center"] = p_center;
            cfg["modulation"] = p_mod;
            cfg["time"] = p_time;
            cfg["dispersion"] = p_disp;
            cfg["spectral"] = p_spectral;
            std::ofstream os(out + ".config.json", std::ios::binary);
            if (!os) throw ValidationError("cannot write " + out + ".config.json");
            os << dump_json(Json{{"config", cfg}, {"results", {{"norm", u.norm()}}}}) << "\n";
        };
    });

    // extremize
    GridOpts eg;
    WindowOpts ew;
    int e_iters = 200;
    std::uint64_t e_seed = 1;
    double e_beta = 1.0, e_tol = 1e-3, e_tol_delta = 1e-9, e_width = 1.0;
    std::vector<double> e_mod{0.0, 0.0};
    std::string e_field_out;
    bool e_diag = false;
    auto* ext = app.add_subcommand("extremize", "power iteration for the Strichartz quotient");
    add_grid(ext, eg);
    add_window(ext, ew);
    ext->add_option("--iters", e_iters, "maximum iterations")->capture_default_str();
    ext->add_option("--seed", e_seed, "rng seed (diagnostic test fields)")->capture_default_str();
    ext->add_option("--beta", e_beta, "damping in (0, 1]")->capture_default_str();
    ext->add_option("--tol", e_tol, "residual tolerance")->capture_default_str();
    ext->add_option("--tol-delta", e_tol_delta, "stall tolerance on quotient change")->capture_default_str();
    ext->add_option("--width", e_width, "Gaussian seed width")->capture_default_str();
    ext->add_option("--modulation", e_mod, "Gaussian seed modulation")->delimiter(',')->expected(2);
    ext->add_option("--field-out", e_field_out, "write the final field here");
    ext->add_flag("--diagnostics", e_diag, "recompute at doubled time resolution and test the pairing");
    ext->add_option("--out", out, "output JSON")->required();
    ext->callback([&] {
        run = [&] {
            IterationConfig cfg;
            cfg.grid_n = eg.n;
            cfg.extent = eg.extent;
            cfg.max_iters = e_iters;
            cfg.tol_residual = e_tol;
            cfg.tol_quotient_delta = e_tol_delta;
            cfg.beta = e_beta;
            cfg.seed_spec.width = e_width;
            cfg.seed_spec.modulation = {e_mod[0], e_mod[1]};
            cfg.window = TimeWindow(ew.t_max, ew.n_t);
            cfg.rng_seed = e_seed;
            cfg.validate();
            check_writable(out);
            if (!e_field_out.empty()) check_writable(e_field_out);
            const ExtremizerReport rep = run_iteration(cfg);
            Record r;
            r.config = base_config("extremize");
            r.config["grid"] = grid_json(eg);
            r.config["window"] = window_json(ew);
            r.config["iters"] = e_iters;
            r.config["seed"] = e_seed;
            r.config["beta"] = e_beta;
            r.config["tol"] = e_tol;
            r.config["tol_delta"] = e_tol_delta;
            r.config["width"] = e_width;
            r.config["modulation"] = e_mod;
            r.config["diagnostics"] = e_diag;
            r.results["quotient_history"] = vec_json(rep.quotient_history);
            r.results["residual_history"] = vec_json(rep.residual_history);
            r.results["residual"] = rep.residual;
            r.results["omega"] = rep.omega;
            r.results["converged"] = rep.converged;
            r.results["iterations"] = rep.iterations;
            r.results["beta"] = rep.beta;
            r.results["aborted"] = rep.aborted;
            r.results["stop_reason"] = rep.stop_reason;
            if (rep.final_field) {
                const RecenterResult rc = recenter(*rep.final_field);
                r.results["recentered"] = Json{{"params", params_json(rc.params)}, {"phase", rc.phase}};
                if (!e_field_out.empty()) write_field(*rep.final_field, e_field_out);
            }
            if (e_diag) {
                const DiagnosticsSummary d = diagnostics(rep, cfg.window, e_seed);
                r.results["diagnostics"] = Json{{"quotient", d.quotient},
                                                {"residual", d.residual},
                                                {"quotient_discrepancy", d.quotient_discrepancy},
                                                {"discrepancy_flag", d.discrepancy_flag},
                                                {"converged_flag", d.converged_flag},
                                                {"pairing_errors", d.pairing_errors},
                                                {"pairing_median", d.pairing_median}};
            }
            write_outputs(r, Format::json, out);
        };
    });

    // modulation-scan
    GridOpts mg{256, 18.0};
    WindowOpts mw{0.5, 129};
    double m_width = 1.0;
    std::vector<double> m_mags{8.0, 16.0, 32.0}, m_dir{1.0, 0.0};
    auto* mod = app.add_subcommand("modulation-scan", "L6 norms of modulated Gaussians against the limit");
    add_grid(mod, mg);
    add_window(mod, mw);
    mod->add_option("--width", m_width, "Gaussian width")->capture_default_str();
    mod->add_option("--magnitudes", m_mags, "modulation magnitudes")->delimiter(',');
    mod->add_option("--direction", m_dir, "unit direction")->delimiter(',')->expected(2);
    mod->add_option("--out", out, "output path")->required();
    mod->add_option("--format", format, "csv or json")->capture_default_str();
    mod->callback([&] {
        run = [&] {
            const Format fmt = parse_format(format);
            const TimeWindow w(mw.t_max, mw.n_t);
            const Field phi = make_gaussian(Grid2D(mg.n, mg.extent), {0.0, 0.0}, m_width, {0.0, 0.0});
            check_writable(out);
            const ModulationScan s = modulation_scan(phi, m_mags, {m_dir[0], m_dir[1]}, w);
            Record r;
            r.config = base_config("modulation-scan");
            r.config["grid"] = grid_json(mg);
            r.config["window"] = window_json(mw);
            r.config["width"] = m_width;
            r.config["magnitudes"] = m_mags;
            r.config["direction"] = m_dir;
            r.results["magnitude"] = vec_json(s.magnitudes);
            r.results["raw_norm"] = vec_json(s.raw_norms);
            r.results["compensated"] = vec_json(s.compensated);
            if (fmt == Format::json) {
                r.results["limit_reference"] = s.limit_reference;
                r.results["threshold_magnitude"] = s.threshold_magnitude;
            }
            write_outputs(r, fmt, out);
        };
    });

    // bilinear-scan
    GridOpts bg{512, 32.0};
    WindowOpts bw{0.15, 513};
    double b_s = 0.6, b_env = 2.0;
    std::vector<double> b_N{4.0, 8.0, 16.0, 32.0};
    std::vector<std::uint64_t> b_seeds{1, 2, 3, 4, 5};
    auto* bil = app.add_subcommand("bilinear-scan", "L3 norm of separated-frequency products against N");
    add_grid(bil, bg);
    add_window(bil, bw);
    bil->add_option("--s", b_s, "low-frequency radius")->capture_default_str();
    bil->add_option("--N", b_N, "separation factors")->delimiter(',');
    bil->add_option("--seeds", b_seeds, "rng seeds")->delimiter(',');
    bil->add_option("--envelope", b_env, "Gaussian envelope width (<= 0: none)")->capture_default_str();
    bil->add_option("--out", out, "output path")->required();
    bil->add_option("--format", format, "csv or json")->capture_default_str();
    bil->callback([&] {
        run = [&] {
            const Format fmt = parse_format(format);
            const Grid2D g(bg.n, bg.extent);
            const TimeWindow w(bw.t_max, bw.n_t);
            validate_decay_scan(g, b_s, b_N, b_seeds);
            check_writable(out);
            const BilinearScan s = decay_scan(g, b_s, b_N, b_seeds, w, b_env);
            Record r;
            r.config = base_config("bilinear-scan");
            r.config["grid"] = grid_json(bg);
            r.config["window"] = window_json(bw);
            r.config["s"] = b_s;
            r.config["N"] = b_N;
            r.config["seeds"] = b_seeds;
            r.config["envelope"] = b_env;
            r.results["N"] = vec_json(s.N);
            r.results["median"] = vec_json(s.medians);
            for (std::size_t k = 0; k < b_seeds.size(); ++k) {
                std::vector<double> col;
                for (const auto& row : s.values) col.push_back(row[k]);
                r.results["seed_" + std::to_string(b_seeds[k])] = col;
            }
            if (fmt == Format::json) {
                r.results["fit"] = fit_json(s.fit);
                r.results["reliable"] = s.reliable;
                r.results["weak_constant"] = s.weak_constant;
                r.results["sharp_reference"] = s.sharp_reference;
                r.results["weak_reference"] = s.weak_reference;
            }
            write_outputs(r, fmt, out);
        };
    });

    // weight-check
    int w_count = 100000;
    double w_radius = 2.0, w_s = 1.0, w_mu = 1.0;
    std::vector<double> w_eps{0.0, 0.1, 10.0};
    bool w_coupled = false;
    std::uint64_t w_seed = 1;
    auto* wc = app.add_subcommand("weight-check", "kernel bound on sampled constraint tuples");
    wc->add_option("--count", w_count, "tuples per eps")->capture_default_str();
    wc->add_option("--radius", w_radius, "sampling radius")->capture_default_str();
    wc->add_option("--eps", w_eps, "eps values")->delimiter(',');
    wc->add_option("--mu", w_mu, "weight rate (uncoupled)")->capture_default_str();
    wc->add_option("--s", w_s, "scale (coupled mode: mu = s^-8)")->capture_default_str();
    wc->add_flag("--coupled", w_coupled, "tie mu to s");
    wc->add_option("--seed", w_seed, "rng seed")->capture_default_str();
    wc->add_option("--out", out, "output JSON")->required();
    wc->callback([&] {
        run = [&] {
            require(w_count >= 1, "--count must be >= 1");
            require(w_radius > 0.0 && std::isfinite(w_radius), "--radius must be positive");
            std::vector<WeightParams> ps;
            for (double e : w_eps) {
                WeightParams p = w_coupled ? WeightParams::coupled_to(w_s, e) : WeightParams{w_mu, e, w_s, false};
                p.validate();
                ps.push_back(p);
            }
            check_writable(out);
            const auto tuples = sample_constraint_tuples(w_count, w_radius, w_seed);
            Record r;
            r.config = base_config("weight-check");
            r.config["count"] = w_count;
            r.config["radius"] = w_radius;
            r.config["eps"] = w_eps;
            r.config["mu"] = w_mu;
            r.config["s"] = w_s;
            r.config["coupled"] = w_coupled;
            r.config["seed"] = w_seed;
            r.results = Json::array();
            for (const WeightParams& p : ps) {
                const KernelReport k = weight_kernel_check(tuples, p);
                r.results.push_back(Json{{"eps", p.eps},
                                         {"mu", p.mu},
                                         {"tuples", k.tuples},
                                         {"violations", k.violations},
                                         {"max_kernel", k.max_kernel},
                                         {"argmax", k.argmax}});
            }
            write_outputs(r, Format::json, out);
        };
    });

    // decay-fit
    std::string d_in;
    GridOpts dg{128, 64.0};
    double d_planted = -1.0, d_rmin = 0.0, d_threshold = kDecayResidualThreshold;
    auto* dec = app.add_subcommand("decay-fit", "fit log|F| against -mu |xi|^4");
    dec->add_option("--in", d_in, "field file to fit");
    dec->add_option("--planted-mu", d_planted, "fit a planted e^{-mu |xi|^4} spectrum instead");
    add_grid(dec, dg);
    dec->add_option("--r-min", d_rmin, "inner fit radius")->capture_default_str();
    dec->add_option("--threshold", d_threshold, "rms residual threshold (log units)")->capture_default_str();
    dec->add_option("--out", out, "output JSON")->required();
    dec->callback([&] {
        run = [&] {
            require(d_in.empty() != (d_planted < 0.0), "give exactly one of --in and --planted-mu");
            require(d_rmin >= 0.0 && d_threshold > 0.0, "--r-min must be >= 0 and --threshold > 0");
            SpectralField F = [&] {
                if (!d_in.empty()) {
                    AnyField a = read_field(d_in);
                    return std::holds_alternative<SpectralField>(a) ? std::get<SpectralField>(a)
                                                                    : dft_forward(std::get<Field>(a));
                }
                require(d_planted > 0.0, "--planted-mu must be positive");
                const Grid2D g(dg.n, dg.extent);
                SpectralField P(g);
                for (int p1 = 0; p1 < g.n(); ++p1)
                    for (int p2 = 0; p2 < g.n(); ++p2) {
                        const double r2 = g.xi(p1) * g.xi(p1) + g.xi(p2) * g.xi(p2);
                        P(p1, p2) = std::exp(-d_planted * r2 * r2);
                    }
                return P;
            }();
            check_writable(out);
            const DecayFit fit = decay_fit(F, d_rmin, d_threshold);
            Record r;
            r.config = base_config("decay-fit");
            r.config["input"] = d_in;
            r.config["planted_mu"] = d_planted;
            r.config["grid"] = grid_json(dg);
            r.config["r_min"] = d_rmin;
            r.config["threshold"] = d_threshold;
            r.results = Json{{"mu", fit.mu},
                             {"intercept", fit.intercept},
                             {"rms_residual", fit.rms_residual},
                             {"r_squared", fit.r_squared},
                             {"shells", fit.shells},
                             {"quartic", fit.quartic}};
            write_outputs(r, Format::json, out);
        };
    });

    // profile-demo
    ProfileDemoConfig pd;
    auto* prof = app.add_subcommand("profile-demo", "two-profile orthogonality and extraction scenario");
    prof->add_option("--grid-n", pd.grid_n)->capture_default_str();
    prof->add_option("--extent", pd.extent)->capture_default_str();
    prof->add_option("--t-max", pd.t_max)->capture_default_str();
    prof->add_option("--nt", pd.n_t)->capture_default_str();
    prof->add_option("--index", pd.index, "sequence index n")->capture_default_str();
    prof->add_option("--compare-index", pd.compare_index)->capture_default_str();
    prof->add_option("--width", pd.width)->capture_default_str();
    prof->add_option("--noise", pd.noise)->capture_default_str();
    prof->add_option("--seed", pd.seed)->capture_default_str();
    prof->add_option("--max-profiles", pd.max_profiles)->capture_default_str();
    prof->add_option("--out", out, "output JSON")->required();
    prof->callback([&] {
        run = [&] {
            pd.validate();
            check_writable(out);
            const ProfileDemoReport rep = profile_demo(pd);
            Record r;
            r.config = base_config("profile-demo");
            r.config["grid"] = Json{{"grid_n", pd.grid_n}, {"extent", pd.extent}};
            r.config["window"] = Json{{"t_max", pd.t_max}, {"n_t", pd.n_t}};
            r.config["index"] = pd.index;
            r.config["compare_index"] = pd.compare_index;
            r.config["width"] = pd.width;
            r.config["noise"] = pd.noise;
            r.config["seed"] = pd.seed;
            r.config["max_profiles"] = pd.max_profiles;
            r.results["planted"] = defect_json(rep.planted);
            r.results["planted_compare"] = defect_json(rep.planted_compare);
            r.results["recovered"] = rep.recovered;
            Json ps = Json::array();
            for (const SymmetryParams& p : rep.recovered_params) ps.push_back(params_json(p));
            r.results["recovered_params"] = ps;
            r.results["profile_errors"] = vec_json(rep.profile_errors);
            r.results["energies"] = vec_json(rep.energies);
            write_outputs(r, Format::json, out);
        };
    });

    // oscillatory-check
    OscillatoryCheckConfig oc;
    std::vector<double> o_xin{oc.xi_n.x, oc.xi_n.y};
    auto* osc = app.add_subcommand("oscillatory-check", "decay of the modulated oscillatory integral");
    osc->add_option("--grid-n", oc.grid_n)->capture_default_str();
    osc->add_option("--extent", oc.extent)->capture_default_str();
    osc->add_option("--radius", oc.radius, "bump radius")->capture_default_str();
    osc->add_option("--xi-n", o_xin, "modulation frequency")->delimiter(',')->expected(2);
    osc->add_option("--t-list", oc.t_list, "T samples at X = 0")->delimiter(',');
    osc->add_option("--x-factors", oc.x_factors, "X = factor * C' * x-time")->delimiter(',');
    osc->add_option("--x-time", oc.x_time)->capture_default_str();
    osc->add_option("--out", out, "output JSON")->required();
    osc->callback([&] {
        run = [&] {
            oc.xi_n = {o_xin[0], o_xin[1]};
            oc.validate();
            check_writable(out);
            const OscillatoryCheck c = oscillatory_check(oc);
            Record r;
            r.config = base_config("oscillatory-check");
            r.config["grid"] = Json{{"grid_n", oc.grid_n}, {"extent", oc.extent}};
            r.config["radius"] = oc.radius;
            r.config["xi_n"] = o_xin;
            r.config["t_list"] = oc.t_list;
            r.config["x_factors"] = oc.x_factors;
            r.config["x_time"] = oc.x_time;
            r.results["c_phi"] = c.constants.c_phi;
            r.results["c_prime_phi"] = c.constants.c_prime_phi;
            r.results["support_radius"] = c.constants.support_radius;
            r.results["at_origin"] = {c.at_origin.real(), c.at_origin.imag()};
            r.results["lattice_sum"] = c.lattice_sum;
            r.results["t_abs"] = vec_json(c.t_abs);
            r.results["t_fit"] = fit_json(c.t_fit);
            r.results["x_values"] = vec_json(c.x_values);
            r.results["x_abs"] = vec_json(c.x_abs);
            r.results["x_constants"] = vec_json(c.x_constants);
            r.results["x_fit"] = fit_json(c.x_fit);
            const DominatingReport& d = c.dominating;
            r.results["dominating"] = Json{{"values", d.values},
                                           {"boundary_T", d.boundary_T},
                                           {"boundary_inner", d.boundary_inner},
                                           {"boundary_outer", d.boundary_outer},
                                           {"boxes", d.boxes},
                                           {"masses", d.masses},
                                           {"increments", d.increments},
                                           {"ratios", d.ratios},
                                           {"increments_decreasing", d.increments_decreasing},
                                           {"ratios_below_one", d.ratios_below_one}};
            write_outputs(r, Format::json, out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "qs4: " << e.what() << "\n";
        return 1;
    }
    try {
        run();
    } catch (const ValidationError& e) {
        std::cerr << "qs4: invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const NumericalGuardError& e) {
        std::cerr << "qs4: numerical guard: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qs4: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
