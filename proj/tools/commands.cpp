#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twj/approx.hpp"
#include "twj/liouville_green.hpp"
#include "twj/montecarlo.hpp"
#include "twj/special.hpp"

namespace twj::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct SettingArgs {
    std::string setting = "raw";
    int p = 0, m = 0, n = 0;
    int pvars = 0, qvars = 0, nobs = 0;
    bool mean_correct = false;
    int r = 0, g = 0, q = 0;
    int n1 = 0, n2 = 0;
    int groups = 0;
};

struct Common {
    bool no_cache = false;
    std::string ensemble = "real";
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw validation_error(msg);
}

Ensemble parse_ensemble(const std::string& e) {
    if (e == "real") return Ensemble::real;
    if (e == "complex") return Ensemble::complex;
    throw validation_error("--ensemble must be real or complex");
}

void add_setting_options(CLI::App* sub, SettingArgs& a) {
    sub->add_option("--setting", a.setting, "raw | cca | mlm | cov | discrim")
        ->check(CLI::IsMember({"raw", "cca", "mlm", "cov", "discrim"}));
    sub->add_option("--p", a.p, "dimension (raw, cov, discrim)");
    sub->add_option("--m", a.m, "error degrees of freedom (raw)");
    sub->add_option("--n", a.n, "hypothesis degrees of freedom (raw)");
    sub->add_option("--pvars", a.pvars, "CCA: variables in the first set");
    sub->add_option("--qvars", a.qvars, "CCA: variables in the second set");
    sub->add_option("--nobs", a.nobs, "number of observations (cca, mlm, discrim)");
    sub->add_flag("--mean-correct", a.mean_correct, "CCA: data are mean-corrected (n' = n - 1)");
    sub->add_option("--r", a.r, "MLM: number of responses");
    sub->add_option("--g", a.g, "MLM: hypothesis degrees of freedom");
    sub->add_option("--q", a.q, "MLM: rank of the design");
    sub->add_option("--n1", a.n1, "covariance equality: first sample degrees of freedom");
    sub->add_option("--n2", a.n2, "covariance equality: second sample degrees of freedom");
    sub->add_option("--groups", a.groups, "discriminant analysis: number of groups");
}

StatParams resolve(const SettingArgs& a) {
    auto need = [](int v, const char* flag) { require(v > 0, std::string("missing or nonpositive ") + flag); };
    if (a.setting == "raw") {
        need(a.p, "--p"), need(a.m, "--m"), need(a.n, "--n");
        return StatParams(a.p, a.m, a.n);
    }
    if (a.setting == "cca") {
        need(a.pvars, "--pvars"), need(a.qvars, "--qvars"), need(a.nobs, "--nobs");
        return from_cca(a.pvars, a.qvars, a.nobs, a.mean_correct);
    }
    if (a.setting == "mlm") {
        need(a.r, "--r"), need(a.g, "--g"), need(a.q, "--q"), need(a.nobs, "--nobs");
        return from_mlm(a.r, a.g, a.q, a.nobs);
    }
    if (a.setting == "cov") {
        need(a.p, "--p"), need(a.n1, "--n1"), need(a.n2, "--n2");
        return from_cov_equal(a.p, a.n1, a.n2);
    }
    need(a.p, "--p"), need(a.groups, "--groups"), need(a.nobs, "--nobs");
    return from_discrim(a.p, a.groups, a.nobs);
}

json setting_echo(const SettingArgs& a) {
    json j{{"setting", a.setting}};
    if (a.setting == "raw") j.update({{"p", a.p}, {"m", a.m}, {"n", a.n}});
    if (a.setting == "cca")
        j.update({{"pvars", a.pvars}, {"qvars", a.qvars}, {"nobs", a.nobs}, {"mean_correct", a.mean_correct}});
    if (a.setting == "mlm") j.update({{"r", a.r}, {"g", a.g}, {"q", a.q}, {"nobs", a.nobs}});
    if (a.setting == "cov") j.update({{"p", a.p}, {"n1", a.n1}, {"n2", a.n2}});
    if (a.setting == "discrim") j.update({{"p", a.p}, {"groups", a.groups}, {"nobs", a.nobs}});
    return j;
}

json envelope(const std::string& cmd, json inputs, json results, const Caveats& caveats) {
    return json{{"schema_version", schema_version},
                {"command", cmd},
                {"inputs", std::move(inputs)},
                {"results", std::move(results)},
                {"caveats", caveats}};
}

std::string table_file_name(double lo, double hi, double step) {
    std::ostringstream os;
    os << "tw_table_" << lo << "_" << hi << "_" << step << ".csv";
    return os.str();
}

// Installs the process-wide Tracy-Widom table, reading or writing the on-disk cache.
void prepare_tw_table(bool no_cache) {
    constexpr double lo = -10.0, hi = 10.0, step = 0.05;
    if (no_cache) {
        install_tw_table(std::make_shared<const TWTable>(TWTable::build(lo, hi, step)));
        return;
    }
    const fs::path path = fs::path(cache_directory()) / table_file_name(lo, hi, step);
    std::error_code ec;
    if (fs::exists(path, ec)) {
        std::ifstream in(path);
        try {
            install_tw_table(std::make_shared<const TWTable>(TWTable::read_csv(in)));
            return;
        } catch (const std::exception&) {
            // unreadable cache: rebuild below
        }
    }
    auto table = std::make_shared<const TWTable>(TWTable::build(lo, hi, step));
    fs::create_directories(path.parent_path(), ec);
    if (!ec) {
        const fs::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp);
            table->write_csv(out);
        }
        fs::rename(tmp, path, ec);
    }
    install_tw_table(std::move(table));
}

std::vector<double> default_tw_grid() {
    std::vector<double> g;
    for (int i = -60; i <= 60; ++i) g.push_back(i / 10.0);
    return g;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw validation_error("cannot open output file: " + path);
    f << text;
}


}  // namespace

std::string cache_directory() {
    if (const char* e = std::getenv("TWJ_CACHE_DIR"); e && *e) return e;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return (fs::path(x) / "twj").string();
    if (const char* h = std::getenv("HOME"); h && *h) return (fs::path(h) / ".cache" / "twj").string();
    return (fs::temp_directory_path() / "twj-cache").string();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tracy-Widom approximations for the greatest root of double Wishart problems"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--no-cache", common.no_cache, "build the Tracy-Widom table in memory only");

    // pvalue / crit
    SettingArgs pv_set, cr_set;
    double pv_theta = -1, cr_alpha = 0.05;
    std::string pv_ens = "real", cr_ens = "real";
    auto* pv = app.add_subcommand("pvalue", "p-value of an observed greatest root");
    add_setting_options(pv, pv_set);
    pv->add_option("--theta", pv_theta, "observed greatest root in (0, 1)")->required();
    pv->add_option("--ensemble", pv_ens, "real | complex");
    auto* cr = app.add_subcommand("crit", "critical value of the greatest root");
    add_setting_options(cr, cr_set);
    cr->add_option("--alpha", cr_alpha, "significance level");
    cr->add_option("--ensemble", cr_ens, "real | complex");

    // table
    int tb_p = 0, tb_m = 0, tb_n = 0, tb_chunks = 1, tb_threads = 1;
    long tb_reps = 10000;
    std::uint64_t tb_seed = 1;
    std::string tb_scale = "theta", tb_ens = "real";
    std::vector<double> tb_pct{0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99};
    auto* tb = app.add_subcommand("table", "simulated coverage at Tracy-Widom percentiles");
    tb->add_option("--p", tb_p)->required();
    tb->add_option("--m", tb_m)->required();
    tb->add_option("--n", tb_n)->required();
    tb->add_option("--reps", tb_reps);
    tb->add_option("--seed", tb_seed);
    tb->add_option("--chunks", tb_chunks);
    tb->add_option("--threads", tb_threads);
    tb->add_option("--scale", tb_scale)->check(CLI::IsMember({"logit", "theta"}));
    tb->add_option("--ensemble", tb_ens);
    tb->add_option("--percentiles", tb_pct)->delimiter(',');

    // simulate
    int sm_p = 0, sm_m = 0, sm_n = 0, sm_chunks = 1, sm_threads = 1;
    long sm_reps = 10000;
    std::uint64_t sm_seed = 1;
    std::string sm_scale = "logit", sm_ens = "real", sm_out;
    bool sm_plot = false;
    auto* sm = app.add_subcommand("simulate", "simulate greatest roots and emit CSV");
    sm->add_option("--p", sm_p)->required();
    sm->add_option("--m", sm_m)->required();
    sm->add_option("--n", sm_n)->required();
    sm->add_option("--reps", sm_reps);
    sm->add_option("--seed", sm_seed);
    sm->add_option("--chunks", sm_chunks);
    sm->add_option("--threads", sm_threads);
    sm->add_option("--scale", sm_scale)->check(CLI::IsMember({"logit", "theta"}));
    sm->add_option("--ensemble", sm_ens);
    sm->add_option("--out", sm_out, "CSV destination (default standard output)");
    sm->add_flag("--plot-data", sm_plot, "emit probability-plot pairs instead of the empirical CDF");

    // tw
    int tw_beta_ = 1;
    double tw_q = -1, tw_s = 0;
    auto* tw = app.add_subcommand("tw", "Tracy-Widom CDF values or quantiles");
    tw->add_option("--beta", tw_beta_)->check(CLI::IsMember({1, 2}));
    auto* tw_qopt = tw->add_option("--quantile", tw_q, "probability to invert");
    auto* tw_sopt = tw->add_option("--s", tw_s, "point at which to evaluate the CDF");
    tw_qopt->excludes(tw_sopt);

    // lg-check / kernel-check
    std::vector<int> lg_N{50, 100, 200}, kc_N{50, 100, 200};
    double lg_a = 2, lg_b = 1, kc_a = 2, kc_b = 1;
    std::string lg_var = "x", lg_out, kc_out;
    bool lg_deriv = false, kc_naive = false;
    auto* lg = app.add_subcommand("lg-check", "edge Airy approximation error by degree");
    lg->add_option("--N", lg_N)->delimiter(',');
    lg->add_option("--a", lg_a);
    lg->add_option("--b", lg_b);
    lg->add_option("--variable", lg_var)->check(CLI::IsMember({"x", "u"}));
    lg->add_flag("--derivative", lg_deriv);
    lg->add_option("--out", lg_out);
    auto* kc = app.add_subcommand("kernel-check", "edge kernel approximation error by degree");
    kc->add_option("--N", kc_N)->delimiter(',');
    kc->add_option("--a", kc_a);
    kc->add_option("--b", kc_b);
    kc->add_flag("--naive", kc_naive, "use degree-N constants instead of the averaged scaling");
    kc->add_option("--out", kc_out);

    // spectrum
    int sp_p = 0, sp_m = 0, sp_n = 0, sp_chunks = 1, sp_threads = 1;
    long sp_reps = 50;
    std::uint64_t sp_seed = 1;
    std::string sp_ens = "real", sp_out;
    auto* sp = app.add_subcommand("spectrum", "simulated bulk spectrum against the Wachter law");
    sp->add_option("--p", sp_p)->required();
    sp->add_option("--m", sp_m)->required();
    sp->add_option("--n", sp_n)->required();
    sp->add_option("--reps", sp_reps);
    sp->add_option("--seed", sp_seed);
    sp->add_option("--chunks", sp_chunks);
    sp->add_option("--threads", sp_threads);
    sp->add_option("--ensemble", sp_ens);
    sp->add_option("--out", sp_out);

    std::vector<std::string> argv_store{"twj"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const bool uses_tw = !lg->parsed() && !kc->parsed();
        if (uses_tw) prepare_tw_table(common.no_cache);

        if (pv->parsed()) {
            const Ensemble e = parse_ensemble(pv_ens);
            const StatParams s = resolve(pv_set);
            const TestResult r = greatest_root_pvalue(s, pv_theta, e);
            json in = setting_echo(pv_set);
            in.update({{"theta", pv_theta}, {"ensemble", pv_ens}});
            json res{{"p", s.p}, {"m", s.m}, {"n", s.n}, {"mu", r.scaling.center}, {"sigma", r.scaling.scale},
                     {"s", r.s_value}, {"p_value", r.p_value}};
            out << envelope("pvalue", in, res, r.caveats).dump(2) << '\n';
        } else if (cr->parsed()) {
            const Ensemble e = parse_ensemble(cr_ens);
            require(cr_alpha > 0 && cr_alpha < 1, "--alpha must lie in (0, 1)");
            const StatParams s = resolve(cr_set);
            const EdgeScaling sc = logit_scaling(s, e);
            Caveats cv = sc.caveats;
            if (s.at_boundary()) add_caveat(cv, caveat::boundary_m_eq_p);
            const double sq = tw_quantile(tw_beta(e), 1.0 - cr_alpha);
            const double theta = greatest_root_quantile(s, 1.0 - cr_alpha, e);
            json in = setting_echo(cr_set);
            in.update({{"alpha", cr_alpha}, {"ensemble", cr_ens}});
            json res{{"p", s.p}, {"m", s.m}, {"n", s.n}, {"mu", sc.center}, {"sigma", sc.scale},
                     {"s", sq}, {"theta_crit", theta}};
            out << envelope("crit", in, res, cv).dump(2) << '\n';
        } else if (tb->parsed()) {
            const Ensemble e = parse_ensemble(tb_ens);
            SimConfig cfg{StatParams(tb_p, tb_m, tb_n), e, tb_reps, tb_seed, tb_chunks, tb_threads};
            const ScaleKind kind = tb_scale == "logit" ? ScaleKind::logit : ScaleKind::theta;
            std::vector<double> pts;
            for (double pr : tb_pct) pts.push_back(tw_quantile(tw_beta(e), pr));
            const EmpiricalCDF E = empirical_table(cfg, pts, kind);
            json rows = json::array();
            for (std::size_t i = 0; i < pts.size(); ++i)
                rows.push_back({{"percentile", tb_pct[i]}, {"tw", pts[i]}, {"estimate", E.estimates[i]},
                                {"se", E.standard_errors[i]}});
            const EdgeScaling sc = kind == ScaleKind::logit ? logit_scaling(cfg.params, e) : theta_scaling(cfg.params, e);
            json in{{"p", tb_p}, {"m", tb_m}, {"n", tb_n}, {"reps", tb_reps}, {"seed", tb_seed},
                    {"chunks", tb_chunks}, {"scale", tb_scale}, {"ensemble", tb_ens}, {"percentiles", tb_pct}};
            json res{{"mu", sc.center}, {"sigma", sc.scale}, {"rows", rows}};
            out << envelope("table", in, res, sc.caveats).dump(2) << '\n';
        } else if (sm->parsed()) {
            const Ensemble e = parse_ensemble(sm_ens);
            SimConfig cfg{StatParams(sm_p, sm_m, sm_n), e, sm_reps, sm_seed, sm_chunks, sm_threads};
            const ScaleKind kind = sm_scale == "logit" ? ScaleKind::logit : ScaleKind::theta;
            const SimulationResult sim = simulate_largest(cfg);
            const std::vector<double> z = standardize(sim.theta, cfg.params, e, kind);
            std::ostringstream csv;
            if (sm_plot) {
                csv << "empirical,tw_quantile\n" << std::setprecision(17);
                for (const auto& [a, b] : prob_plot_data(z, tw_beta(e))) csv << a << ',' << b << '\n';
            } else {
                empirical_cdf(z, default_tw_grid(), cfg.reps, cfg.seed).write_csv(csv);
            }
            write_text(sm_out, csv.str(), out);
            if (!sm_out.empty() && sm_out != "-") {
                json in{{"p", sm_p}, {"m", sm_m}, {"n", sm_n}, {"reps", sm_reps}, {"seed", sm_seed},
                        {"chunks", sm_chunks}, {"scale", sm_scale}, {"ensemble", sm_ens}, {"plot_data", sm_plot},
                        {"out", sm_out}};
                json res{{"rows", sm_plot ? sim.theta.size() : default_tw_grid().size()},
                         {"factorization_failures", sim.factorization_failures}};
                const EdgeScaling sc = logit_scaling(cfg.params, e);
                out << envelope("simulate", in, res, sc.caveats).dump(2) << '\n';
            }
        } else if (tw->parsed()) {
            json in{{"beta", tw_beta_}};
            if (tw_qopt->count() > 0) {
                in["quantile"] = tw_q;
                const double s = tw_quantile(tw_beta_, tw_q);
                out << envelope("tw", in, json{{"prob", tw_q}, {"s", s}}, {}).dump(2) << '\n';
            } else if (tw_sopt->count() > 0) {
                in["s"] = tw_s;
                const TWValue v = tw_cdf_ex(tw_beta_, tw_s);
                Caveats cv;
                if (v.approximate) add_caveat(cv, caveat::extrapolated);
                out << envelope("tw", in, json{{"s", tw_s}, {"cdf", v.value}}, cv).dump(2) << '\n';
            } else {
                out << "s,cdf\n" << std::setprecision(17);
                for (double s : default_tw_grid()) out << s << ',' << tw_cdf(tw_beta_, s) << '\n';
            }
        } else if (lg->parsed()) {
            std::vector<double> errs;
            const EdgeVariable var = lg_var == "u" ? EdgeVariable::u : EdgeVariable::x;
            for (int N : lg_N) {
                const RateEntry r = lg_airy_error(N, lg_a * (N + 0.5), lg_b * (N + 0.5), var);
                errs.push_back(lg_deriv ? r.sup_deriv_error : r.sup_error);
            }
            std::ostringstream csv;
            RateReport::from(lg_N, errs).write_csv(csv);
            write_text(lg_out, csv.str(), out);
        } else if (kc->parsed()) {
            std::vector<double> errs;
            for (int N : kc_N)
                errs.push_back(kernel_edge_error(N, kc_a * (N + 0.5), kc_b * (N + 0.5),
                                                 kc_naive ? KernelScaling::naive : KernelScaling::averaged)
                                   .sup_error);
            std::ostringstream csv;
            RateReport::from(kc_N, errs).write_csv(csv);
            write_text(kc_out, csv.str(), out);
        } else if (sp->parsed()) {
            const Ensemble e = parse_ensemble(sp_ens);
            const StatParams s(sp_p, sp_m, sp_n);
            SimConfig cfg{s, e, sp_reps, sp_seed, sp_chunks, sp_threads};
            const WachterDensity W = wachter(s);
            std::vector<double> vals;
            for (const auto& ev : simulate_spectra(cfg))
                for (int i = 0; i < ev.size(); ++i)
                    if (s.p <= s.n || i >= s.p - s.n) vals.push_back(ev(i));
            const double ks = ks_distance(vals, [&](double t) { return wachter_cdf(W, t); });
            double mean = 0;
            for (double v : vals) mean += v;
            mean /= double(vals.size());
            const Angles a = angles_from_stat(s);
            const double half = std::sin(0.5 * a.gamma);
            json in{{"p", sp_p}, {"m", sp_m}, {"n", sp_n}, {"reps", sp_reps}, {"seed", sp_seed},
                    {"chunks", sp_chunks}, {"ensemble", sp_ens}};
            json res{{"theta_minus", W.theta_minus},
                     {"theta_plus", W.theta_plus},
                     {"normalization", W.normalization},
                     {"reference_normalization", 1.0 / (2.0 * std::numbers::pi * half * half)},
                     {"ks_distance", ks},
                     {"empirical_mean", mean},
                     {"wachter_mean", wachter_mean(W)},
                     {"eigenvalues", vals.size()}};
            if (!sp_out.empty()) {
                std::sort(vals.begin(), vals.end());
                std::ostringstream csv;
                csv << "theta,empirical_cdf,wachter_cdf\n" << std::setprecision(17);
                for (int i = 0; i <= 200; ++i) {
                    const double t = W.theta_minus + (W.theta_plus - W.theta_minus) * i / 200.0;
                    const double F = double(std::upper_bound(vals.begin(), vals.end(), t) - vals.begin()) / vals.size();
                    csv << t << ',' << F << ',' << wachter_cdf(W, t) << '\n';
                }
                write_text(sp_out, csv.str(), out);
            }
            out << envelope("spectrum", in, res, W.caveats).dump(2) << '\n';
        }
        return 0;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace twj::cli
