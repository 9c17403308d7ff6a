#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "midasvol/csv.hpp"
#include "midasvol/estimator.hpp"
#include "midasvol/evaluate.hpp"
#include "midasvol/log.hpp"
#include "midasvol/model.hpp"
#include "midasvol/stats.hpp"

namespace mv = midasvol;

namespace {

struct Options {
    std::string config_path;
    std::string returns_path;
    std::string macro_path;
    std::string macro_kind = "levels";
    std::vector<std::string> factors{"rv"};
    std::string mode = "rolling";
    int K = 36;
    int stride = 22;
    int window = 22;
    std::string link = "linear";
    std::string transform = "auto";
    bool free_omega1 = false;

    int restarts = 8;
    std::uint64_t seed = 0;
    int threads = 0;
    bool strict = false;
    std::string out;
    std::string path_out;
    bool annualize = false;

    int calib_years = 13;
    int refit_every = 22;
    std::string split;

    std::vector<std::string> reports;
    int robust_lags = 0;

    double mu = 0.0;
    double alpha = 0.05;
    double beta = 0.90;
    std::vector<double> theta{0.1};
    double omega1 = 1.0;
    double omega2 = 5.0;
    double m = 1e-4;
    int months = 120;
    int days_per_month = 22;
};

std::string trimmed(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        s = s.substr(1, s.size() - 2);
    return s;
}

// Flat key=value defaults, applied only to options the command line left
// untouched. '#' starts a comment; repeated keys feed list options.
void apply_config(CLI::App* cmd, const std::string& path) {
    std::string text = mv::read_file(path);
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> items;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(ln) +
                                        ": expected key=value");
        std::string key = trimmed(line.substr(0, eq));
        std::string val = trimmed(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(ln) + ": empty key");
        if (!items.count(key)) order.push_back(key);
        items[key].push_back(val);
    }
    for (const auto& key : order) {
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (!op) op = cmd->get_option_no_throw(key);
        if (!op || key == "config")
            throw std::invalid_argument(path + ": unknown key '" + key +
                                        "' for this command");
        if (op->count() > 0) continue;
        for (const auto& v : items[key]) op->add_result(v);
        op->run_callback();
    }
}

void add_model_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--factor", o.factors, "long-run factors: rv, gepu, gepu-change")
        ->capture_default_str();
    cmd->add_option("--mode", o.mode, "long-run window: fixed or rolling")
        ->check(CLI::IsMember({"fixed", "rolling"}))
        ->capture_default_str();
    cmd->add_option("--K", o.K, "number of lagged factor observations")->capture_default_str();
    cmd->add_option("--stride", o.stride, "days between rolling-window lags")
        ->capture_default_str();
    cmd->add_option("--window", o.window, "rolling window length in days")
        ->capture_default_str();
    cmd->add_option("--link", o.link, "long-run link: linear or exp")
        ->check(CLI::IsMember({"linear", "exp"}))
        ->capture_default_str();
    cmd->add_option("--macro-transform", o.transform,
                    "macro level transform: auto, identity, log, standardize")
        ->check(CLI::IsMember({"auto", "identity", "log", "standardize"}))
        ->capture_default_str();
}

void add_data_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--returns", o.returns_path,
                    "daily CSV, header date,price or date,return");
    cmd->add_option("--macro", o.macro_path, "monthly CSV, header month,value");
    cmd->add_option("--macro-kind", o.macro_kind,
                    "whether the macro file holds levels or log changes")
        ->check(CLI::IsMember({"levels", "changes"}))
        ->capture_default_str();
}

void add_fit_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--restarts", o.restarts, "jittered optimizer restarts")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "restart jitter seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    cmd->add_flag("--free-omega1", o.free_omega1, "estimate the first weight shape too");
    cmd->add_flag("--strict", o.strict, "exit 4 when the optimizer missed its tolerances");
}

mv::ModelSpec spec_from(const Options& o) {
    mv::ModelSpec s;
    s.factors.clear();
    for (const auto& f : o.factors) s.factors.push_back(mv::factor_from_name(f));
    s.mode = o.mode == "fixed" ? mv::WindowMode::fixed_span : mv::WindowMode::rolling;
    s.K = o.K;
    s.stride = o.stride;
    s.window = o.window;
    s.link = o.link == "exp" ? mv::TauLink::exponential : mv::TauLink::linear;
    if (o.transform == "identity")
        s.transform = mv::MacroTransform::identity;
    else if (o.transform == "log")
        s.transform = mv::MacroTransform::log_level;
    else if (o.transform == "standardize")
        s.transform = mv::MacroTransform::standardize;
    else
        s.transform = mv::MacroTransform::automatic;
    s.check();
    return s;
}

mv::AlignedPanel load_panel(const Options& o, const mv::ModelSpec& spec) {
    mv::DailySeries rs = mv::parse_daily(mv::read_file(o.returns_path), o.returns_path);
    std::map<std::string, mv::MonthlySeries> factors;
    bool have_macro = !o.macro_path.empty();
    mv::MonthlySeries macro;
    if (have_macro) macro = mv::parse_monthly_index(mv::read_file(o.macro_path), o.macro_path);
    if (spec.has_factor(mv::Factor::gepu)) {
        if (!have_macro || o.macro_kind != "levels")
            throw mv::DataError("the gepu factor needs --macro with level data");
        factors["gepu"] = macro;
    }
    if (spec.has_factor(mv::Factor::gepu_change)) {
        if (!have_macro) throw mv::DataError("the gepu-change factor needs --macro");
        factors["gepu_change"] = o.macro_kind == "levels" ? mv::log_changes(macro) : macro;
    }
    return mv::align(rs, factors);
}

mv::FitOptions fit_options(const Options& o) {
    mv::FitOptions fo;
    fo.restarts = o.restarts;
    fo.seed = o.seed;
    fo.threads = o.threads;
    fo.estimate_omega1 = o.free_omega1;
    return fo;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        mv::write_file(o.out, text);
}

int run_summary(const Options& o) {
    std::vector<mv::SummaryRow> rows;
    if (!o.returns_path.empty()) {
        mv::DailySeries rs = mv::parse_daily(mv::read_file(o.returns_path), o.returns_path);
        rows.push_back({"returns", mv::summary(rs.values), true, mv::adf_test(rs.values)});
    }
    if (!o.macro_path.empty()) {
        mv::MonthlySeries m = mv::parse_monthly_index(mv::read_file(o.macro_path), o.macro_path);
        if (o.macro_kind == "levels") {
            rows.push_back({"macro_level", mv::summary(m.values), true, mv::adf_test(m.values)});
            mv::MonthlySeries c = mv::log_changes(m);
            rows.push_back(
                {"macro_change", mv::summary(c.values), true, mv::adf_test(c.values)});
        } else {
            rows.push_back(
                {"macro_change", mv::summary(m.values), true, mv::adf_test(m.values)});
        }
    }
    if (rows.empty()) throw mv::DataError("summary: pass --returns and/or --macro");
    emit(o, mv::summary_table_csv(rows));
    return 0;
}

void print_fit(const mv::FitResult& r) {
    std::printf("model %s\n", r.spec.id().c_str());
    for (const auto& e : r.table) {
        if (std::isfinite(e.std_error))
            std::printf("  %-18s %14.6g  (%.4g) %s\n", e.name.c_str(), e.estimate,
                        e.std_error, e.stars.c_str());
        else
            std::printf("  %-18s %14.6g\n", e.name.c_str(), e.estimate);
    }
    std::printf("llf %.6f  bic %.6f  n_obs %zu  starts %d  converged %s\n", r.llf, r.bic,
                r.n_obs, r.starts_used, r.converged ? "yes" : "no");
}

int run_fit(const Options& o) {
    if (o.returns_path.empty()) throw std::invalid_argument("fit: --returns is required");
    mv::ModelSpec spec = spec_from(o);
    mv::AlignedPanel panel = load_panel(o, spec);
    mv::FitResult res = mv::fit(panel, spec, fit_options(o));
    print_fit(res);
    if (!o.out.empty()) mv::write_file(o.out, mv::fit_result_to_json(res));
    if (!o.path_out.empty()) {
        mv::VolatilityPath path = mv::ModelEngine(panel, spec).filter(res.params);
        mv::write_file(o.path_out, mv::path_to_csv(path, o.annualize));
    }
    if (o.strict && !res.converged) {
        std::cerr << "error: optimizer missed its tolerances\n";
        return 4;
    }
    return 0;
}

int run_eval(const Options& o) {
    if (o.returns_path.empty()) throw std::invalid_argument("eval: --returns is required");
    mv::ModelSpec spec = spec_from(o);
    mv::AlignedPanel panel = load_panel(o, spec);
    mv::EvalOptions eo;
    eo.calib_years = o.calib_years;
    eo.refit_every = o.refit_every;
    if (!o.split.empty()) eo.split = mv::Date::parse(o.split);
    eo.fit = fit_options(o);
    mv::ForecastSeries fs = mv::rolling_forecast(panel, spec, eo);
    mv::LossSummary ls = mv::loss(fs);
    std::printf("model %s  forecasts %zu  refits %d  split %s\n", fs.model_id.c_str(), ls.n,
                fs.refits, fs.split.str().c_str());
    std::printf("rmse %.8g  rmae %.8g  rmsd %.8g  rmad %.8g\n", ls.rmse, ls.rmae, ls.rmsd,
                ls.rmad);
    if (!o.out.empty()) mv::write_file(o.out, mv::forecast_to_json(fs));
    if (o.strict && !fs.converged) {
        std::cerr << "error: a calibration fit missed its tolerances\n";
        return 4;
    }
    return 0;
}

int run_dm(const Options& o) {
    if (o.reports.size() < 2)
        throw std::invalid_argument("dm: need at least two forecast reports");
    std::vector<mv::ForecastSeries> models;
    for (const auto& path : o.reports)
        models.push_back(mv::forecast_from_json(mv::read_file(path), path));
    emit(o, mv::dm_matrix_csv(models, o.robust_lags));
    return 0;
}

int run_simulate(const Options& o) {
    if (o.out.empty()) throw std::invalid_argument("simulate: --out is required");
    mv::ModelSpec spec = spec_from(o);
    if (o.theta.size() != spec.factors.size())
        throw std::invalid_argument("simulate: need one --theta per --factor");
    mv::ParamSet p;
    p.mu = o.mu;
    p.alpha = o.alpha;
    p.beta = o.beta;
    p.theta = o.theta;
    p.omega1 = o.omega1;
    p.omega2 = o.omega2;
    p.m = o.m;

    mv::SimulationResult sim = mv::simulate(p, spec, o.months, o.days_per_month, o.seed);

    std::filesystem::create_directories(o.out);
    auto join = [&](const char* name) {
        return (std::filesystem::path(o.out) / name).string();
    };
    std::string ret = "date,return\n";
    for (std::size_t i = 0; i < sim.panel.returns.size(); ++i)
        ret += sim.panel.returns.dates[i].str() + ',' +
               mv::format_double(sim.panel.returns.values[i]) + '\n';
    mv::write_file(join("returns.csv"), ret);

    const mv::MonthlySeries& lvl = sim.panel.factors.at("gepu");
    std::string mac = "month,value\n";
    for (std::size_t i = 0; i < lvl.months.size(); ++i)
        mac += lvl.months[i].str() + ',' + mv::format_double(lvl.values[i]) + '\n';
    mv::write_file(join("macro.csv"), mac);

    mv::write_file(join("path.csv"), mv::path_to_csv(sim.path, o.annualize));
    std::printf("wrote %zu days over %d months to %s\n", sim.panel.returns.size(), o.months,
                o.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    mv::set_log_level_from_env();
    Options o;

    CLI::App app{"mixed-frequency volatility toolkit"};
    app.require_subcommand(1);

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path,
                        "flat key=value defaults; explicit flags win");
    };

    CLI::App* sum = app.add_subcommand("summary", "descriptive statistics and unit-root tests");
    add_config(sum);
    add_data_flags(sum, o);
    sum->add_option("--out", o.out, "write the CSV table here instead of stdout");

    CLI::App* fit = app.add_subcommand("fit", "calibrate a model on a panel");
    add_config(fit);
    add_data_flags(fit, o);
    add_model_flags(fit, o);
    add_fit_flags(fit, o);
    fit->add_option("--out", o.out, "write the fit report JSON here");
    fit->add_option("--path", o.path_out, "write the filtered volatility path CSV here");
    fit->add_flag("--annualize", o.annualize, "add an annualized vol column to --path");

    CLI::App* ev = app.add_subcommand("eval", "out-of-sample one-step forecast evaluation");
    add_config(ev);
    add_data_flags(ev, o);
    add_model_flags(ev, o);
    add_fit_flags(ev, o);
    ev->add_option("--calib-years", o.calib_years, "trailing calibration window in years")
        ->capture_default_str();
    ev->add_option("--refit-every", o.refit_every,
                   "trading days between refits, <=0 fits once")
        ->capture_default_str();
    ev->add_option("--split", o.split, "first forecast day, YYYY-MM-DD");
    ev->add_option("--out", o.out, "write the forecast report JSON here");

    CLI::App* dm = app.add_subcommand("dm", "forecast-accuracy tests between saved reports");
    add_config(dm);
    dm->add_option("reports", o.reports, "forecast report JSON files");
    dm->add_option("--robust-lags", o.robust_lags,
                   "Newey-West lags for the test variance, 0 = plain")
        ->capture_default_str();
    dm->add_option("--out", o.out, "write the comparison CSV here instead of stdout");

    CLI::App* sim = app.add_subcommand("simulate", "draw a synthetic panel from the model");
    add_config(sim);
    add_model_flags(sim, o);
    sim->add_option("--mu", o.mu, "mean daily return")->capture_default_str();
    sim->add_option("--alpha", o.alpha, "short-run innovation weight")->capture_default_str();
    sim->add_option("--beta", o.beta, "short-run persistence")->capture_default_str();
    sim->add_option("--theta", o.theta, "long-run loadings, one per factor")
        ->capture_default_str();
    sim->add_option("--omega1", o.omega1, "first weight shape")->capture_default_str();
    sim->add_option("--omega2", o.omega2, "second weight shape")->capture_default_str();
    sim->add_option("--m", o.m, "long-run intercept")->capture_default_str();
    sim->add_option("--months", o.months, "months to draw")->capture_default_str();
    sim->add_option("--days-per-month", o.days_per_month, "trading days per month")
        ->capture_default_str();
    sim->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sim->add_option("--out", o.out, "directory for returns.csv, macro.csv, path.csv");
    sim->add_flag("--annualize", o.annualize, "add an annualized vol column to path.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!o.config_path.empty()) {
        CLI::App* active = nullptr;
        for (CLI::App* cmd : {sum, fit, ev, dm, sim})
            if (*cmd) active = cmd;
        try {
            apply_config(active, o.config_path);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << o.config_path << ": " << e.what() << "\n";
            return 2;
        } catch (const mv::DataError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        if (*sum) return run_summary(o);
        if (*fit) return run_fit(o);
        if (*ev) return run_eval(o);
        if (*dm) return run_dm(o);
        if (*sim) return run_simulate(o);
    } catch (const mv::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
