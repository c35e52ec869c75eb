#include "coin/cli.hpp"

#include "coin/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>

namespace coin {

namespace {

using Json = nlohmann::ordered_json;

struct Inputs {
    Panel panel;
    QuarterlyTarget gdp;
    std::string data_hash;
    std::optional<SimulatedPanel> sim;
    std::optional<SimulatedGdp> sim_gdp;
};

Inputs load_inputs(const RunConfig& rc)
{
    Inputs in;
    if (rc.mode == RunConfig::Mode::Real) {
        const RawPanel raw = load_fred_md(rc.panel_path, rc.ingest);
        in.panel = standardize(raw);
        in.gdp = build_quarterly_target(load_quarterly_csv(rc.gdp_path), in.panel.dates);
        in.data_hash = sha256_hex(file_sha256(rc.panel_path) + file_sha256(rc.gdp_path));
        return in;
    }
    const SimulationConfig& sc = rc.simulation;
    in.sim = simulate_panel(sc.dgp);
    in.sim_gdp = simulate_gdp(in.sim->truth, sc.dgp, sc.gdp_loading, sc.gdp_mu, sc.gdp_noise_sd, sc.gdp_seed);
    in.panel = in.sim->panel;
    in.gdp = in.sim_gdp->target;
    const std::vector<int> tcodes(static_cast<std::size_t>(in.panel.n()), 1);
    in.data_hash = sha256_hex(fred_md_csv(in.panel.series_ids, tcodes, in.sim->truth.x_raw, in.panel.dates) +
                              quarterly_csv(in.sim_gdp->quarter_dates, in.sim_gdp->levels));
    return in;
}

std::string num(double v) { return format_number(v, 10); }

std::string ranks_text(const RankSelection& r)
{
    return "q=" + std::to_string(r.q) + " r=" + std::to_string(r.r) + " r_phi=" + std::to_string(r.r_phi);
}

Json fit_json(const BandRegressionFit& fit)
{
    Json j;
    j["mu"] = fit.mu;
    j["theta"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
    j["sigma2"] = fit.sigma2;
    j["band_frequencies"] = fit.band.size();
    return j;
}

class Runner {
public:
    Runner(std::string command, const Config& config, std::ostream& log)
        : command_(std::move(command)), rc_(build_run_config(config)), log_(log)
    {
        config_hash_ = sha256_hex(config.canonical());
    }

    void run()
    {
        if (command_ == "simulate" && rc_.mode != RunConfig::Mode::Simulate)
            throw ConfigError("cli", "key 'mode': the simulate command needs mode = simulate");
        inputs_ = load_inputs(rc_);
        header_ = {command_, config_hash_, inputs_.data_hash};
        log_ << "coin " << command_ << ": config_hash=" << config_hash_ << " data_hash=" << inputs_.data_hash << "\n";
        log_ << "coin " << command_ << ": panel n=" << inputs_.panel.n() << " T=" << inputs_.panel.T() << " "
             << inputs_.panel.dates.front().str() << ".." << inputs_.panel.dates.back().str() << "\n";
        if (command_ == "nowcast") nowcast();
        else if (command_ == "evaluate") evaluate_cmd();
        else if (command_ == "bootstrap") bootstrap();
        else if (command_ == "simulate") simulate();
        else if (command_ == "target") target();
        else throw ConfigError("cli", "unknown command '" + command_ + "'");
    }

private:
    void write(const std::string& name, const std::string& content)
    {
        write_file(rc_.output_dir / name, content);
        log_ << "coin " << command_ << ": wrote " << (rc_.output_dir / name).string() << "\n";
    }

    void write_table(const std::string& name, const CsvTable& table) { write(name, table.render(header_)); }

    void write_json(const std::string& name, Json body)
    {
        Json j;
        j["header"] = header_.line();
        j["config_hash"] = header_.config_hash;
        j["data_hash"] = header_.data_hash;
        for (auto& [k, v] : body.items()) j[k] = v;
        write(name, j.dump(2) + "\n");
    }

    GdpData full_sample_gdp() const { return gdp_samples(inputs_.gdp, 0, inputs_.panel.T()); }

    SpectrumEstimate<double> spectrum_of(const Eigen::MatrixXd& x) const
    {
        return bartlett_spectrum(cross_covariances(x, rc_.model.M_T), rc_.model.m);
    }

    void nowcast()
    {
        const ModelFit fit = run_uscoin(inputs_.panel.x, full_sample_gdp(), rc_.model);
        log_ << "coin nowcast: ranks " << ranks_text(fit.ranks) << " window=full sample\n";

        const bool truth = inputs_.sim_gdp.has_value();
        std::vector<std::string> cols{"date", "monthly", "qoq", "yoy"};
        if (truth) cols.insert(cols.end(), {"true_monthly", "true_qoq", "true_yoy"});
        CsvTable table(cols);
        for (Index t = 0; t < inputs_.panel.T(); ++t) {
            std::vector<std::string> row{inputs_.panel.dates[static_cast<std::size_t>(t)].str(),
                                         num(fit.nowcast.monthly(t)), num(fit.nowcast.qoq(t)), num(fit.nowcast.yoy(t))};
            if (truth) {
                const SimulatedGdp& g = *inputs_.sim_gdp;
                row.insert(row.end(), {num(g.m2lr_monthly(t)), num(g.m2lr_qoq(t)), num(g.m2lr_yoy(t))});
            }
            table.add_row(std::move(row));
        }
        write_table("nowcast.csv", table);

        Json j;
        j["ranks"] = {{"q", fit.ranks.q}, {"r", fit.ranks.r}, {"r_phi", fit.ranks.r_phi}};
        j["spectral"] = {{"M_T", rc_.model.M_T}, {"m", rc_.model.m}, {"theta_c", rc_.model.theta_c}};
        j["sample"] = {{"first", inputs_.panel.dates.front().str()}, {"last", inputs_.panel.dates.back().str()},
                       {"n", inputs_.panel.n()}, {"T", inputs_.panel.T()}};
        j["qoq"] = fit_json(fit.fit_q);
        j["yoy"] = fit_json(fit.fit_a);
        write_json("nowcast.json", j);
    }

    void target()
    {
        const TargetSeries ts = build_target(inputs_.gdp, rc_.target);
        CsvTable table({"date", "qoq_target", "yoy_target"});
        for (Index t = 0; t < ts.size(); ++t)
            table.add_row({ts.dates[static_cast<std::size_t>(t)].str(), num(ts.qoq_target(t)), num(ts.yoy_target(t))});
        write_table("target.csv", table);
        if (ts.first_valid >= 0)
            log_ << "coin target: valid " << ts.dates[static_cast<std::size_t>(ts.first_valid)].str() << ".."
                 << ts.dates[static_cast<std::size_t>(ts.last_valid)].str() << "\n";
    }

    // Target values on the panel calendar.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> target_on_panel() const
    {
        const TargetSeries ts = build_target(inputs_.gdp, rc_.target);
        const Index T = inputs_.panel.T();
        Eigen::VectorXd q = Eigen::VectorXd::Constant(T, kMissing), a = q;
        for (Index t = 0; t < T; ++t) {
            const Index at = inputs_.panel.dates[static_cast<std::size_t>(t)] - ts.dates.front();
            if (at < 0 || at >= ts.size()) continue;
            q(t) = ts.qoq_target(at);
            a(t) = ts.yoy_target(at);
        }
        return {q, a};
    }

    static void add_decile_columns(std::vector<std::string>& cols, const std::string& prefix)
    {
        for (int d = 1; d <= 9; ++d) cols.push_back(prefix + "_p" + std::to_string(10 * d));
    }

    void bootstrap()
    {
        const Eigen::MatrixXd& x = inputs_.panel.x;
        const GdpData gdp = full_sample_gdp();
        const SpectrumEstimate<double> spectrum = spectrum_of(x);
        const RankSelection ranks = choose_ranks(x, spectrum, rc_.model);
        log_ << "coin bootstrap: ranks " << ranks_text(ranks) << " B=" << rc_.bootstrap.B << "\n";
        const BootstrapEnsemble ens = bootstrap_nowcasts(spectrum, x, gdp, ranks, rc_.model, rc_.bootstrap);
        log_ << "coin bootstrap: wishart dof " << ens.nu << "\n";

        std::vector<std::string> cols{"date"};
        add_decile_columns(cols, "qoq");
        add_decile_columns(cols, "yoy");
        CsvTable deciles(cols);
        const auto [tq, ta] = target_on_panel();
        CsvTable pit({"date", "target_qoq", "pit_qoq", "target_yoy", "pit_yoy"});
        const Eigen::VectorXd pq = pit_values(ens.qoq_draws, tq), pa = pit_values(ens.yoy_draws, ta);
        for (Index t = 0; t < ens.T(); ++t) {
            const std::string date = inputs_.panel.dates[static_cast<std::size_t>(t)].str();
            std::vector<std::string> row{date};
            for (int d = 0; d < 9; ++d) row.push_back(num(ens.qoq_deciles(d, t)));
            for (int d = 0; d < 9; ++d) row.push_back(num(ens.yoy_deciles(d, t)));
            deciles.add_row(std::move(row));
            pit.add_row({date, num(tq(t)), num(pq(t)), num(ta(t)), num(pa(t))});
        }
        write_table("deciles.csv", deciles);
        write_table("pit.csv", pit);
        if (rc_.save_draws) {
            write("draws_qoq.bin", encode_draws(ens.qoq_draws, Horizon::Quarterly));
            write("draws_yoy.bin", encode_draws(ens.yoy_draws, Horizon::Annual));
        }
    }

    void simulate()
    {
        const SimulatedPanel& sp = *inputs_.sim;
        const SimulatedGdp& g = *inputs_.sim_gdp;
        const std::vector<int> tcodes(static_cast<std::size_t>(sp.panel.n()), 1);
        write("panel.csv", header_.line() + "\n" + fred_md_csv(sp.panel.series_ids, tcodes, sp.truth.x_raw, sp.panel.dates));
        write("gdp.csv", header_.line() + "\n" + quarterly_csv(g.quarter_dates, g.levels));

        const Eigen::MatrixXd f = sp.truth.smooth_factors(rc_.simulation.dgp);
        std::vector<std::string> cols{"date"};
        for (Index k = 0; k < f.rows(); ++k) cols.push_back("f_phi" + std::to_string(k + 1));
        cols.insert(cols.end(), {"dy", "m2lr_monthly", "m2lr_qoq", "m2lr_yoy"});
        CsvTable truth(cols);
        for (Index t = 0; t < f.cols(); ++t) {
            std::vector<std::string> row{sp.panel.dates[static_cast<std::size_t>(t)].str()};
            for (Index k = 0; k < f.rows(); ++k) row.push_back(num(f(k, t)));
            row.insert(row.end(), {num(g.dy(t)), num(g.m2lr_monthly(t)), num(g.m2lr_qoq(t)), num(g.m2lr_yoy(t))});
            truth.add_row(std::move(row));
        }
        write_table("truth.csv", truth);
    }

    void evaluate_cmd()
    {
        RollingOptions opt = rc_.rolling;
        std::vector<std::string> warnings;
        const EvalReport report = evaluate(inputs_.panel, inputs_.gdp, rc_.plan, rc_.methods, opt, &warnings);
        for (const auto& w : warnings) log_ << "coin evaluate: warning: " << w << "\n";
        for (const auto& p : report.paths)
            if (p.method == Method::USCOIN || p.method == Method::SW)
                log_ << "coin evaluate: " << to_string(p.method) << " ranks " << ranks_text(p.ranks)
                     << " window=" << rc_.plan.window_length << " months, ranks held fixed across windows\n";

        CsvTable table({"panel", "method", "msne", "msre", "count"});
        for (Horizon h : {Horizon::Quarterly, Horizon::Annual})
            for (const auto& row : report.rows)
                if (row.horizon == h)
                    table.add_row({std::string(to_string(h)), std::string(to_string(row.method)), num(row.stats.msne),
                                   num(row.stats.msre), std::to_string(row.stats.count)});
        write_table("table1.csv", table);

        if (rc_.methods.size() > 1) {
            CsvTable dm({"panel", "first", "second", "stat", "p_value", "lags", "degenerate"});
            for (const auto& e : report.dm)
                dm.add_row({std::string(to_string(e.horizon)), std::string(to_string(e.first)),
                            std::string(to_string(e.second)), num(e.test.stat), num(e.test.p_value),
                            std::to_string(e.test.lags), e.test.degenerate ? "1" : "0"});
            write_table("dm.csv", dm);
        }

        std::vector<std::string> cols{"date", "target_qoq", "target_yoy"};
        for (const auto& p : report.paths) {
            const std::string m(to_string(p.method));
            cols.insert(cols.end(), {m + "_qoq", m + "_yoy"});
        }
        CsvTable paths(cols);
        for (std::size_t k = 0; k < report.dates.size(); ++k) {
            const Index i = static_cast<Index>(k);
            std::vector<std::string> row{report.dates[k].str(), num(report.target_q(i)), num(report.target_a(i))};
            for (const auto& p : report.paths) row.insert(row.end(), {num(p.nowcast_q(i)), num(p.nowcast_a(i))});
            paths.add_row(std::move(row));
        }
        write_table("paths.csv", paths);

        if (rc_.evaluate_pit) rolling_pit(report);
    }

    // Per-window Wishart ensembles of the US COIN nowcast at the window end.
    void rolling_pit(const EvalReport& report)
    {
        std::optional<RankSelection> ranks = rc_.rolling.ranks;
        for (const auto& p : report.paths)
            if (!ranks && (p.method == Method::USCOIN || p.method == Method::SW)) ranks = p.ranks;
        const Index W = rc_.plan.window_length;
        const Index count = static_cast<Index>(report.dates.size());
        Eigen::MatrixXd dq(rc_.bootstrap.B, count), da(rc_.bootstrap.B, count);
        for (Index k = 0; k < count; ++k) {
            const Index s = report.dates[static_cast<std::size_t>(k)] - inputs_.panel.dates.front();
            const Index start = s - W + 1;
            const Eigen::MatrixXd x = zscore_rows(inputs_.panel.x.middleCols(start, W));
            const SpectrumEstimate<double> spectrum = spectrum_of(x);
            if (!ranks) ranks = choose_ranks(x, spectrum, rc_.model);
            WishartConfig wc = rc_.bootstrap;
            wc.seed = rc_.bootstrap.seed + static_cast<std::uint64_t>(k);
            const BootstrapEnsemble ens =
                bootstrap_nowcasts(spectrum, x, gdp_samples(inputs_.gdp, start, W), *ranks, rc_.model, wc);
            dq.col(k) = ens.qoq_draws.col(W - 1);
            da.col(k) = ens.yoy_draws.col(W - 1);
        }
        const PitCalibration cq = pit_calibration(pit_values(dq, report.target_q));
        const PitCalibration ca = pit_calibration(pit_values(da, report.target_a));

        CsvTable grid({"u", "cdf_qoq", "cdf_yoy"});
        for (Index i = 0; i < cq.grid.size(); ++i) grid.add_row({num(cq.grid(i)), num(cq.cdf(i)), num(ca.cdf(i))});
        write_table("pit_grid.csv", grid);
        CsvTable summary({"panel", "count", "ks", "band", "inside"});
        for (const auto& [h, c] : {std::pair{Horizon::Quarterly, &cq}, std::pair{Horizon::Annual, &ca}})
            summary.add_row({std::string(to_string(h)), std::to_string(c->pits.size()), num(c->ks), num(c->band),
                             c->inside() ? "1" : "0"});
        write_table("pit_calibration.csv", summary);
    }

    std::string command_;
    RunConfig rc_;
    std::ostream& log_;
    std::string config_hash_;
    Inputs inputs_;
    OutputHeader header_;
};

int exit_code_of(const Error& e)
{
    if (dynamic_cast<const DataError*>(&e)) return kExitData;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    return kExitConfig;
}

// "--key=value" or "--key value" left over by the parser.
void apply_extras(Config& config, const std::vector<std::string>& extras)
{
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0) throw ConfigError("cli", "unexpected argument '" + a + "'");
        const std::string body = a.substr(2);
        if (body.find('=') != std::string::npos) {
            config.apply_override(body);
        } else {
            if (i + 1 >= extras.size()) throw ConfigError("cli", "flag '" + a + "' needs a value");
            config.set(body, extras[++i]);
        }
    }
}

}  // namespace

void run_command(const std::string& command, const Config& config, std::ostream& log)
{
    Runner(command, config, log).run();
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Smooth generalized principal components nowcasting engine", "coin_cli"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> sets;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"nowcast", "Estimate the model on the full sample and write monthly nowcasts"},
        {"evaluate", "Pseudo-real-time rolling evaluation against the oracle target"},
        {"bootstrap", "Wishart resampling of the spectral estimate; decile bands and PIT inputs"},
        {"simulate", "Write a synthetic panel, GDP series and ground truth"},
        {"target", "Write the low-pass oracle target"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", sets, "override a configuration key (key=value), repeatable");
        sub->allow_extras();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        Config config = config_path.empty() ? Config{} : Config::load(config_path);
        for (const auto& s : sets) config.apply_override(s);
        apply_extras(config, chosen->remaining());
        run_command(chosen->get_name(), config, std::cerr);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "coin " << chosen->get_name() << ": error: " << e.what() << "\n";
        return exit_code_of(e);
    } catch (const std::exception& e) {
        std::cerr << "coin " << chosen->get_name() << ": error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace coin
