#include "lrbench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>
#include <vector>

#include "lrbench/costmodel.hpp"
#include "lrbench/errors.hpp"
#include "lrbench/harness.hpp"
#include "lrbench/report_io.hpp"

namespace lrbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using lrsys::SystemId;

namespace {

struct Output {
    std::string file;
    std::string body;
};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Candidate key names mentioned by a diagnostic, most specific first.
std::vector<std::string> keys_in(const std::string& message) {
    std::vector<std::string> keys;
    static const std::regex quoted("\"([^\"]+)\"");
    std::vector<std::string> q;
    for (std::sregex_iterator it(message.begin(), message.end(), quoted), end; it != end; ++it) {
        q.push_back((*it)[1].str());
    }
    keys.insert(keys.end(), q.rbegin(), q.rend());
    // Leading "a.b.c:" prefix.
    static const std::regex prefix("^([A-Za-z_][A-Za-z0-9_.]*):");
    std::smatch m;
    if (std::regex_search(message, m, prefix)) {
        std::string path = m[1].str();
        std::vector<std::string> parts;
        std::stringstream ss(path);
        for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
        keys.insert(keys.end(), parts.rbegin(), parts.rend());
    }
    return keys;
}

bool wants_json(OutputFormat f) { return f != OutputFormat::Csv; }
bool wants_csv(OutputFormat f) { return f != OutputFormat::Json; }

int write_outputs(const CliCommand& cmd, const std::vector<Output>& outputs, std::ostream& out,
                  std::ostream& err) {
    const fs::path dir(cmd.out_dir);
    if (!cmd.force) {
        for (const auto& o : outputs) {
            if (fs::exists(dir / o.file)) {
                err << "error: " << (dir / o.file).string()
                    << " already exists; refusing to overwrite (pass --force)\n";
                return kExitExists;
            }
        }
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
        return kExitConfig;
    }
    for (const auto& o : outputs) {
        std::ofstream f(dir / o.file, std::ios::binary | std::ios::trunc);
        f << o.body;
        if (!f) {
            err << "error: failed to write " << (dir / o.file).string() << "\n";
            return kExitConfig;
        }
    }
    for (const auto& o : outputs) out << "wrote " << (dir / o.file).string() << "\n";
    return kExitOk;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

int cmd_rank(const CliCommand& cmd, harness::ExperimentConfig cfg, bool calibrate_only,
             std::ostream& out, std::ostream& err) {
    const harness::EvalReport rep = harness::run_experiment(cfg);
    std::vector<Output> outputs;
    if (calibrate_only) {
        json j = json::object();
        json cal = json::object();
        for (const auto& [s, c] : rep.calibration) cal[std::string(lrsys::to_string(s))] = report::to_json(c);
        j["calibration"] = cal;
        j["config"] = harness::to_json(rep.config);
        j["warnings"] = rep.warnings;
        if (wants_json(cmd.format)) outputs.push_back({"report.json", dump(j)});
        if (wants_csv(cmd.format)) outputs.push_back({"calibration.csv", report::calibration_csv(rep)});
    } else {
        if (wants_json(cmd.format)) outputs.push_back({"report.json", dump(report::to_json(rep))});
        if (wants_csv(cmd.format)) {
            outputs.push_back({"cases.csv", report::cases_csv(rep)});
            outputs.push_back({"calibration.csv", report::calibration_csv(rep)});
            outputs.push_back({"scores.csv", report::scores_csv(rep)});
            if (rep.config.oracle_check) outputs.push_back({"oracle.csv", report::oracle_csv(rep.oracle_grid)});
        }
    }
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;

    out << cmd.command << ": " << rep.systems.size() << " systems, " << cfg.n_cases << " cases, rule "
        << scoring::to_string(cfg.rule) << ", seed " << cfg.master_seed << "\n";
    for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
    std::size_t cal_fail = 0;
    for (const auto& [s, v] : rep.per_system) {
        const auto& c = rep.calibration.at(s);
        const bool cal_ok = c.passes(3.0);
        cal_fail += cal_ok ? 0 : 1;
        out << "  " << std::left << std::setw(10) << lrsys::to_string(s) << std::right << " mean "
            << std::setw(9) << fixed(v.mean_score) << "  se " << fixed(v.std_error, 5) << "  calibration "
            << (cal_ok ? "ok" : "FAIL") << "  max gap " << fixed(c.max_abs_gap) << "\n";
    }
    std::size_t oracle_fail = 0;
    for (const auto& g : rep.oracle_grid) oracle_fail += g.diff_in_se() < 3.0 ? 0 : 1;
    if (rep.config.oracle_check) {
        out << "oracle: " << rep.oracle_grid.size() - oracle_fail << "/" << rep.oracle_grid.size()
            << " grid points within 3 bootstrap SE\n";
    }
    if (calibrate_only) return cal_fail == 0 ? kExitOk : kExitFailed;
    for (const auto& v : rep.ranking_verdicts) {
        if (v.status == harness::VerdictStatus::Violated) {
            out << "  VIOLATED " << v.claim_id << " (" << fixed(v.margin_in_se, 2) << " SE)\n";
        }
    }
    out << "verdicts: Confirmed " << rep.count(harness::VerdictStatus::Confirmed) << ", Tie "
        << rep.count(harness::VerdictStatus::Tie) << ", Violated "
        << rep.count(harness::VerdictStatus::Violated) << "\n";
    const bool ok = rep.count(harness::VerdictStatus::Violated) == 0 && oracle_fail == 0;
    return ok ? kExitOk : kExitFailed;
}

int cmd_illcond(const CliCommand& cmd, const harness::ExperimentConfig& cfg, std::ostream& out,
                std::ostream& err) {
    const auto r = harness::ill_conditioning_experiment(cfg.world, cfg.n_cases, cfg.master_seed, cfg.rule);
    std::vector<Output> outputs;
    if (wants_json(cmd.format)) {
        outputs.push_back({"report.json", dump({{"ill_conditioning", report::to_json(r)},
                                                {"world", genmodel::to_json(cfg.world)},
                                                {"rule", std::string(scoring::to_string(cfg.rule))},
                                                {"master_seed", cfg.master_seed}})});
    }
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;
    out << "illcond: " << r.n_cases << " cases\n"
        << "  naive  mean " << fixed(r.naive.mean) << "  se " << fixed(r.naive.std_error, 5) << "\n"
        << "  proper mean " << fixed(r.proper.mean) << "  se " << fixed(r.proper.std_error, 5) << "\n"
        << "  joint  mean " << fixed(r.joint.mean) << "  se " << fixed(r.joint.std_error, 5) << "\n"
        << "  proper - naive " << fixed(r.gap_mean, 5) << " (" << fixed(r.gap_in_se, 2) << " SE)\n"
        << "  max relative error proper vs joint " << r.max_rel_err_proper_vs_joint << "\n";
    return r.max_rel_err_proper_vs_joint < 1e-9 ? kExitOk : kExitFailed;
}

int cmd_csprior(const CliCommand& cmd, const harness::ExperimentConfig& cfg, std::ostream& out,
                std::ostream& err) {
    const auto r = harness::cs_update_ss_prior_experiment(cfg.world, cfg.n_cases, cfg.master_seed, cfg.rule);
    std::vector<Output> outputs;
    if (wants_json(cmd.format)) {
        outputs.push_back({"report.json", dump({{"cs_prior", report::to_json(r)},
                                                {"world", genmodel::to_json(cfg.world)},
                                                {"rule", std::string(scoring::to_string(cfg.rule))},
                                                {"master_seed", cfg.master_seed}})});
    }
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;
    out << "csprior: " << r.n_cases << " cases\n"
        << "  prior only     " << fixed(r.prior_only.mean) << "\n"
        << "  CSFLR-updated  " << fixed(r.csflr_updated.mean) << "  "
        << harness::to_string(r.csflr_vs_prior.status) << " (" << fixed(r.csflr_vs_prior.margin_in_se, 2) << " SE)\n"
        << "  CSSLR-updated  " << fixed(r.csslr_updated.mean) << "  "
        << harness::to_string(r.csslr_vs_prior.status) << " (" << fixed(r.csslr_vs_prior.margin_in_se, 2) << " SE)\n"
        << "  popC != popD (descriptive): CSFLR gap " << fixed(r.violating_csflr_gap, 5) << " +- "
        << fixed(r.violating_csflr_gap_se, 5) << ", CSSLR gap " << fixed(r.violating_csslr_gap, 5)
        << " +- " << fixed(r.violating_csslr_gap_se, 5) << "\n";
    const bool ok = r.csflr_vs_prior.status != harness::VerdictStatus::Violated &&
                    r.csslr_vs_prior.status != harness::VerdictStatus::Violated;
    return ok ? kExitOk : kExitFailed;
}

int cmd_tailbound(const CliCommand& cmd, const harness::ExperimentConfig& cfg, std::ostream& out,
                  std::ostream& err) {
    json systems = json::array();
    std::ostringstream csv;
    csv << "system,k,h2_exceedance,h1_exceedance,bound,pass\n";
    std::size_t failures = 0;
    std::vector<SystemId> sys = cfg.systems;
    std::sort(sys.begin(), sys.end());
    out << "tailbound: " << cfg.n_cases << " cases per hypothesis\n";
    for (SystemId s : sys) {
        if (s == SystemId::PriorOnly) continue;
        std::optional<genmodel::WorldConfig> model;
        if (auto it = cfg.model_overrides.find(s); it != cfg.model_overrides.end()) model = it->second;
        const auto rows = costmodel::tail_bound_check(s, cfg.world, cfg.n_cases, cfg.tail_k, cfg.master_seed, model);
        systems.push_back(report::tail_to_json(s, rows));
        for (const auto& r : rows) {
            failures += r.pass() ? 0 : 1;
            csv << lrsys::to_string(s) << ',' << report::format_double(r.k) << ','
                << report::format_double(r.h2_exceedance) << ',' << report::format_double(r.h1_exceedance)
                << ',' << report::format_double(r.bound) << ',' << (r.pass() ? "true" : "false") << '\n';
            out << "  " << std::left << std::setw(10) << lrsys::to_string(s) << std::right << " k "
                << std::setw(5) << r.k << "  P(LR>k|H2) " << fixed(r.h2_exceedance, 5) << "  P(LR<1/k|H1) "
                << fixed(r.h1_exceedance, 5) << "  bound " << fixed(r.bound, 5) << "  "
                << (r.pass() ? "ok" : "FAIL") << "\n";
        }
    }
    std::vector<Output> outputs;
    if (wants_json(cmd.format)) {
        outputs.push_back({"report.json", dump({{"tail_bounds", systems},
                                                {"n_cases", cfg.n_cases},
                                                {"master_seed", cfg.master_seed},
                                                {"world", genmodel::to_json(cfg.world)}})});
    }
    if (wants_csv(cmd.format)) outputs.push_back({"tailbound.csv", csv.str()});
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;
    return failures == 0 ? kExitOk : kExitFailed;
}

int cmd_demand(const CliCommand& cmd, const harness::ExperimentConfig& cfg, std::ostream& out,
               std::ostream& err) {
    const auto profiles = costmodel::demand_table(cfg.demand_lr_min, cfg.demand_lr_max);
    const auto trade = costmodel::feasibility_rank();
    std::vector<Output> outputs;
    if (wants_json(cmd.format)) {
        outputs.push_back({"report.json", dump({{"demand", report::to_json(profiles)},
                                                {"tradeoff", report::to_json(trade)},
                                                {"lr_min", cfg.demand_lr_min},
                                                {"lr_max", cfg.demand_lr_max}})});
    }
    if (wants_csv(cmd.format)) {
        outputs.push_back({"demand.csv", costmodel::demand_csv(profiles)});
        outputs.push_back({"tradeoff.csv", costmodel::tradeoff_csv(trade)});
    }
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;
    out << "demand: LR range [" << cfg.demand_lr_min << ", " << cfg.demand_lr_max << "], "
        << costmodel::required_h1_scores(cfg.demand_lr_min) << " H1 / "
        << costmodel::required_h2_scores(cfg.demand_lr_max) << " H2 scores\n";
    for (const auto& r : trade) {
        out << "  " << std::left << std::setw(10) << lrsys::to_string(r.system) << std::right
            << " performance " << r.performance_rank << "  demand " << r.demand_rank << "  loss "
            << costmodel::info_loss_string(r.info_loss_dims) << (r.infeasible ? "  infeasible" : "")
            << (r.favourable ? "  favourable" : "") << "\n";
    }
    return kExitOk;
}

int cmd_oracle(const CliCommand& cmd, const harness::ExperimentConfig& cfg, std::ostream& out,
               std::ostream& err) {
    std::vector<SystemId> sys;
    for (SystemId s : cfg.systems) {
        if (s != SystemId::PriorOnly) sys.push_back(s);
    }
    std::sort(sys.begin(), sys.end());
    const auto grid = oracle::path_oracle_grid(sys, cfg.world, cfg.oracle, cfg.master_seed);
    std::size_t fails = 0;
    for (const auto& g : grid) fails += g.diff_in_se() < 3.0 ? 0 : 1;
    std::vector<Output> outputs;
    if (wants_json(cmd.format)) {
        outputs.push_back({"report.json", dump({{"oracle_grid", report::to_json(grid)},
                                                {"n_paths", cfg.oracle.n_paths},
                                                {"master_seed", cfg.master_seed},
                                                {"world", genmodel::to_json(cfg.world)}})});
    }
    if (wants_csv(cmd.format)) outputs.push_back({"oracle.csv", report::oracle_csv(grid)});
    if (int rc = write_outputs(cmd, outputs, out, err); rc != kExitOk) return rc;
    double worst = 0.0;
    for (const auto& g : grid) worst = std::max(worst, g.diff_in_se());
    out << "oracle-check: " << grid.size() - fails << "/" << grid.size()
        << " grid points within 3 bootstrap SE (worst " << fixed(worst, 2) << " SE) at "
        << cfg.oracle.n_paths << " paths per term\n";
    return fails == 0 ? kExitOk : kExitFailed;
}

}  // namespace

std::string locate_config_error(const std::string& path, const std::string& text,
                                const std::string& message) {
    for (const auto& key : keys_in(message)) {
        const std::regex pattern("\"" + std::regex_replace(key, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                                 "\"\\s*:");
        std::smatch m;
        if (std::regex_search(text, m, pattern)) {
            const auto offset = static_cast<std::size_t>(m.position(0));
            return path + ":" + std::to_string(line_of_offset(text, offset)) + ": error: " + message;
        }
    }
    return path + ": error: " + message;
}

int run(const CliCommand& cmd, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> commands = {"rank",   "illcond",  "csprior",     "tailbound",
                                                      "demand", "calibrate", "oracle-check"};
    if (std::find(commands.begin(), commands.end(), cmd.command) == commands.end()) {
        err << "error: unknown command \"" << cmd.command << "\"\n";
        return kExitConfig;
    }

    harness::ExperimentConfig cfg;
    if (!cmd.config_path.empty()) {
        std::ifstream f(cmd.config_path, std::ios::binary);
        if (!f) {
            err << "error: config not found: " << cmd.config_path << "\n";
            return kExitConfig;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        const std::string text = ss.str();
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            err << cmd.config_path << ":" << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)
                << ": error: invalid JSON: " << e.what() << "\n";
            return kExitConfig;
        }
        try {
            cfg = harness::experiment_from_json(j);
            harness::validate(cfg);
        } catch (const ConfigError& e) {
            err << locate_config_error(cmd.config_path, text, e.what()) << "\n";
            return kExitConfig;
        }
    }
    if (cmd.seed) cfg.master_seed = *cmd.seed;
    if (cmd.cases) cfg.n_cases = *cmd.cases;
    if (cmd.rule) cfg.rule = *cmd.rule;
    if (cmd.paths) cfg.oracle.n_paths = *cmd.paths;

    try {
        if (cmd.command != "demand" && cmd.command != "oracle-check") harness::validate(cfg);
        if (cmd.command == "oracle-check") oracle::validate(cfg.oracle);
        if (cmd.command == "rank") return cmd_rank(cmd, cfg, false, out, err);
        if (cmd.command == "calibrate") return cmd_rank(cmd, cfg, true, out, err);
        if (cmd.command == "illcond") return cmd_illcond(cmd, cfg, out, err);
        if (cmd.command == "csprior") return cmd_csprior(cmd, cfg, out, err);
        if (cmd.command == "tailbound") return cmd_tailbound(cmd, cfg, out, err);
        if (cmd.command == "demand") return cmd_demand(cmd, cfg, out, err);
        return cmd_oracle(cmd, cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CaseError& e) {
        err << "error: evaluation failed at case " << e.case_index() << ": " << e.what() << "\n";
        return kExitEvaluation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitEvaluation;
    }
}

}  // namespace lrbench::cli
