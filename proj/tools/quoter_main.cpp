// quoter -- command-line front end. Parses key = value configs, dispatches
// to the library through the C API, and emits CSV artifacts plus readable
// summaries. Exit codes: 0 success, 2 config error, 3 solver stability
// error, 4 verification failure.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "quoter.h"

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Line-oriented "section.key = value" config; '#' starts a comment line.
class Config {
public:
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": empty key or value");
            kv_[key] = value;
        }
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double num(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            throw ConfigError("missing required config key: " + key);
        char* end = nullptr;
        double v = std::strtod(it->second.c_str(), &end);
        if (end == it->second.c_str() || *end != '\0')
            throw ConfigError("config key " + key + ": not a number: " + it->second);
        return v;
    }

    double num_or(const std::string& key, double dflt) const {
        return has(key) ? num(key) : dflt;
    }

    long integer(const std::string& key) const {
        double v = num(key);
        long n = static_cast<long>(v);
        if (static_cast<double>(n) != v)
            throw ConfigError("config key " + key + ": expected an integer");
        return n;
    }

    long integer_or(const std::string& key, long dflt) const {
        return has(key) ? integer(key) : dflt;
    }

    bool flag_or(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        const std::string& v = kv_.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key " + key + ": expected a boolean");
    }

private:
    std::map<std::string, std::string> kv_;
};

[[noreturn]] void die(quoter_status st) {
    std::fprintf(stderr, "error (%s): %s\n", quoter_status_name(st),
                 quoter_last_error());
    int code = 1;
    switch (st) {
        case QUOTER_ERR_CFL_VIOLATION: code = 3; break;
        case QUOTER_ERR_INVALID_CONFIG:
        case QUOTER_ERR_INVALID_PARAMS:
        case QUOTER_ERR_INVALID_ARGUMENT:
        case QUOTER_ERR_INVALID_TIME:
        case QUOTER_ERR_GRID_TOO_SMALL: code = 2; break;
        default: code = 1; break;
    }
    std::exit(code);
}

void check(quoter_status st) {
    if (st != QUOTER_OK) die(st);
}

quoter_params params_from(const Config& cfg) {
    quoter_params p;
    p.sigma = cfg.num("model.sigma");
    p.gamma = cfg.num("model.gamma");
    p.big_a = cfg.num("model.big_a");
    p.kappa = cfg.num("model.kappa");
    p.horizon_t = cfg.num("model.horizon_t");
    p.discount_w = cfg.num_or("model.discount_w", 0.0);
    return p;
}

quoter_grid_spec grid_from(const Config& cfg, const quoter_params& p) {
    quoter_grid_spec g;
    g.s_min = cfg.num_or("grid.s_min", 50.0);
    g.s_max = cfg.num_or("grid.s_max", 150.0);
    g.n_s = static_cast<int>(cfg.integer_or("grid.n_s", 200));
    g.n_t = cfg.integer_or("grid.n_t", 0);
    g.q_min = static_cast<int>(cfg.integer_or("grid.q_min", -5));
    g.q_max = static_cast<int>(cfg.integer_or("grid.q_max", 5));
    if (g.n_t == 0) {
        // auto: smallest power of two within the stability bound
        quoter_grid_spec probe = g;
        probe.n_t = 1;
        long n_min = 0, n_pow2 = 0;
        check(quoter_cfl_steps(&p, &probe, &n_min, &n_pow2));
        g.n_t = n_pow2;
    }
    return g;
}

quoter_path_config path_config_from(const Config& cfg, uint64_t seed_override,
                                    bool have_seed) {
    quoter_path_config pc;
    pc.n_paths = cfg.integer_or("sim.n_paths", 10000);
    pc.dt = cfg.num_or("sim.dt", 1e-3);
    pc.seed = have_seed ? seed_override
                        : static_cast<uint64_t>(cfg.integer_or("sim.seed", 12345));
    pc.s0 = cfg.num_or("sim.s0", 100.0);
    pc.x0 = cfg.num_or("sim.x0", 0.0);
    pc.q0 = static_cast<int>(cfg.integer_or("sim.q0", 0));
    pc.q_cap = static_cast<int>(cfg.integer_or("sim.q_cap", 0));
    pc.clamp = cfg.flag_or("sim.clamp", true) ? 1 : 0;
    pc.n_threads = 0;
    return pc;
}

std::string out_file(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir);
}

// default symmetric half-spread: half the time-average of the optimal spread
double default_half_spread(const quoter_params& p) {
    double s0 = 0.0, sT = 0.0;
    check(quoter_optimal_spread(&p, 0.0, &s0));
    check(quoter_optimal_spread(&p, p.horizon_t, &sT));
    return 0.25 * (s0 + sT);
}

int cmd_quotes(const Config& cfg, double s, int q, double t,
               const std::string& sweep, const std::string& out_dir) {
    quoter_params p = params_from(cfg);

    auto print_state = [&](double sv, int qv, double tv) {
        quoter_state st{sv, tv, 0.0, qv};
        quoter_reservation exact, asym;
        quoter_quote raw, clamped;
        double spread = 0.0;
        check(quoter_reservation_prices(&p, &st, &exact));
        check(quoter_asymptotic_reservation(&p, &st, &asym));
        check(quoter_optimal_offsets(&p, &st, 0, &raw));
        check(quoter_optimal_offsets(&p, &st, 1, &clamped));
        check(quoter_optimal_spread(&p, tv, &spread));
        std::printf("state: s = %s  q = %d  t = %s\n", fmt(sv).c_str(), qv,
                    fmt(tv).c_str());
        std::printf("  reservation      r_b %s  r_mid %s  r_a %s\n",
                    fmt(exact.r_b).c_str(), fmt(exact.r_mid).c_str(),
                    fmt(exact.r_a).c_str());
        std::printf("  expansion        r_b %s  r_mid %s  r_a %s\n",
                    fmt(asym.r_b).c_str(), fmt(asym.r_mid).c_str(),
                    fmt(asym.r_a).c_str());
        std::printf("  offsets raw      delta_b %s  delta_a %s\n",
                    fmt(raw.delta_b).c_str(), fmt(raw.delta_a).c_str());
        std::printf("  offsets clamped  delta_b %s%s  delta_a %s%s\n",
                    fmt(clamped.delta_b).c_str(),
                    clamped.clamped_b ? " (clamped)" : "",
                    fmt(clamped.delta_a).c_str(),
                    clamped.clamped_a ? " (clamped)" : "");
        std::printf("  quotes           p_b %s  p_a %s\n",
                    fmt(clamped.p_b).c_str(), fmt(clamped.p_a).c_str());
        std::printf("  spread           %s\n", fmt(spread).c_str());
    };

    if (sweep.empty()) {
        print_state(s, q, t);
        return 0;
    }

    size_t dots = sweep.find("..");
    if (dots == std::string::npos)
        throw ConfigError("--sweep-q expects the form a..b");
    int q_lo = std::stoi(sweep.substr(0, dots));
    int q_hi = std::stoi(sweep.substr(dots + 2));
    if (q_hi < q_lo) throw ConfigError("--sweep-q expects a <= b");

    std::FILE* fp = nullptr;
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::string path = out_file(out_dir, "quotes.csv");
        fp = std::fopen(path.c_str(), "wb");
        if (!fp) throw ConfigError("cannot open " + path);
    }
    const char* header =
        "q,r_b,r_mid,r_a,delta_b_raw,delta_a_raw,delta_b,delta_a,clamped_b,"
        "clamped_a,spread\n";
    std::printf("%s", header);
    if (fp) std::fprintf(fp, "%s", header);
    for (int qv = q_lo; qv <= q_hi; ++qv) {
        quoter_state st{s, t, 0.0, qv};
        quoter_reservation exact;
        quoter_quote raw, clamped;
        double spread = 0.0;
        check(quoter_reservation_prices(&p, &st, &exact));
        check(quoter_optimal_offsets(&p, &st, 0, &raw));
        check(quoter_optimal_offsets(&p, &st, 1, &clamped));
        check(quoter_optimal_spread(&p, t, &spread));
        char row[512];
        std::snprintf(row, sizeof(row), "%d,%s,%s,%s,%s,%s,%s,%s,%d,%d,%s\n",
                      qv, fmt(exact.r_b).c_str(), fmt(exact.r_mid).c_str(),
                      fmt(exact.r_a).c_str(), fmt(raw.delta_b).c_str(),
                      fmt(raw.delta_a).c_str(), fmt(clamped.delta_b).c_str(),
                      fmt(clamped.delta_a).c_str(), clamped.clamped_b,
                      clamped.clamped_a, fmt(spread).c_str());
        std::printf("%s", row);
        if (fp) std::fprintf(fp, "%s", row);
    }
    if (fp) std::fclose(fp);
    return 0;
}

int cmd_solve(const Config& cfg, int order, int clamp,
              const std::string& out_dir) {
    quoter_params p = params_from(cfg);
    quoter_grid_spec g = grid_from(cfg, p);

    quoter_field* field = nullptr;
    quoter_solve_report rep;
    std::string name;
    if (order >= 0) {
        check(quoter_solve_theta_k(&p, &g, order, &field, &rep));
        name = "theta" + std::to_string(order) + ".csv";
        std::printf("order-%d solve: sup_error_vs_closed_form %s\n", order,
                    fmt(rep.sup_error_vs_closed_form).c_str());
    } else {
        check(quoter_solve_full_hjb(&p, &g, clamp, &field, &rep));
        name = "theta_field.csv";
        std::printf("full solve over q in [%d, %d]\n", g.q_min, g.q_max);
    }
    std::printf("  grid: n_s %d  n_t %ld  s in [%s, %s]\n", g.n_s, g.n_t,
                fmt(g.s_min).c_str(), fmt(g.s_max).c_str());
    std::printf("  steps %ld  cfl_ratio %s  wall %ss\n", rep.steps,
                fmt(rep.cfl_ratio).c_str(), fmt(rep.wall_time_s).c_str());
    std::printf("  notes: %s\n", rep.notes);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::string path = out_file(out_dir, name);
        check(quoter_field_dump_csv(field, path.c_str()));
        std::printf("  field dumped to %s\n", path.c_str());
    }
    quoter_field_free(field);
    return 0;
}

int cmd_simulate(const Config& cfg, const std::string& arms_csv,
                 uint64_t seed_override, bool have_seed,
                 const std::string& out_dir) {
    quoter_params p = params_from(cfg);
    quoter_path_config pc = path_config_from(cfg, seed_override, have_seed);

    std::vector<std::string> arms;
    {
        std::string cur;
        for (char c : arms_csv) {
            if (c == ',') {
                if (!cur.empty()) arms.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) arms.push_back(cur);
    }
    if (arms.empty()) throw ConfigError("--arms: no strategy arms given");

    quoter_field* field = nullptr;
    std::vector<std::string> names;
    std::vector<quoter_summary> summaries;
    std::vector<quoter_batch*> batches;

    for (const std::string& arm : arms) {
        quoter_strategy strat;
        strat.kind = QUOTER_STRAT_ASYMPTOTIC;
        strat.half_spread = 0.0;
        strat.field = nullptr;
        if (arm == "asymptotic") {
            strat.kind = QUOTER_STRAT_ASYMPTOTIC;
        } else if (arm == "symmetric") {
            strat.kind = QUOTER_STRAT_SYMMETRIC;
            strat.half_spread =
                cfg.has("sim.symmetric_half_spread")
                    ? cfg.num("sim.symmetric_half_spread")
                    : default_half_spread(p);
        } else if (arm == "frozen") {
            strat.kind = QUOTER_STRAT_FROZEN;
        } else if (arm == "grid") {
            if (!field) {
                quoter_grid_spec g = grid_from(cfg, p);
                quoter_solve_report rep;
                check(quoter_solve_full_hjb(&p, &g, pc.clamp, &field, &rep));
            }
            strat.kind = QUOTER_STRAT_GRID;
            strat.field = field;
        } else {
            throw ConfigError("unknown strategy arm: " + arm);
        }
        // common random numbers: every arm reuses the same master seed
        quoter_batch* batch = nullptr;
        check(quoter_simulate_batch(&p, &strat, &pc, &batch));
        quoter_summary summary;
        check(quoter_batch_summary(batch, &summary));
        names.push_back(arm);
        summaries.push_back(summary);
        batches.push_back(batch);
    }

    std::printf(
        "arm          pnl_mean     pnl_std      q_mean       q_std        "
        "utility_mean  buys_mean   sells_mean\n");
    for (size_t i = 0; i < names.size(); ++i) {
        const quoter_summary& s = summaries[i];
        std::printf("%-12s %-12s %-12s %-12s %-12s %-13s %-11s %-11s\n",
                    names[i].c_str(), fmt(s.pnl_mean).c_str(),
                    fmt(s.pnl_std).c_str(), fmt(s.q_mean).c_str(),
                    fmt(s.q_std).c_str(), fmt(s.utility_mean).c_str(),
                    fmt(s.buys_mean).c_str(), fmt(s.sells_mean).c_str());
    }

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        for (size_t i = 0; i < names.size(); ++i) {
            std::string path = out_file(out_dir, "paths_" + names[i] + ".csv");
            check(quoter_batch_write_paths_csv(batches[i], path.c_str()));
        }
        std::vector<const char*> cnames;
        for (const auto& n : names) cnames.push_back(n.c_str());
        std::string spath = out_file(out_dir, "summary.csv");
        check(quoter_write_summary_csv(cnames.data(), summaries.data(),
                                       static_cast<int>(names.size()),
                                       spath.c_str()));
        std::printf("wrote %s\n", spath.c_str());
    }

    for (quoter_batch* b : batches) quoter_batch_free(b);
    quoter_field_free(field);
    return 0;
}

int cmd_verify(const Config& cfg, uint64_t seed_override, bool have_seed,
               const std::vector<std::string>& perturb,
               const std::string& out_dir) {
    quoter_verify_config vc;
    vc.n_draws = static_cast<int>(cfg.integer_or("verify.draws", 120));
    if (vc.n_draws < 1) throw ConfigError("verify.draws must be >= 1");
    vc.seed = have_seed ? seed_override
                        : static_cast<uint64_t>(cfg.integer_or("verify.seed", 1));
    vc.n_threads = 0;
    vc.perturb_reservation = 0.0;
    if (!perturb.empty()) {
        if (perturb.size() != 2 || perturb[0] != "reservation")
            throw ConfigError("--perturb expects: reservation <eps>");
        vc.perturb_reservation = std::stod(perturb[1]);
    }

    quoter_verify_report* report = nullptr;
    check(quoter_verify_run(&vc, &report));
    long rows = quoter_verify_report_rows(report);
    long failures = quoter_verify_report_failures(report);
    std::printf("verification sweep: %d draws, %ld checks, %ld failed\n",
                vc.n_draws, rows, failures);
    if (failures > 0) {
        for (long i = 0; i < rows; ++i) {
            char name[64];
            uint64_t hash;
            double residual, tolerance;
            int passed;
            check(quoter_verify_report_row(report, i, name, sizeof(name), &hash,
                                           &residual, &tolerance, &passed));
            if (!passed)
                std::printf("  FAIL %-24s %016llx residual %s tolerance %s\n",
                            name, static_cast<unsigned long long>(hash),
                            fmt(residual).c_str(), fmt(tolerance).c_str());
        }
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::string path = out_file(out_dir, "verify_report.csv");
        check(quoter_verify_report_write_csv(report, path.c_str()));
        std::printf("wrote %s\n", path.c_str());
    }
    quoter_verify_report_free(report);
    return failures == 0 ? 0 : 4;
}

int cmd_convergence(const Config& cfg, int levels, const std::string& out_dir) {
    if (levels < 2) throw ConfigError("--levels must be >= 2");
    quoter_params p = params_from(cfg);
    quoter_grid_spec base = grid_from(cfg, p);
    base.n_s = static_cast<int>(cfg.integer_or("grid.base_n_s", 50));
    base.n_t = 1;  // the study derives dyadic CFL step counts itself

    std::vector<quoter_convergence_row> rows(levels);
    check(quoter_convergence_study(&p, &base, levels, rows.data()));

    const char* header =
        "level,n_s,n_t,h,dt,err_theta0,err_theta1,err_theta2,err_hjb_a0\n";
    std::printf("%s", header);
    std::FILE* fp = nullptr;
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::string path = out_file(out_dir, "convergence.csv");
        fp = std::fopen(path.c_str(), "wb");
        if (!fp) throw ConfigError("cannot open " + path);
        std::fprintf(fp, "%s", header);
    }
    for (const auto& r : rows) {
        char row[512];
        std::snprintf(row, sizeof(row), "%d,%d,%ld,%s,%s,%s,%s,%s,%s\n",
                      r.level, r.n_s, r.n_t, fmt(r.h).c_str(), fmt(r.dt).c_str(),
                      fmt(r.err_theta0).c_str(), fmt(r.err_theta1).c_str(),
                      fmt(r.err_theta2).c_str(), fmt(r.err_hjb_a0).c_str());
        std::printf("%s", row);
        if (fp) std::fprintf(fp, "%s", row);
    }
    if (fp) std::fclose(fp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"market-making quote engine: closed-form quotes, Bellman "
                 "solver, Monte Carlo simulator, verification oracle"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    uint64_t seed = 0;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    auto* seed_opt =
        app.add_option("--seed", seed, "master seed (overrides config)");

    // model parameter overrides
    std::map<std::string, double> overrides;
    for (const char* key :
         {"sigma", "gamma", "big_a", "kappa", "horizon_t", "discount_w"}) {
        app.add_option_function<double>(
            std::string("--") + key,
            [&overrides, key](double v) { overrides[key] = v; },
            std::string("model.") + key + " override");
    }

    double s_val = 100.0, t_val = 0.0;
    int q_val = 0;
    std::string sweep_q;
    auto* quotes = app.add_subcommand("quotes", "closed-form quotes for a state");
    quotes->add_option("--s", s_val, "mid-price");
    quotes->add_option("--q", q_val, "inventory");
    quotes->add_option("--t", t_val, "time in [0, T]");
    quotes->add_option("--sweep-q", sweep_q, "emit one CSV row per q in a..b");

    int order = -1, clamp = 1;
    auto* solve = app.add_subcommand("solve", "finite-difference Bellman solve");
    solve->add_option("--order", order, "solve theta_k for k in {0,1,2}")
        ->check(CLI::Range(0, 2));
    solve->add_option("--clamp", clamp, "clamp negative offsets in the fill term");

    std::string arms = "asymptotic,symmetric";
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo strategy runs");
    simulate->add_option("--arms", arms,
                         "comma list: asymptotic,symmetric,frozen,grid");

    std::vector<std::string> perturb;
    auto* verify = app.add_subcommand("verify", "oracle verification sweep");
    verify->add_option("--perturb", perturb, "inject: reservation <eps>")
        ->expected(2);

    int levels = 3;
    auto* convergence =
        app.add_subcommand("convergence", "grid refinement error study");
    convergence->add_option("--levels", levels, "refinement levels (>= 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Config cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& [key, value] : overrides)
            cfg.set("model." + key, fmt(value));

        bool have_seed = seed_opt->count() > 0;
        if (quotes->parsed())
            return cmd_quotes(cfg, s_val, q_val, t_val, sweep_q, out_dir);
        if (solve->parsed()) return cmd_solve(cfg, order, clamp, out_dir);
        if (simulate->parsed())
            return cmd_simulate(cfg, arms, seed, have_seed, out_dir);
        if (verify->parsed())
            return cmd_verify(cfg, seed, have_seed, perturb, out_dir);
        if (convergence->parsed()) return cmd_convergence(cfg, levels, out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
