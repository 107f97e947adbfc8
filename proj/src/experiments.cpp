#include "jbac/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "jbac/baselines.hpp"
#include "jbac/channel.hpp"
#include "jbac/detection.hpp"
#include "jbac/mapping.hpp"
#include "jbac/metrics.hpp"
#include "jbac/rng.hpp"

namespace jbac {

namespace {

const char* kKindNames[] = {"convergence",    "lambda_sweep",  "snr_sweep", "es_compare",
                            "discrete_phase", "imperfect_csi", "baseline_compare"};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("scenario key '" + key + "': not a number: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("scenario key '" + key + "': not an integer: '" + v + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const std::string& item : split_list(v)) out.push_back(parse_double(key, item));
    return out;
}

double snr_db_to_n0(double snr_db, double p_max) {
    return p_max / std::pow(10.0, snr_db / 10.0);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> default_methods(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::convergence:
            return {"alternating", "active_only", "passive_only"};
        case ScenarioKind::lambda_sweep:
        case ScenarioKind::snr_sweep:
        case ScenarioKind::imperfect_csi:
            return {"alternating"};
        case ScenarioKind::es_compare:
            return {"alternating_grid", "es"};
        case ScenarioKind::discrete_phase:
            return {"alternating", "mpsk"};
        case ScenarioKind::baseline_compare:
            return {"alternating", "alternating_nobsa", "active_only", "passive_only", "mpsk"};
    }
    return {};
}

std::vector<double> default_sweep(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::convergence:
            return {0.0, 0.5, 1.0};
        case ScenarioKind::lambda_sweep:
            return {0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0};
        case ScenarioKind::es_compare:
            return {-10.0, 0.0};
        default:
            return {-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0};
    }
}

struct Design {
    Beamformer w;
    ReflectingCandidateSet set;
    std::int64_t iterations = 0;
    OptimizationTrace trace;  // filled for the trace-producing methods
};

std::int64_t outer_count(const OptimizationTrace& tr) {
    std::size_t max_outer = 0;
    for (const TracePoint& pt : tr.points) max_outer = std::max(max_outer, pt.outer);
    return static_cast<std::int64_t>(max_outer);
}

Design run_method(const std::string& method, const ChannelSet& ch, const SystemConfig& cfg,
                  const OptimizerSettings& opt, std::uint64_t seed, const Scenario& sc) {
    Design d;
    if (method == "alternating" || method == "alternating_nobsa" ||
        method == "alternating_grid") {
        AlternateResult ar = alternate(ch, cfg, opt, seed, method != "alternating_nobsa");
        d.w = std::move(ar.w);
        d.set = std::move(ar.set);
        d.trace = std::move(ar.trace);
        d.iterations = outer_count(d.trace);
        if (method == "alternating_grid") {
            d.set = quantize_patterns(d.set, sc.es_bits);
            d.w = quantize_beamformer(d.w, cfg, sc.es_bits);
            d.set = bsa(ch, d.w, d.set, cfg.noise_power);
        }
    } else if (method == "active_only") {
        const Beamformer w0 = init_beamformer(cfg, seed);
        d.set = init_patterns(cfg, seed);
        BeamformerResult r = optimize_w(ch, w0, d.set, cfg, opt);
        d.w = std::move(r.w);
        d.trace = std::move(r.trace);
        d.iterations = static_cast<std::int64_t>(d.trace.points.size()) - 1;
    } else if (method == "passive_only") {
        d.w = init_beamformer(cfg, seed);
        const ReflectingCandidateSet set0 = init_patterns(cfg, seed);
        PatternResult r = optimize_patterns(ch, d.w, set0, cfg, opt);
        d.set = std::move(r.set);
        d.trace = std::move(r.trace);
        d.iterations = static_cast<std::int64_t>(d.trace.points.size()) - 1;
    } else if (method == "mpsk") {
        SystemConfig opt_cfg = cfg;
        if (!std::isnan(sc.mpsk_lambda0)) opt_cfg.lambda0 = sc.mpsk_lambda0;
        MpskResult r = mpsk_scheme(ch, opt_cfg, opt, seed);
        d.w = std::move(r.w);
        d.set = std::move(r.set);
    } else if (method == "es") {
        DiscreteGrid grid;
        grid.bits = sc.es_bits;
        grid.beamformer_phase_count = std::size_t{1} << sc.es_bits;
        EsResult r = exhaustive_search(ch, cfg, grid, sc.es_budget);
        d.w = std::move(r.w);
        d.set = std::move(r.set);
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    return d;
}

ResultRow base_row(const Scenario& sc, const SystemConfig& cfg, std::uint64_t seed,
                   double sweep_value, const std::string& method) {
    ResultRow row;
    row.scenario = sc.name;
    row.kind = to_string(sc.kind);
    row.method = method;
    row.seed = static_cast<std::int64_t>(seed);
    row.sweep_name = sc.sweep_name;
    row.sweep_value = sweep_value;
    row.snr_db = 10.0 * std::log10(cfg.p_max / cfg.noise_power);
    row.lambda0 = cfg.lambda0;
    row.n_elements = cfg.n_elements;
    row.n_patterns = cfg.n_patterns;
    return row;
}

void fill_metrics(ResultRow& row, const ChannelSet& eval_ch, const Design& d,
                  const SystemConfig& cfg, const Scenario& sc, std::uint64_t seed) {
    const MetricReport rep = weighted_objective(eval_ch, d.w, d.set, cfg);
    row.avg_user_rate_bps = rep.avg_user_rate_bps;
    row.ber_ub = rep.ber_ub;
    row.objective = rep.weighted_objective;
    row.iterations = d.iterations;
    if (sc.trials > 0 && cfg.n_patterns >= 2) {
        const BerResult ber = simulate_ber(eval_ch, d.w, d.set, cfg, cfg.noise_power, sc.trials,
                                           seed, sc.early_exit_bit_errors);
        row.ber_mc = ber.empirical_ber;
        row.ber_mc_stderr = ber.std_error;
        row.goodput_bps = ber.empirical_goodput_bps;
    } else {
        row.goodput_bps = rep.goodput_lb_bps;
    }
}

// One (sweep value, seed, method) work unit; may emit several rows.
std::vector<ResultRow> run_cell(const Scenario& sc, std::size_t sweep_idx, std::uint64_t seed,
                                const std::string& method) {
    const double sweep_value = sc.sweep_values[sweep_idx];
    SystemConfig cfg = sc.cfg;
    if (sc.sweep_name == "snr_db")
        cfg.noise_power = snr_db_to_n0(sweep_value, cfg.p_max);
    else if (sc.sweep_name == "lambda0") {
        cfg.lambda0 = sweep_value;
        cfg.noise_power = snr_db_to_n0(sc.snr_db, cfg.p_max);
    }
    validate_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ResultRow> rows;
    const ChannelSet ch = generate_channels(cfg, seed);

    if (sc.kind == ScenarioKind::convergence) {
        const Design d = run_method(method, ch, cfg, sc.opt, seed, sc);
        if (method == "alternating") {
            // objective after each outer iteration
            std::size_t outer = 0;
            for (std::size_t i = 0; i < d.trace.points.size(); ++i) {
                const bool last_of_outer = i + 1 == d.trace.points.size() ||
                                           d.trace.points[i + 1].outer != d.trace.points[i].outer;
                if (!last_of_outer) continue;
                const TracePoint& pt = d.trace.points[i];
                ResultRow row = base_row(sc, cfg, seed, sweep_value, method);
                row.avg_user_rate_bps = pt.avg_rate;
                row.goodput_bps = pt.goodput;
                row.ber_ub = pt.ber_ub;
                row.objective = pt.objective;
                row.iterations = static_cast<std::int64_t>(outer++);
                rows.push_back(std::move(row));
            }
        } else {
            for (std::size_t i = 0; i < d.trace.points.size(); ++i) {
                const TracePoint& pt = d.trace.points[i];
                ResultRow row = base_row(sc, cfg, seed, sweep_value, method);
                row.avg_user_rate_bps = pt.avg_rate;
                row.goodput_bps = pt.goodput;
                row.ber_ub = pt.ber_ub;
                row.objective = pt.objective;
                row.iterations = static_cast<std::int64_t>(i);
                rows.push_back(std::move(row));
            }
        }
    } else if (sc.kind == ScenarioKind::discrete_phase) {
        const Design d = run_method(method, ch, cfg, sc.opt, seed, sc);
        ResultRow row = base_row(sc, cfg, seed, sweep_value, method);
        fill_metrics(row, ch, d, cfg, sc, seed);
        rows.push_back(row);
        for (int b : sc.b_values) {
            Design dq;
            dq.w = d.w;
            dq.set = quantize_patterns(d.set, b);
            dq.iterations = d.iterations;
            ResultRow qrow =
                base_row(sc, cfg, seed, sweep_value, method + "_q" + std::to_string(b));
            qrow.b = b;
            fill_metrics(qrow, ch, dq, cfg, sc, seed);
            rows.push_back(std::move(qrow));
        }
    } else if (sc.kind == ScenarioKind::imperfect_csi) {
        for (double delta : sc.deltas) {
            const ChannelSet est =
                delta > 0.0 ? perturb_csi(ch, CsiErrorModel{delta, cfg.noise_power}, seed) : ch;
            const Design d = run_method(method, est, cfg, sc.opt, seed, sc);
            ResultRow row = base_row(sc, cfg, seed, sweep_value, method);
            row.delta = delta;
            fill_metrics(row, ch, d, cfg, sc, seed);  // evaluated on the true channels
            rows.push_back(std::move(row));
        }
    } else {
        const Design d = run_method(method, ch, cfg, sc.opt, seed, sc);
        ResultRow row = base_row(sc, cfg, seed, sweep_value, method);
        if (method == "es" || method == "alternating_grid") row.b = sc.es_bits;
        fill_metrics(row, ch, d, cfg, sc, seed);
        rows.push_back(std::move(row));
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (ResultRow& row : rows) row.wall_time_s = elapsed;
    return rows;
}

void append_aggregates(std::vector<ResultRow>& rows, const Scenario& sc) {
    if (sc.kind == ScenarioKind::convergence) return;  // per-iteration traces
    struct Key {
        std::string method;
        double sweep_value;
        int b;
        double delta;
        bool operator<(const Key& o) const {
            if (method != o.method) return method < o.method;
            if (sweep_value != o.sweep_value) return sweep_value < o.sweep_value;
            if (b != o.b) return b < o.b;
            return delta < o.delta;
        }
    };
    std::map<Key, std::vector<const ResultRow*>> groups;
    std::vector<Key> order;
    for (const ResultRow& row : rows) {
        const Key key{row.method, row.sweep_value, row.b, row.delta};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&row);
    }
    // emission order follows first appearance, not map order
    std::vector<ResultRow> agg;
    for (const Key& key : order) {
        const auto& members = groups[key];
        const double n = static_cast<double>(members.size());
        auto mean_se = [&](auto getter) {
            double mean = 0.0;
            for (const ResultRow* r : members) mean += getter(*r);
            mean /= n;
            double var = 0.0;
            for (const ResultRow* r : members) {
                const double d = getter(*r) - mean;
                var += d * d;
            }
            const double se = members.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
            return std::pair<double, double>(mean, se);
        };
        ResultRow mean = *members.front();
        ResultRow se = *members.front();
        mean.seed = -1;
        se.seed = -1;
        mean.method = key.method + "_mean";
        se.method = key.method + "_se";
        mean.iterations = 0;
        se.iterations = 0;
        mean.wall_time_s = 0.0;
        se.wall_time_s = 0.0;
        std::tie(mean.avg_user_rate_bps, se.avg_user_rate_bps) =
            mean_se([](const ResultRow& r) { return r.avg_user_rate_bps; });
        std::tie(mean.goodput_bps, se.goodput_bps) =
            mean_se([](const ResultRow& r) { return r.goodput_bps; });
        std::tie(mean.ber_ub, se.ber_ub) = mean_se([](const ResultRow& r) { return r.ber_ub; });
        std::tie(mean.ber_mc, se.ber_mc) = mean_se([](const ResultRow& r) { return r.ber_mc; });
        std::tie(mean.ber_mc_stderr, se.ber_mc_stderr) =
            mean_se([](const ResultRow& r) { return r.ber_mc_stderr; });
        std::tie(mean.objective, se.objective) =
            mean_se([](const ResultRow& r) { return r.objective; });
        agg.push_back(std::move(mean));
        agg.push_back(std::move(se));
    }
    rows.insert(rows.end(), agg.begin(), agg.end());
}

}  // namespace

const char* to_string(ScenarioKind kind) { return kKindNames[static_cast<int>(kind)]; }

ScenarioKind scenario_kind_from_string(const std::string& s) {
    for (int i = 0; i < 7; ++i)
        if (s == kKindNames[i]) return static_cast<ScenarioKind>(i);
    throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    bool have_kind = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t\r");
            if (x == std::string::npos) return std::string();
            const auto y = s.find_last_not_of(" \t\r");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": empty key or value");

        if (key == "name") sc.name = val;
        else if (key == "kind") { sc.kind = scenario_kind_from_string(val); have_kind = true; }
        else if (key == "n_tx") sc.cfg.n_tx = parse_u64(key, val);
        else if (key == "n_rx") sc.cfg.n_rx = parse_u64(key, val);
        else if (key == "n_elements") sc.cfg.n_elements = parse_u64(key, val);
        else if (key == "n_users") sc.cfg.n_users = parse_u64(key, val);
        else if (key == "n_patterns") sc.cfg.n_patterns = parse_u64(key, val);
        else if (key == "symbol_duration_s") sc.cfg.symbol_duration_s = parse_double(key, val);
        else if (key == "p_max") sc.cfg.p_max = parse_double(key, val);
        else if (key == "noise_power") sc.cfg.noise_power = parse_double(key, val);
        else if (key == "lambda0") sc.cfg.lambda0 = parse_double(key, val);
        else if (key == "block_symbols") sc.cfg.block_symbols = parse_u64(key, val);
        else if (key == "block_duration_s") sc.cfg.block_duration_s = parse_double(key, val);
        else if (key == "sweep_values") sc.sweep_values = parse_double_list(key, val);
        else if (key == "snr_db") sc.snr_db = parse_double(key, val);
        else if (key == "mpsk_lambda0") sc.mpsk_lambda0 = parse_double(key, val);
        else if (key == "channel_seeds") {
            sc.channel_seeds.clear();
            for (const std::string& item : split_list(val))
                sc.channel_seeds.push_back(parse_u64(key, item));
        } else if (key == "n_seeds") sc.n_seeds = parse_u64(key, val);
        else if (key == "methods") sc.methods = split_list(val);
        else if (key == "b_values") {
            sc.b_values.clear();
            for (const std::string& item : split_list(val))
                sc.b_values.push_back(static_cast<int>(parse_u64(key, item)));
        } else if (key == "deltas") sc.deltas = parse_double_list(key, val);
        else if (key == "es_bits") sc.es_bits = static_cast<int>(parse_u64(key, val));
        else if (key == "es_budget") sc.es_budget = parse_double(key, val);
        else if (key == "trials") sc.trials = parse_u64(key, val);
        else if (key == "early_exit_bit_errors") sc.early_exit_bit_errors = parse_u64(key, val);
        else if (key == "step_w") sc.opt.step_w = parse_double(key, val);
        else if (key == "step_psi") sc.opt.step_psi = parse_double(key, val);
        else if (key == "backtrack_factor") sc.opt.backtrack_factor = parse_double(key, val);
        else if (key == "armijo_c") sc.opt.armijo_c = parse_double(key, val);
        else if (key == "max_inner_iters") sc.opt.max_inner_iters = parse_u64(key, val);
        else if (key == "max_outer_iters") sc.opt.max_outer_iters = parse_u64(key, val);
        else if (key == "rel_tol_inner") sc.opt.rel_tol_inner = parse_double(key, val);
        else if (key == "rel_tol_outer") sc.opt.rel_tol_outer = parse_double(key, val);
        else if (key == "min_step") sc.opt.min_step = parse_double(key, val);
        else if (key == "p_schedule") sc.opt.p_schedule = parse_double_list(key, val);
        else if (key == "q_schedule") sc.opt.q_schedule = parse_double_list(key, val);
        else if (key == "use_sampled_expectation")
            sc.opt.use_sampled_expectation = parse_u64(key, val) != 0;
        else if (key == "s_sample_count") sc.opt.s_sample_count = parse_u64(key, val);
        else throw std::invalid_argument("unknown scenario key '" + key + "'");
    }
    if (!have_kind) throw std::invalid_argument("scenario: missing 'kind'");
    if (sc.name.empty()) sc.name = to_string(sc.kind);
    for (char& c : sc.name)
        if (c == ',') c = '_';
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::vector<ResultRow> run_scenario(const Scenario& input) {
    Scenario sc = input;
    validate_config(sc.cfg);
    validate_settings(sc.opt);
    if (sc.sweep_values.empty()) sc.sweep_values = default_sweep(sc.kind);
    if (sc.methods.empty()) sc.methods = default_methods(sc.kind);
    sc.sweep_name = (sc.kind == ScenarioKind::convergence || sc.kind == ScenarioKind::lambda_sweep)
                        ? "lambda0"
                        : "snr_db";
    if (sc.channel_seeds.empty()) {
        if (sc.n_seeds == 0) throw std::invalid_argument("scenario: n_seeds must be >= 1");
        for (std::size_t i = 0; i < sc.n_seeds; ++i)
            sc.channel_seeds.push_back(derive_seed(sc.root_seed, Stream::seed_table, i));
    }
    if (sc.kind == ScenarioKind::es_compare) {
        DiscreteGrid grid;
        grid.bits = sc.es_bits;
        grid.beamformer_phase_count = std::size_t{1} << sc.es_bits;
        const double required = es_evaluation_count(sc.cfg, grid);
        if (!(required <= sc.es_budget))
            throw std::invalid_argument("es_compare: evaluation budget exceeded, needs " +
                                        std::to_string(required) + " evaluations");
    }

    struct Cell {
        std::size_t sweep_idx;
        std::size_t seed_idx;
        std::size_t method_idx;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < sc.sweep_values.size(); ++s)
        for (std::size_t c = 0; c < sc.channel_seeds.size(); ++c)
            for (std::size_t m = 0; m < sc.methods.size(); ++m) cells.push_back({s, c, m});

    std::vector<std::vector<ResultRow>> cell_rows(cells.size());
    std::vector<std::string> cell_errors(cells.size());
    std::atomic<std::size_t> done{0};

    auto run_one = [&](std::size_t i) {
        const Cell& cell = cells[i];
        try {
            cell_rows[i] = run_cell(sc, cell.sweep_idx, sc.channel_seeds[cell.seed_idx],
                                    sc.methods[cell.method_idx]);
        } catch (const std::exception& e) {
            cell_errors[i] = std::string(e.what()) + " [sweep=" +
                             format_double(sc.sweep_values[cell.sweep_idx]) +
                             " seed=" + std::to_string(sc.channel_seeds[cell.seed_idx]) +
                             " method=" + sc.methods[cell.method_idx] + "]";
        }
        const std::size_t n = ++done;
        if (!sc.quiet) std::fprintf(stderr, "\rcell %zu/%zu", n, cells.size());
    };

    const int jobs = sc.jobs > 0 ? sc.jobs : omp_get_max_threads();
    if (jobs == 1 || cells.size() == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_one(i);
    } else {
        omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cells.size()); ++i)
            run_one(static_cast<std::size_t>(i));
    }
    if (!sc.quiet) std::fprintf(stderr, "\n");

    for (const std::string& err : cell_errors)
        if (!err.empty()) throw std::runtime_error("scenario cell failed: " + err);

    std::vector<ResultRow> rows;
    for (std::vector<ResultRow>& r : cell_rows)
        for (ResultRow& row : r) rows.push_back(std::move(row));
    append_aggregates(rows, sc);
    return rows;
}

const std::string& csv_header() {
    static const std::string header =
        "scenario,kind,method,seed,sweep_name,sweep_value,snr_db,lambda0,N,K,b,delta,"
        "avg_user_rate_bps,goodput_bps,ber_ub,ber_mc,ber_mc_stderr,objective,iterations,"
        "wall_time_s";
    return header;
}

std::string format_csv_row(const ResultRow& row) {
    std::ostringstream out;
    out << row.scenario << ',' << row.kind << ',' << row.method << ',' << row.seed << ','
        << row.sweep_name << ',' << format_double(row.sweep_value) << ','
        << format_double(row.snr_db) << ',' << format_double(row.lambda0) << ','
        << row.n_elements << ',' << row.n_patterns << ',' << row.b << ','
        << format_double(row.delta) << ',' << format_double(row.avg_user_rate_bps) << ','
        << format_double(row.goodput_bps) << ',' << format_double(row.ber_ub) << ','
        << format_double(row.ber_mc) << ',' << format_double(row.ber_mc_stderr) << ','
        << format_double(row.objective) << ',' << row.iterations << ','
        << format_double(row.wall_time_s);
    return out.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows to write");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
    out << csv_header() << '\n';
    for (const ResultRow& row : rows) out << format_csv_row(row) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

}  // namespace jbac
