#include "searchnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "searchnet/csv.hpp"
#include "searchnet/error.hpp"
#include "searchnet/kernels.hpp"
#include "searchnet/metrics.hpp"
#include "searchnet/rng.hpp"

namespace searchnet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSeedGraphStream = 31;
constexpr std::uint64_t kSirStream = 32;
constexpr std::uint64_t kApproxDiameterStream = 33;
constexpr double kCoverageTarget = 0.9;

}  // namespace

const char* experiment_kind_name(ExperimentKind k) noexcept {
    switch (k) {
    case ExperimentKind::DegreeDistribution:
        return "DegreeDistribution";
    case ExperimentKind::DiameterTrace:
        return "DiameterTrace";
    case ExperimentKind::RumorCoverage:
        return "RumorCoverage";
    case ExperimentKind::TheoryTables:
        return "TheoryTables";
    }
    return "?";
}

static ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::DegreeDistribution, ExperimentKind::DiameterTrace, ExperimentKind::RumorCoverage,
                   ExperimentKind::TheoryTables})
        if (name == experiment_kind_name(k)) return k;
    throw ParameterError("unknown experiment kind: " + name);
}

const char* engine_mode_name(EngineMode m) noexcept {
    switch (m) {
    case EngineMode::On:
        return "on";
    case EngineMode::Off:
        return "off";
    case EngineMode::Paired:
        return "paired";
    }
    return "?";
}

EngineMode parse_engine_mode(const std::string& name) {
    for (auto m : {EngineMode::On, EngineMode::Off, EngineMode::Paired})
        if (name == engine_mode_name(m)) return m;
    throw ParameterError("engine must be on, off or paired, got: " + name);
}

static Side parse_side(const std::string& name) {
    if (name == "user") return Side::User;
    if (name == "topic") return Side::Topic;
    throw ParameterError("side must be user or topic, got: " + name);
}

void ExperimentSpec::validate() const {
    if (schema_version != kSpecSchemaVersion)
        throw ParameterError("unsupported schema_version " + std::to_string(schema_version));
    evolution.validate();
    if (kind == ExperimentKind::RumorCoverage) sir.validate();
    if (replicates == 0) throw ParameterError("replicates must be >= 1");
    if (record_interval == 0) throw ParameterError("record_interval must be >= 1");
    if (threads == 0 || threads > 256) throw ParameterError("threads must lie in [1, 256]");
    if (d_floor == 0) throw ParameterError("d_floor must be >= 1");
    if (fit_d_min == 0) throw ParameterError("fit_d_min must be >= 1");
    if (theory_max_degree < evolution.c_u) throw ParameterError("theory_max_degree must be >= c_u");
    if (!(d_max > 1.0) || !std::isfinite(d_max)) throw ParameterError("d_max must be finite and > 1");
    if (!(u_term >= 0.0) || !std::isfinite(u_term)) throw ParameterError("u_term must be finite and >= 0");
    if (output_dir.empty()) throw ParameterError("output_dir must not be empty");
    if (seed_graph.source == SeedGraphSpec::Source::Synthetic) {
        if (seed_graph.synthetic.users == 0 || seed_graph.synthetic.topics == 0)
            throw ParameterError("synthetic seed graph needs at least one user and one topic");
    } else {
        if (seed_graph.dataset_path.empty()) throw ParameterError("dataset seed graph needs a path");
        seed_graph.strategy.validate();
    }
}

// ---------------------------------------------------------------------------
// JSON

static json policy_json(const SearchPolicy& p) {
    return json{{"kind", policy_name(p.kind)}, {"exponent", p.exponent}, {"smoothing", p.smoothing}};
}

static void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
    if (!obj.is_object()) throw ParameterError(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) throw ParameterError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <typename T>
static void read(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

static SearchPolicy policy_from_json(const json& j) {
    check_keys(j, {"kind", "exponent", "smoothing"}, "search_policy");
    SearchPolicy p;
    if (j.contains("kind")) p.kind = parse_policy_kind(j["kind"].get<std::string>());
    read(j, "exponent", p.exponent);
    read(j, "smoothing", p.smoothing);
    return p;
}

static json spec_json(const ExperimentSpec& s) {
    json seed;
    if (s.seed_graph.source == SeedGraphSpec::Source::Synthetic) {
        seed = json{{"source", "synthetic"},
                    {"users", s.seed_graph.synthetic.users},
                    {"topics", s.seed_graph.synthetic.topics},
                    {"connected", s.seed_graph.synthetic.connected}};
    } else {
        seed = json{{"source", "dataset"},
                    {"path", s.seed_graph.dataset_path},
                    {"directed", s.seed_graph.directed},
                    {"strategy", strategy_name(s.seed_graph.strategy.kind)},
                    {"split_fraction", s.seed_graph.strategy.split_fraction},
                    {"strategy_seed", s.seed_graph.strategy.seed}};
    }
    const EvolutionConfig& e = s.evolution;
    json evo{{"beta", e.beta},
             {"p_search", e.p_search},
             {"c_u", e.c_u},
             {"c_t", e.c_t},
             {"search_edges_per_activation", nullptr},
             {"search_policy", policy_json(e.search_policy)},
             {"steps", nullptr},
             {"seed", e.seed}};
    if (e.search_edges_per_activation) evo["search_edges_per_activation"] = *e.search_edges_per_activation;
    if (!s.steps_from_seed_size) evo["steps"] = e.steps;
    const SirConfig& r = s.sir;
    json sir{{"lambda", r.lambda},
             {"mu", r.mu},
             {"xi", r.xi},
             {"initial_fraction", r.initial_fraction},
             {"max_steps", r.max_steps},
             {"exposure_model", exposure_model_name(r.exposure_model)},
             {"search_probability", r.search_probability},
             {"search_policy", policy_json(r.search_policy)}};
    return json{{"schema_version", s.schema_version},
                {"kind", experiment_kind_name(s.kind)},
                {"seed_graph", seed},
                {"evolution", evo},
                {"sir", sir},
                {"replicates", s.replicates},
                {"record_interval", s.record_interval},
                {"engine", engine_mode_name(s.engine)},
                {"threads", s.threads},
                {"side", side_name(s.side)},
                {"d_floor", s.d_floor},
                {"fit_d_min", s.fit_d_min},
                {"theory_max_degree", s.theory_max_degree},
                {"u_term", s.u_term},
                {"d_max", s.d_max},
                {"output_dir", s.output_dir}};
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2); }

static ExperimentSpec spec_from_object(const json& j) {
    check_keys(j,
               {"schema_version", "kind", "seed_graph", "evolution", "sir", "replicates", "record_interval", "engine",
                "threads", "side", "d_floor", "fit_d_min", "theory_max_degree", "u_term", "d_max", "output_dir"},
               "spec");
    ExperimentSpec s;
    read(j, "schema_version", s.schema_version);
    if (!j.contains("kind")) throw ParameterError("missing key 'kind'");
    s.kind = parse_experiment_kind(j["kind"].get<std::string>());

    if (j.contains("seed_graph")) {
        const json& g = j["seed_graph"];
        std::string source = g.value("source", std::string("synthetic"));
        if (source == "synthetic") {
            check_keys(g, {"source", "users", "topics", "connected"}, "seed_graph");
            read(g, "users", s.seed_graph.synthetic.users);
            read(g, "topics", s.seed_graph.synthetic.topics);
            read(g, "connected", s.seed_graph.synthetic.connected);
        } else if (source == "dataset") {
            check_keys(g, {"source", "path", "directed", "strategy", "split_fraction", "strategy_seed"}, "seed_graph");
            s.seed_graph.source = SeedGraphSpec::Source::Dataset;
            read(g, "path", s.seed_graph.dataset_path);
            read(g, "directed", s.seed_graph.directed);
            if (g.contains("strategy")) s.seed_graph.strategy.kind = parse_strategy_kind(g["strategy"].get<std::string>());
            read(g, "split_fraction", s.seed_graph.strategy.split_fraction);
            read(g, "strategy_seed", s.seed_graph.strategy.seed);
        } else {
            throw ParameterError("seed_graph.source must be synthetic or dataset, got: " + source);
        }
    }

    if (j.contains("evolution")) {
        const json& e = j["evolution"];
        check_keys(e, {"beta", "p_search", "c_u", "c_t", "search_edges_per_activation", "search_policy", "steps", "seed"},
                   "evolution");
        read(e, "beta", s.evolution.beta);
        read(e, "p_search", s.evolution.p_search);
        read(e, "c_u", s.evolution.c_u);
        read(e, "c_t", s.evolution.c_t);
        if (auto it = e.find("search_edges_per_activation"); it != e.end() && !it->is_null())
            s.evolution.search_edges_per_activation = it->get<std::uint32_t>();
        if (e.contains("search_policy")) s.evolution.search_policy = policy_from_json(e["search_policy"]);
        read(e, "seed", s.evolution.seed);
        if (auto it = e.find("steps"); it != e.end() && !it->is_null()) {
            s.evolution.steps = it->get<std::uint64_t>();
        } else if (s.seed_graph.source == SeedGraphSpec::Source::Dataset) {
            s.steps_from_seed_size = true;
        }
    } else if (s.seed_graph.source == SeedGraphSpec::Source::Dataset) {
        s.steps_from_seed_size = true;
    }

    if (j.contains("sir")) {
        const json& r = j["sir"];
        check_keys(r,
                   {"lambda", "mu", "xi", "initial_fraction", "max_steps", "exposure_model", "search_probability",
                    "search_policy"},
                   "sir");
        read(r, "lambda", s.sir.lambda);
        read(r, "mu", s.sir.mu);
        read(r, "xi", s.sir.xi);
        read(r, "initial_fraction", s.sir.initial_fraction);
        read(r, "max_steps", s.sir.max_steps);
        if (r.contains("exposure_model")) s.sir.exposure_model = parse_exposure_model(r["exposure_model"].get<std::string>());
        read(r, "search_probability", s.sir.search_probability);
        if (r.contains("search_policy")) s.sir.search_policy = policy_from_json(r["search_policy"]);
    }

    read(j, "replicates", s.replicates);
    read(j, "record_interval", s.record_interval);
    if (j.contains("engine")) s.engine = parse_engine_mode(j["engine"].get<std::string>());
    read(j, "threads", s.threads);
    if (j.contains("side")) s.side = parse_side(j["side"].get<std::string>());
    read(j, "d_floor", s.d_floor);
    read(j, "fit_d_min", s.fit_d_min);
    read(j, "theory_max_degree", s.theory_max_degree);
    read(j, "u_term", s.u_term);
    read(j, "d_max", s.d_max);
    read(j, "output_dir", s.output_dir);
    s.validate();
    return s;
}

static ExperimentSpec parse_spec_json(const json& j) {
    try {
        return spec_from_object(j);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid spec: ") + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError(std::string("invalid spec: ") + e.what());
    }
}

ExperimentSpec spec_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid spec: ") + e.what());
    }
    return parse_spec_json(j);
}

ExperimentSpec load_spec_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read spec file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ParameterError("invalid spec: " + path.string() + ": " + e.what());
    }
    // A manifest carries the resolved spec under "spec".
    if (j.is_object() && j.contains("spec") && j.contains("replicate_seeds")) return parse_spec_json(j["spec"]);
    return parse_spec_json(j);
}

// ---------------------------------------------------------------------------
// Replicates

std::uint64_t replicate_seed(const ExperimentSpec& spec, std::uint32_t replicate) noexcept {
    return mix_seed(spec.evolution.seed, replicate);
}

static BipartiteGraph load_dataset_seed(const ExperimentSpec& spec) {
    LoadOptions options;
    options.directed = spec.seed_graph.directed;
    RawGraph raw = load_edge_list_file(spec.seed_graph.dataset_path, options);
    return seed_from_dataset(raw, spec.seed_graph.strategy, spec.evolution.c_u, spec.evolution.c_t).bipartite.graph;
}

static BipartiteGraph seed_graph_for(const ExperimentSpec& spec, std::uint32_t replicate,
                                     const BipartiteGraph* dataset_seed) {
    if (spec.seed_graph.source == SeedGraphSpec::Source::Dataset) return *dataset_seed;
    SeedGraphOptions opts = spec.seed_graph.synthetic;
    opts.c_u = spec.evolution.c_u;
    opts.c_t = spec.evolution.c_t;
    Rng rng(mix_seed(replicate_seed(spec, replicate), kSeedGraphStream));
    return new_seed_graph(opts, rng);
}

BipartiteGraph build_seed_graph(const ExperimentSpec& spec, std::uint32_t replicate) {
    if (spec.seed_graph.source == SeedGraphSpec::Source::Dataset) {
        BipartiteGraph g = load_dataset_seed(spec);
        return g;
    }
    return seed_graph_for(spec, replicate, nullptr);
}

namespace {

struct Mode {
    const char* name;
    bool engine;
};

std::vector<Mode> modes_of(EngineMode m) {
    switch (m) {
    case EngineMode::On:
        return {{"on", true}};
    case EngineMode::Off:
        return {{"off", false}};
    case EngineMode::Paired:
        break;
    }
    return {{"on", true}, {"off", false}};
}

struct FitRecord {
    FitMethod method;
    std::optional<PowerLawFit> fit;
    std::string error;
};

struct DiameterPoint {
    std::uint64_t t;
    std::uint32_t value;
    bool exact;
};

struct ModeResult {
    DegreeHistogram histogram;
    std::vector<FitRecord> fits;
    std::vector<DiameterPoint> diameters;
    SirTrace sir;
};

using ReplicateResult = std::vector<ModeResult>;  // one per mode

DiameterPoint measure_diameter(const BipartiteGraph& g, std::uint64_t t, std::uint64_t seed) {
    try {
        DiameterReport d = diameter_exact(g);
        return {t, d.value(), true};
    } catch (const SizeError&) {
        Rng rng(mix_seed(mix_seed(seed, kApproxDiameterStream), t));
        DiameterReport d = diameter_approx(g, 16, rng);
        return {t, d.value(), false};
    }
}

ModeResult evolve_mode(const ExperimentSpec& spec, const BipartiteGraph& seed_graph, std::uint64_t seed, bool engine) {
    ModeResult out;
    BipartiteGraph g = seed_graph;
    EvolutionConfig cfg = spec.evolution;
    cfg.seed = seed;
    if (!engine) cfg.p_search = 0.0;
    std::vector<StepObserver> observers;
    if (spec.kind == ExperimentKind::DiameterTrace) {
        out.diameters.push_back(measure_diameter(g, 0, seed));
        observers.push_back([&](const StepReport& r, const BipartiteGraph& graph) {
            if (r.time % spec.record_interval == 0) out.diameters.push_back(measure_diameter(graph, r.time, seed));
        });
    }
    run_evolution(g, cfg, observers);
    if (spec.kind == ExperimentKind::DegreeDistribution) {
        out.histogram = degree_histogram(g, spec.side, spec.d_floor, cfg.steps);
        DegreeHistogram full = degree_histogram(g, spec.side, 1, cfg.steps);
        for (FitMethod m : {FitMethod::LogLogRegression, FitMethod::DiscreteMLE}) {
            FitRecord rec{m, std::nullopt, {}};
            try {
                rec.fit = fit_power_law(full, spec.fit_d_min, m);
            } catch (const FitError& e) {
                rec.error = e.what();
            }
            out.fits.push_back(std::move(rec));
        }
    }
    return out;
}

ReplicateResult run_replicate(const ExperimentSpec& spec, std::uint32_t r, const BipartiteGraph* dataset_seed) {
    const std::uint64_t seed = replicate_seed(spec, r);
    BipartiteGraph base = seed_graph_for(spec, r, dataset_seed);
    ReplicateResult result;
    if (spec.kind == ExperimentKind::RumorCoverage) {
        // Both arms spread over the same evolved graph; only the SIR search
        // channel differs.
        EvolutionConfig cfg = spec.evolution;
        cfg.seed = seed;
        run_evolution(base, cfg);
        for (const Mode& m : modes_of(spec.engine)) {
            SirConfig sir = spec.sir;
            sir.seed = mix_seed(seed, kSirStream);
            sir.engine_enabled = m.engine;
            ModeResult mr;
            mr.sir = run_sir(base, sir);
            result.push_back(std::move(mr));
        }
        return result;
    }
    for (const Mode& m : modes_of(spec.engine)) result.push_back(evolve_mode(spec, base, seed, m.engine));
    return result;
}

std::vector<ReplicateResult> run_replicates(const ExperimentSpec& spec, const BipartiteGraph* dataset_seed) {
    const std::uint32_t n = spec.replicates;
    std::vector<ReplicateResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        for (std::uint32_t r = next++; r < n; r = next++) {
            try {
                results[r] = run_replicate(spec, r, dataset_seed);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::uint32_t threads = std::min(spec.threads, n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// ---------------------------------------------------------------------------
// Output

class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) {
        std::error_code ec;
        fs::create_directories(root_ / "replicates", ec);
        if (ec) throw IoError("cannot create output directory " + root_.string() + ": " + ec.message());
    }

    const fs::path& root() const noexcept { return root_; }

    void write(const fs::path& relative, const std::string& content) {
        fs::path p = root_ / relative;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + p.string());
    }

private:
    fs::path root_;
};

std::string rep_name(std::uint32_t r, const char* mode, const char* what) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "replicates/rep%03u_%s_%s.csv", r, mode, what);
    return buf;
}

std::string fmt(double x) { return format_double(x); }

struct Columns {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::uint32_t rows = 0;

    explicit Columns(std::size_t width) : sum(width, 0.0), sum_sq(width, 0.0) {}

    void add(const std::vector<double>& x) {
        kernels::accumulate_columns(x, sum, sum_sq);
        ++rows;
    }
    double mean(std::size_t i) const { return sum[i] / rows; }
    double stddev(std::size_t i) const {
        if (rows < 2) return 0.0;
        double var = (sum_sq[i] - sum[i] * sum[i] / rows) / (rows - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }
};

void write_degree(const ExperimentSpec& spec, const std::vector<ReplicateResult>& results, OutputDir& out,
                  RunArtifacts& art) {
    const auto modes = modes_of(spec.engine);
    std::ostringstream agg, loglog, fits;
    agg << "d,count,ln_d,ln_count,mode\n";
    loglog << "ln_d,ln_count,mode\n";
    fits << "replicate,mode,method,alpha,magnitude,d_min,quality,n_tail,points,error\n";
    json fits_json = json::array();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        std::map<std::uint32_t, double> total;
        for (std::uint32_t r = 0; r < results.size(); ++r) {
            const ModeResult& mr = results[r][m];
            std::ostringstream rep;
            rep << "d,count,ln_d,ln_count,mode\n";
            for (const auto& [d, c] : mr.histogram.counts) {
                rep << d << ',' << c << ',' << fmt(std::log(double(d))) << ',' << fmt(std::log(double(c))) << ','
                    << modes[m].name << '\n';
                total[d] += double(c);
            }
            std::string name = rep_name(r, modes[m].name, "degree");
            out.write(name, rep.str());
            art.replicate_csvs.push_back(out.root() / name);

            for (const FitRecord& f : mr.fits) {
                json fj{{"replicate", r}, {"mode", modes[m].name}, {"method", fit_method_name(f.method)}};
                fits << r << ',' << modes[m].name << ',' << fit_method_name(f.method) << ',';
                if (f.fit) {
                    const PowerLawFit& p = *f.fit;
                    fits << fmt(p.alpha) << ',' << fmt(p.magnitude()) << ',' << p.d_min << ',' << fmt(p.quality) << ','
                         << p.n_tail << ',' << p.points << ",\n";
                    fj["fit"] = json::parse(fit_to_json(p));
                } else {
                    std::string err = f.error;
                    std::replace(err.begin(), err.end(), ',', ';');
                    fits << ",,,,,," << err << '\n';
                    fj["error"] = f.error;
                }
                fits_json.push_back(std::move(fj));
            }
        }
        for (const auto& [d, sum] : total) {
            double mean = sum / double(results.size());
            agg << d << ',' << fmt(mean) << ',' << fmt(std::log(double(d))) << ',' << fmt(std::log(mean)) << ','
                << modes[m].name << '\n';
            loglog << fmt(std::log(double(d))) << ',' << fmt(std::log(mean)) << ',' << modes[m].name << '\n';
        }
    }
    out.write("degree.csv", agg.str());
    out.write("loglog.csv", loglog.str());
    out.write("fits.csv", fits.str());
    out.write("fits.json", fits_json.dump(2) + "\n");
    for (const char* f : {"degree.csv", "loglog.csv", "fits.csv", "fits.json"}) art.aggregated_csvs.push_back(out.root() / f);
}

void write_diameter(const ExperimentSpec& spec, const std::vector<ReplicateResult>& results, OutputDir& out,
                    RunArtifacts& art, json& notes) {
    const auto modes = modes_of(spec.engine);
    std::ostringstream agg;
    agg << "t,mean,stddev,mode\n";
    std::uint64_t approximate = 0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto& schedule = results.front()[m].diameters;
        Columns cols(schedule.size());
        for (std::uint32_t r = 0; r < results.size(); ++r) {
            const auto& points = results[r][m].diameters;
            std::ostringstream rep;
            rep << "t,value,mode\n";
            std::vector<double> row;
            for (const DiameterPoint& p : points) {
                rep << p.t << ',' << p.value << ',' << modes[m].name << '\n';
                row.push_back(double(p.value));
                if (!p.exact) ++approximate;
            }
            cols.add(row);
            std::string name = rep_name(r, modes[m].name, "diameter");
            out.write(name, rep.str());
            art.replicate_csvs.push_back(out.root() / name);
        }
        for (std::size_t i = 0; i < schedule.size(); ++i)
            agg << schedule[i].t << ',' << fmt(cols.mean(i)) << ',' << fmt(cols.stddev(i)) << ',' << modes[m].name
                << '\n';
    }
    notes["approximate_diameters"] = approximate;
    out.write("diameter.csv", agg.str());
    art.aggregated_csvs.push_back(out.root() / "diameter.csv");
}

void write_coverage(const ExperimentSpec& spec, const std::vector<ReplicateResult>& results, OutputDir& out,
                    RunArtifacts& art) {
    const auto modes = modes_of(spec.engine);
    const std::uint32_t slots = spec.sir.max_steps;
    std::ostringstream agg, summary;
    agg << "t,coverage_mean,coverage_std,mode\n";
    summary << "replicate,mode,final_coverage,steps_to_target,steps_to_stability\n";
    for (std::size_t m = 0; m < modes.size(); ++m) {
        Columns cols(std::size_t(slots) + 1);
        for (std::uint32_t r = 0; r < results.size(); ++r) {
            const SirTrace& trace = results[r][m].sir;
            std::ostringstream rep;
            write_sir_csv(rep, trace);
            std::string name = rep_name(r, modes[m].name, "sir");
            out.write(name, rep.str());
            art.replicate_csvs.push_back(out.root() / name);

            std::vector<double> row(std::size_t(slots) + 1);
            for (std::uint32_t t = 0; t <= slots; ++t) row[t] = coverage_at(trace, t);
            cols.add(row);

            std::string reached = "NA";
            for (const SirSample& s : trace.series) {
                if (s.coverage >= kCoverageTarget) {
                    reached = std::to_string(s.t);
                    break;
                }
            }
            summary << r << ',' << modes[m].name << ',' << fmt(rumor_coverage(trace.final_state)) << ',' << reached
                    << ',' << trace.steps_to_stability << '\n';
        }
        for (std::uint32_t t = 0; t <= slots; ++t)
            agg << t << ',' << fmt(cols.mean(t)) << ',' << fmt(cols.stddev(t)) << ',' << modes[m].name << '\n';
    }
    out.write("coverage.csv", agg.str());
    out.write("rumor_summary.csv", summary.str());
    art.aggregated_csvs.push_back(out.root() / "coverage.csv");
    art.aggregated_csvs.push_back(out.root() / "rumor_summary.csv");
}

void write_theory(const ExperimentSpec& spec, const BipartiteGraph& seed_graph, OutputDir& out, RunArtifacts& art) {
    const EvolutionConfig& e = spec.evolution;
    EvolutionConfig off = e;
    off.p_search = 0.0;
    std::ostringstream table;
    table << "i,fraction_without_engine,fraction_with_engine\n";
    for (std::uint32_t i = e.c_u; i <= spec.theory_max_degree; ++i)
        table << i << ',' << fmt(theoretical_degree_fraction(i, off, spec.u_term)) << ','
              << fmt(theoretical_degree_fraction(i, e, spec.u_term)) << '\n';
    out.write("theory.csv", table.str());

    const double u = double(seed_graph.topic_count());
    RouteExpectation route = expected_route(double(seed_graph.edge_count()), double(seed_graph.user_count()), u,
                                            spec.d_max, e);
    json j{{"model_exponent", model_exponent(e)},
           {"route",
            {{"e0", route.e0},
             {"n", route.n},
             {"u", route.u},
             {"d_max", route.d_max},
             {"with_engine", route.value_with_engine},
             {"without_engine", route.value_without_engine}}},
           {"worst_case_diameter",
            {{"u", u},
             {"without_engine", worst_case_diameter(u, e.p_search, false)},
             {"with_engine", worst_case_diameter(u, e.p_search, true)}}}};
    out.write("theory.json", j.dump(2) + "\n");
    art.aggregated_csvs.push_back(out.root() / "theory.csv");
    art.aggregated_csvs.push_back(out.root() / "theory.json");
}

}  // namespace

RunArtifacts run_experiment(const ExperimentSpec& input) {
    const auto start = std::chrono::steady_clock::now();
    input.validate();
    ExperimentSpec spec = input;

    std::optional<BipartiteGraph> dataset_seed;
    if (spec.seed_graph.source == SeedGraphSpec::Source::Dataset) {
        dataset_seed = load_dataset_seed(spec);
        if (spec.steps_from_seed_size) {
            spec.evolution.steps = (dataset_seed->user_count() + dataset_seed->topic_count()) / 2;
            spec.steps_from_seed_size = false;
        }
    }

    OutputDir out{fs::path(spec.output_dir)};
    RunArtifacts art;
    art.output_dir = out.root();
    json notes = json::object();

    json seeds = json::array();
    if (spec.kind == ExperimentKind::TheoryTables) {
        BipartiteGraph g = seed_graph_for(spec, 0, dataset_seed ? &*dataset_seed : nullptr);
        write_theory(spec, g, out, art);
    } else {
        for (std::uint32_t r = 0; r < spec.replicates; ++r) seeds.push_back(replicate_seed(spec, r));
        auto results = run_replicates(spec, dataset_seed ? &*dataset_seed : nullptr);
        switch (spec.kind) {
        case ExperimentKind::DegreeDistribution:
            write_degree(spec, results, out, art);
            break;
        case ExperimentKind::DiameterTrace:
            write_diameter(spec, results, out, art, notes);
            break;
        case ExperimentKind::RumorCoverage:
            write_coverage(spec, results, out, art);
            break;
        case ExperimentKind::TheoryTables:
            break;
        }
    }

    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json files_rep = json::array(), files_agg = json::array();
    for (const auto& p : art.replicate_csvs) files_rep.push_back(fs::relative(p, out.root()).generic_string());
    for (const auto& p : art.aggregated_csvs) files_agg.push_back(fs::relative(p, out.root()).generic_string());
    json manifest{{"schema_version", kSpecSchemaVersion},
                  {"tool", "searchnet"},
                  {"version", SEARCHNET_VERSION},
                  {"spec", spec_json(spec)},
                  {"replicate_seeds", seeds},
                  {"kernel_isa", std::string(kernels::isa_name(kernels::active_isa()))},
                  {"wall_seconds", art.wall_seconds},
                  {"notes", notes},
                  {"files", {{"replicates", files_rep}, {"aggregated", files_agg}}}};
    out.write("manifest.json", manifest.dump(2) + "\n");
    art.manifest = out.root() / "manifest.json";
    return art;
}

// ---------------------------------------------------------------------------
// Figures

Figure parse_figure(const std::string& name) {
    for (auto f : {Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5})
        if (name == figure_name(f)) return f;
    throw ParameterError("unknown figure: " + name + " (expected fig2, fig3, fig4 or fig5)");
}

const char* figure_name(Figure f) noexcept {
    switch (f) {
    case Figure::Fig2:
        return "fig2";
    case Figure::Fig3:
        return "fig3";
    case Figure::Fig4:
        return "fig4";
    case Figure::Fig5:
        return "fig5";
    }
    return "?";
}

ExperimentSpec figure_spec(Figure figure) {
    ExperimentSpec s;
    s.seed_graph.synthetic = SeedGraphOptions{10, 10, 2, 2, true};
    s.evolution.beta = 0.5;
    s.evolution.p_search = 0.1;
    s.evolution.c_u = 2;
    s.evolution.c_t = 2;
    s.evolution.seed = 20100101;
    s.engine = EngineMode::Paired;
    s.output_dir = std::string("out/") + figure_name(figure);
    switch (figure) {
    case Figure::Fig2:
    case Figure::Fig3:
        s.kind = ExperimentKind::DegreeDistribution;
        s.evolution.steps = 50000;
        s.replicates = 10;
        s.d_floor = 11;
        s.fit_d_min = 11;
        break;
    case Figure::Fig4:
        s.kind = ExperimentKind::DiameterTrace;
        s.evolution.steps = 2000;
        s.record_interval = 20;
        s.replicates = 10;
        break;
    case Figure::Fig5:
        s.kind = ExperimentKind::RumorCoverage;
        s.evolution.steps = 20000;
        s.replicates = 10;
        break;
    }
    return s;
}

RunArtifacts reproduce_figures(Figure figure, const fs::path& output_dir,
                               const std::function<void(ExperimentSpec&)>& adjust) {
    ExperimentSpec spec = figure_spec(figure);
    spec.output_dir = output_dir.string();
    if (adjust) adjust(spec);
    return run_experiment(spec);
}

// ---------------------------------------------------------------------------
// CSV reading

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ParameterError("no column named " + std::string(name));
}

static std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable table;
    std::string line;
    if (std::getline(in, line)) table.header = split_row(line);
    while (std::getline(in, line))
        if (!line.empty()) table.rows.push_back(split_row(line));
    return table;
}

}  // namespace searchnet
