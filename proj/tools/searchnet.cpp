// Command-line front end: ingest datasets, run single evolutions and
// rumor simulations, measure graphs, and run batch experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "searchnet/csv.hpp"
#include "searchnet/error.hpp"
#include "searchnet/evolution.hpp"
#include "searchnet/harness.hpp"
#include "searchnet/ingest.hpp"
#include "searchnet/kernels.hpp"
#include "searchnet/metrics.hpp"
#include "searchnet/sir.hpp"

namespace fs = std::filesystem;
using namespace searchnet;

namespace {

enum Exit { kOk = 0, kFailure = 1, kBadInput = 2, kIoFailure = 3, kIngestFailure = 4 };

fs::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

BipartiteGraph read_graph(const std::string& path) {
    return load_bipartite_file(path);
}

void print_artifacts(const RunArtifacts& art) {
    std::cout << "wrote " << art.aggregated_csvs.size() << " aggregated and " << art.replicate_csvs.size()
              << " replicate files to " << art.output_dir.string() << " in " << format_double(art.wall_seconds)
              << " s\n";
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> replicates;
    std::optional<std::string> engine;
    std::optional<std::uint32_t> threads;
    std::optional<std::string> out;

    void add_to(CLI::App* app) {
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--replicates", replicates, "Number of replicates");
        app->add_option("--engine", engine, "on, off or paired");
        app->add_option("--threads", threads, "Worker threads");
        app->add_option("--out", out, "Output directory");
    }

    void apply(ExperimentSpec& s) const {
        if (seed) s.evolution.seed = *seed;
        if (replicates) s.replicates = *replicates;
        if (engine) s.engine = parse_engine_mode(*engine);
        if (threads) s.threads = *threads;
        if (out) s.output_dir = *out;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolving user/topic networks with a search engine"};
    app.set_version_flag("--version", SEARCHNET_VERSION);
    app.require_subcommand(1);

    // ingest
    std::string in_path, ingest_out = "out/ingest", strategy = "DoubleCover";
    bool directed = false;
    double split_fraction = 0.5;
    std::uint64_t ingest_seed = 0;
    std::uint32_t ingest_cu = 2, ingest_ct = 2;
    auto* ingest = app.add_subcommand("ingest", "Load an edge list and build a bipartite seed graph");
    ingest->add_option("--input", in_path, "Edge list file")->required();
    ingest->add_flag("--directed", directed, "Treat edges as directed");
    ingest->add_option("--strategy", strategy, "DirectBipartite, DoubleCover or RandomSplit");
    ingest->add_option("--split-fraction", split_fraction, "RandomSplit user probability");
    ingest->add_option("--seed", ingest_seed, "Seed for RandomSplit and degree top-up");
    ingest->add_option("--c-u", ingest_cu, "Minimum user degree");
    ingest->add_option("--c-t", ingest_ct, "Minimum topic degree");
    ingest->add_option("--out", ingest_out, "Output directory");

    // evolve
    EvolutionConfig evo;
    std::string evo_graph, evo_out = "out/evolve", policy = "UniformRandom";
    std::uint32_t seed_users = 10, seed_topics = 10;
    bool write_trace = false;
    auto* evolve = app.add_subcommand("evolve", "Grow one graph");
    evolve->add_option("--steps", evo.steps, "Number of arrivals")->required();
    evolve->add_option("--seed", evo.seed, "Seed");
    evolve->add_option("--beta", evo.beta, "Probability an arrival is a user");
    evolve->add_option("--p-search", evo.p_search, "Search engine activation probability");
    evolve->add_option("--c-u", evo.c_u, "Edges copied by a new user");
    evolve->add_option("--c-t", evo.c_t, "Edges copied by a new topic");
    evolve->add_option("--policy", policy, "UniformRandom, DegreeRanked or SimilarityRanked");
    evolve->add_option("--graph", evo_graph, "Seed graph in bipartite format (default: synthetic)");
    evolve->add_option("--seed-users", seed_users, "Synthetic seed users");
    evolve->add_option("--seed-topics", seed_topics, "Synthetic seed topics");
    evolve->add_flag("--trace", write_trace, "Write trace.jsonl");
    evolve->add_option("--out", evo_out, "Output directory");

    // metrics
    std::string metrics_graph, metrics_out = "out/metrics", method = "DiscreteMLE";
    std::uint32_t d_floor = 11, fit_d_min = 11;
    auto* metrics = app.add_subcommand("metrics", "Degree histograms, power-law fits and diameter of a graph");
    metrics->add_option("--graph", metrics_graph, "Graph in bipartite format")->required();
    metrics->add_option("--d-floor", d_floor, "Smallest degree kept in histograms");
    metrics->add_option("--fit-d-min", fit_d_min, "Smallest degree used by the fit");
    metrics->add_option("--method", method, "LogLogRegression or DiscreteMLE");
    metrics->add_option("--out", metrics_out, "Output directory");

    // sir
    SirConfig sir;
    std::string sir_graph, sir_out = "out/sir", sir_engine = "paired", exposure = "PrevalenceScaled";
    auto* sir_cmd = app.add_subcommand("sir", "Rumor spreading on a graph");
    sir_cmd->add_option("--graph", sir_graph, "Graph in bipartite format")->required();
    sir_cmd->add_option("--lambda", sir.lambda, "Per-contact infection probability");
    sir_cmd->add_option("--mu", sir.mu, "Recovery probability");
    sir_cmd->add_option("--xi", sir.xi, "Search exposure probability");
    sir_cmd->add_option("--l0", sir.initial_fraction, "Initial infectious fraction");
    sir_cmd->add_option("--steps", sir.max_steps, "Maximum slots");
    sir_cmd->add_option("--seed", sir.seed, "Seed");
    sir_cmd->add_option("--exposure", exposure, "PrevalenceScaled or TopicMediated");
    sir_cmd->add_option("--engine", sir_engine, "on, off or paired");
    sir_cmd->add_option("--out", sir_out, "Output directory");

    // run / validate / reproduce
    std::string config;
    Overrides run_over;
    auto* run = app.add_subcommand("run", "Run an experiment spec (or rerun a manifest)");
    run->add_option("--config", config, "Spec or manifest JSON")->required();
    run_over.add_to(run);

    std::string validate_graph;
    std::uint32_t validate_cu = 0, validate_ct = 0;
    auto* validate = app.add_subcommand("validate", "Run the invariant suite on a graph file, or check a spec");
    auto* vg = validate->add_option("--graph", validate_graph, "Graph in bipartite format");
    auto* vc = validate->add_option("--config", config, "Spec or manifest JSON; prints it fully resolved");
    vg->excludes(vc);
    validate->add_option("--c-u", validate_cu, "Required minimum user degree");
    validate->add_option("--c-t", validate_ct, "Required minimum topic degree");

    std::string figure;
    Overrides fig_over;
    auto* reproduce = app.add_subcommand("reproduce", "Run a built-in figure experiment");
    reproduce->add_option("--figure", figure, "fig2, fig3, fig4, fig5 or all")->required();
    fig_over.add_to(reproduce);

    auto* isa = app.add_subcommand("isa", "Print the kernel variants available on this machine");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            LoadOptions opts;
            opts.directed = directed;
            RawGraph raw = load_edge_list_file(in_path, opts);
            BipartizeStrategy s;
            s.kind = parse_strategy_kind(strategy);
            s.split_fraction = split_fraction;
            s.seed = ingest_seed;
            SeedResult seed = seed_from_dataset(raw, s, ingest_cu, ingest_ct);
            fs::path dir = ensure_dir(ingest_out);
            auto g = open_out(dir / "seed.bip");
            write_bipartite(g, seed.bipartite.graph);
            auto p = open_out(dir / "provenance.json");
            p << provenance_json(raw, s, seed) << '\n';
            std::cout << "raw: " << raw.node_count() << " nodes, " << raw.edges.size() << " edges, "
                      << raw.self_loops_dropped << " self-loops dropped, " << raw.duplicates_dropped
                      << " duplicates dropped\n";
            std::cout << "seed graph: " << seed.bipartite.graph.user_count() << " users, "
                      << seed.bipartite.graph.topic_count() << " topics, " << seed.bipartite.graph.edge_count()
                      << " edges\n";
        } else if (*evolve) {
            evo.search_policy.kind = parse_policy_kind(policy);
            evo.validate();
            BipartiteGraph g;
            if (!evo_graph.empty()) {
                g = read_graph(evo_graph);
            } else {
                Rng rng(mix_seed(evo.seed, 31));
                g = new_seed_graph(SeedGraphOptions{seed_users, seed_topics, evo.c_u, evo.c_t, true}, rng);
            }
            EvolutionTrace trace = run_evolution(g, evo);
            fs::path dir = ensure_dir(evo_out);
            auto out = open_out(dir / "graph.bip");
            write_bipartite(out, g);
            for (Side side : {Side::User, Side::Topic}) {
                auto h = open_out(dir / (std::string("degree_") + side_name(side) + ".csv"));
                write_histogram_csv(h, degree_histogram(g, side, 1, evo.steps));
            }
            if (write_trace) {
                auto t = open_out(dir / "trace.jsonl");
                write_trace_jsonl(t, trace);
            }
            std::cout << "graph: " << g.user_count() << " users, " << g.topic_count() << " topics, "
                      << g.edge_count() << " edges\n";
        } else if (*metrics) {
            BipartiteGraph g = read_graph(metrics_graph);
            FitMethod m = parse_fit_method(method);
            fs::path dir = ensure_dir(metrics_out);
            for (Side side : {Side::User, Side::Topic}) {
                DegreeHistogram h = degree_histogram(g, side, d_floor);
                auto out = open_out(dir / (std::string("degree_") + side_name(side) + ".csv"));
                write_histogram_csv(out, h);
                try {
                    PowerLawFit fit = fit_power_law(degree_histogram(g, side, 1), fit_d_min, m);
                    auto f = open_out(dir / (std::string("fit_") + side_name(side) + ".json"));
                    f << fit_to_json(fit) << '\n';
                    std::cout << side_name(side) << " exponent " << format_double(fit.alpha) << '\n';
                } catch (const FitError& e) {
                    std::cout << side_name(side) << " fit skipped: " << e.what() << '\n';
                }
            }
            DiameterReport d;
            try {
                d = diameter_exact(g);
            } catch (const SizeError&) {
                Rng rng(1);
                d = diameter_approx(g, 16, rng);
            }
            auto out = open_out(dir / "diameter.json");
            out << "{\"lower\": " << d.lower << ", \"upper\": " << d.upper << ", \"component_size\": "
                << d.component_size << ", \"exact\": " << (d.is_exact ? "true" : "false") << "}\n";
            std::cout << "diameter " << d.lower << (d.is_exact ? "" : " (lower bound)") << '\n';
        } else if (*sir_cmd) {
            BipartiteGraph g = read_graph(sir_graph);
            sir.exposure_model = parse_exposure_model(exposure);
            EngineMode mode = parse_engine_mode(sir_engine);
            fs::path dir = ensure_dir(sir_out);
            for (bool engine : {true, false}) {
                if ((engine && mode == EngineMode::Off) || (!engine && mode == EngineMode::On)) continue;
                SirConfig c = sir;
                c.engine_enabled = engine;
                c.validate();
                SirTrace trace = run_sir(g, c);
                auto out = open_out(dir / (std::string("sir_") + (engine ? "on" : "off") + ".csv"));
                write_sir_csv(out, trace);
                std::cout << "engine " << (engine ? "on" : "off") << ": coverage "
                          << format_double(rumor_coverage(trace.final_state)) << " after "
                          << trace.steps_to_stability << " steps\n";
            }
        } else if (*run) {
            ExperimentSpec spec = load_spec_file(config);
            run_over.apply(spec);
            print_artifacts(run_experiment(spec));
        } else if (*validate) {
            if (!validate_graph.empty()) {
                BipartiteGraph g = read_graph(validate_graph);
                auto problems = check_invariants(g, validate_cu, validate_ct);
                if (!problems.empty()) {
                    for (const auto& p : problems) std::cerr << "error: " << p << '\n';
                    return kFailure;
                }
                std::cout << "ok: " << g.user_count() << " users, " << g.topic_count() << " topics, " << g.edge_count()
                          << " edges\n";
            } else if (!config.empty()) {
                ExperimentSpec spec = load_spec_file(config);
                std::cout << spec_to_json(spec) << '\n';
            } else {
                throw ParameterError("validate needs --graph or --config");
            }
        } else if (*reproduce) {
            std::vector<Figure> figures;
            if (figure == "all")
                figures = {Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5};
            else
                figures = {parse_figure(figure)};
            for (Figure f : figures) {
                fs::path dir = fs::path(fig_over.out.value_or("out")) / figure_name(f);
                RunArtifacts art = reproduce_figures(f, dir, [&](ExperimentSpec& s) {
                    fig_over.apply(s);
                    s.output_dir = dir.string();
                });
                std::cout << figure_name(f) << ": ";
                print_artifacts(art);
            }
        } else if (*isa) {
            for (kernels::Isa i : kernels::available_isas()) std::cout << kernels::isa_name(i) << '\n';
            std::cout << "active: " << kernels::isa_name(kernels::active_isa()) << '\n';
        }
    } catch (const ParseError& e) {
        std::cerr << "error: ingest failed: " << e.what() << '\n';
        return kIngestFailure;
    } catch (const EmptyGraphError& e) {
        std::cerr << "error: ingest failed: " << e.what() << '\n';
        return kIngestFailure;
    } catch (const BipartizeError& e) {
        std::cerr << "error: ingest failed: " << e.what() << '\n';
        return kIngestFailure;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
