#pragma once

// Batch experiments: a declarative spec, seeded replicates, paired
// engine-on/engine-off runs, and CSV/JSON outputs.
//
// Output layout under spec.output_dir:
//   replicates/rep<NNN>_<mode>_<kind>.csv   per replicate and mode
//   degree.csv    d,count,ln_d,ln_count,mode          (DegreeDistribution)
//   loglog.csv    ln_d,ln_count,mode                   (DegreeDistribution)
//   fits.csv      replicate,mode,method,alpha,...      (DegreeDistribution)
//   diameter.csv  t,mean,stddev,mode                   (DiameterTrace)
//   coverage.csv  t,coverage_mean,coverage_std,mode    (RumorCoverage)
//   theory.csv / theory.json                           (TheoryTables)
//   manifest.json resolved spec, seeds, version, wall time

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "searchnet/evolution.hpp"
#include "searchnet/graph.hpp"
#include "searchnet/ingest.hpp"
#include "searchnet/sir.hpp"

namespace searchnet {

enum class ExperimentKind { DegreeDistribution, DiameterTrace, RumorCoverage, TheoryTables };
enum class EngineMode { On, Off, Paired };

const char* experiment_kind_name(ExperimentKind k) noexcept;
const char* engine_mode_name(EngineMode m) noexcept;
EngineMode parse_engine_mode(const std::string& name);

struct SeedGraphSpec {
    enum class Source { Synthetic, Dataset };

    Source source = Source::Synthetic;
    SeedGraphOptions synthetic{10, 10, 2, 2, true};
    std::string dataset_path;
    bool directed = false;
    BipartizeStrategy strategy;
};

inline constexpr int kSpecSchemaVersion = 1;

struct ExperimentSpec {
    int schema_version = kSpecSchemaVersion;
    ExperimentKind kind = ExperimentKind::DegreeDistribution;
    SeedGraphSpec seed_graph;
    /// evolution.seed is the master seed; replicate r uses mix_seed(seed, r).
    EvolutionConfig evolution;
    /// Dataset seeds only: when set, steps = 50% of the seed graph's nodes.
    bool steps_from_seed_size = false;
    SirConfig sir;
    std::uint32_t replicates = 1;
    std::uint64_t record_interval = 1;
    EngineMode engine = EngineMode::Paired;
    std::uint32_t threads = 1;
    Side side = Side::User;
    std::uint32_t d_floor = 11;
    std::uint32_t fit_d_min = 11;
    std::uint32_t theory_max_degree = 1000;
    double u_term = 1.0;
    double d_max = 100.0;
    std::string output_dir = "out";

    void validate() const;
};

std::string spec_to_json(const ExperimentSpec& spec);
/// Throws ParameterError ("invalid spec: ...") on bad JSON, unknown keys or
/// invalid values.
ExperimentSpec spec_from_json(std::string_view text);
/// Reads a spec file or a manifest.json written by run_experiment.
ExperimentSpec load_spec_file(const std::filesystem::path& path);

struct RunArtifacts {
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> replicate_csvs;
    std::vector<std::filesystem::path> aggregated_csvs;
    std::filesystem::path manifest;
    double wall_seconds = 0.0;
};

/// Seed used by replicate r of a spec.
std::uint64_t replicate_seed(const ExperimentSpec& spec, std::uint32_t replicate) noexcept;

/// Builds the time-0 graph of replicate r (identical for both modes).
BipartiteGraph build_seed_graph(const ExperimentSpec& spec, std::uint32_t replicate);

RunArtifacts run_experiment(const ExperimentSpec& spec);

enum class Figure { Fig2, Fig3, Fig4, Fig5 };

Figure parse_figure(const std::string& name);
const char* figure_name(Figure f) noexcept;

/// Built-in spec mirroring the evaluation protocol behind each figure.
/// fig3 shares fig2's runs; its log-log columns are loglog.csv.
ExperimentSpec figure_spec(Figure figure);

RunArtifacts reproduce_figures(Figure figure, const std::filesystem::path& output_dir,
                               const std::function<void(ExperimentSpec&)>& adjust = {});

/// Reads a CSV written by the harness: header names and rows of fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace searchnet
