#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesochaos/common.hpp"

namespace mesochaos::harness {

enum class Kind {
    bo_check,
    cue_laplace,
    cue_moments,
    sine_laplace,
    sine_gap,
    sine_moments,
    gmc_simulate,
    covariance_suite,
    selberg_table,
};

const std::vector<Kind>& all_kinds();
std::string kind_name(Kind k);
std::optional<Kind> kind_from_name(std::string_view name);
// The claim an experiment checks, named by its content.
std::string anchor(Kind k);

class SpecError : public Error {
public:
    explicit SpecError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

struct ExperimentSpec {
    Kind kind = Kind::bo_check;
    std::vector<int> N{4, 8, 16};
    double alpha = 0.5;
    std::vector<double> eps{0.1};
    double ell = 1.0;
    std::vector<double> beta;      // non-empty: ell = N^beta per row
    std::vector<double> gamma{0.5};
    std::vector<double> gamma2;    // selberg-table: gamma^2 values, overriding gamma
    int q = 2;
    std::vector<double> u{0.0, 0.5};
    std::vector<double> lengths{0.1, 0.2, 0.4};
    double r = 1.0;                // weight window [0, r]
    long trials = 0;
    std::string mollifier = "gaussian";
    std::uint64_t seed = 1;
    double tolerance = 1e-8;
    std::string out;

    // Throws SpecError listing every problem found.
    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentSpec from_json(const nlohmann::json& j);
};

// key = value lines grouped in [sections]; a document starting with '{' is read as JSON.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::filesystem::path& path);

// Regime diagnostics per N: N^{alpha-1}/eps (strong regime needs it small) and
// L(N)/(N^alpha log N) for growing windows.
nlohmann::json condition_flags(const ExperimentSpec& spec);

enum class ColumnType { integer, real, text };
struct Column {
    std::string name;
    ColumnType type = ColumnType::real;
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct ResultRecord {
    ExperimentSpec spec;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::json metadata = nlohmann::json::object();
    double wall_time = 0.0;
    std::string version;

    std::size_t column_index(std::string_view name) const;
    std::vector<double> real_column(std::string_view name) const;
    std::vector<std::string> text_column(std::string_view name) const;
    bool all_ok() const;  // every row has status "ok"
};

// Deterministic given (spec, seed); rows ordered by parameter index whatever `threads` is.
// Failures inside a row are caught and recorded in its status column.
ResultRecord run(const ExperimentSpec& spec, int threads = 1);

// CSV with a `name:type` header row plus a JSON sidecar (<csv>.meta.json).
void write_csv(const ResultRecord& record, const std::filesystem::path& csv);
ResultRecord read_record(const std::filesystem::path& csv);

enum class FigureStyle { loglog_decay, moment_compare, density_snapshot };
std::optional<FigureStyle> figure_style_from_name(std::string_view name);
FigureStyle default_style(Kind k);

// Self-contained SVG document.
std::string render_figure(const ResultRecord& record, FigureStyle style);
void emit_figure(const ResultRecord& record, FigureStyle style, const std::filesystem::path& svg);

struct OutputFiles {
    std::filesystem::path csv;
    std::filesystem::path meta;
    std::filesystem::path svg;  // empty when no figure was written
};

// <dir>/<kind>-<timestamp>.csv, .meta.json and, if requested, .svg.
OutputFiles write_outputs(const ResultRecord& record, const std::filesystem::path& dir, bool figure = true);

// Output directory: explicit value, else $MESOCHAOS_OUT, else "results".
std::filesystem::path output_directory(const std::string& explicit_dir);

std::string version();

}  // namespace mesochaos::harness
