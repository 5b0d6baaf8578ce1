#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mesochaos/harness.hpp"

namespace h = mesochaos::harness;

namespace {

struct RunArgs {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;
    bool check = false;
    bool no_figure = false;
};

int run_kind(h::Kind kind, const RunArgs& a, CLI::App& sub) {
    h::ExperimentSpec spec;
    if (!a.config.empty()) {
        spec = h::load_config(a.config);
        if (spec.kind != kind)
            throw h::SpecError({"config declares kind '" + h::kind_name(spec.kind) + "' but the command is '" +
                                h::kind_name(kind) + "'"});
    } else {
        spec.kind = kind;
    }
    if (sub.count("--seed")) spec.seed = a.seed;
    if (sub.count("--out")) spec.out = a.out;
    spec.validate();
    if (a.check) {
        std::cout << "ok: " << h::kind_name(kind) << " spec is valid\n" << spec.to_json().dump(2) << '\n';
        return 0;
    }
    h::ResultRecord rec = h::run(spec, a.threads);
    auto files = h::write_outputs(rec, h::output_directory(spec.out), !a.no_figure);
    std::cout << files.csv.string() << '\n' << files.meta.string() << '\n';
    if (!files.svg.empty()) std::cout << files.svg.string() << '\n';
    std::size_t failed = rec.metadata.value("failed_rows", std::size_t{0});
    std::cerr << rec.rows.size() << " rows, " << failed << " failed, " << rec.wall_time << " s\n";
    return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesoscopic chaos experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", h::version());

    RunArgs args;
    std::vector<std::pair<h::Kind, CLI::App*>> subs;
    for (h::Kind k : h::all_kinds()) {
        CLI::App* sub = app.add_subcommand(h::kind_name(k), h::anchor(k));
        sub->add_option("--config", args.config, "experiment file (key = value with sections, or JSON)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "master seed, overrides the config");
        sub->add_option("--out", args.out, "output directory (default $MESOCHAOS_OUT, else ./results)");
        sub->add_option("--threads", args.threads, "parallel rows")->check(CLI::PositiveNumber);
        sub->add_flag("--check", args.check, "validate the spec and exit");
        sub->add_flag("--no-figure", args.no_figure, "skip the SVG figure");
        subs.emplace_back(k, sub);
    }

    std::string csv, style, svg;
    CLI::App* fig = app.add_subcommand("figure", "render a figure from a stored record");
    fig->add_option("record", csv, "result CSV (its .meta.json sidecar is read too)")->required()->check(CLI::ExistingFile);
    fig->add_option("--style", style, "loglog-decay, moment-compare or density-snapshot");
    fig->add_option("-o,--output", svg, "SVG path (default: next to the CSV)");

    CLI11_PARSE(app, argc, argv);
    try {
        for (auto& [k, sub] : subs)
            if (sub->parsed()) return run_kind(k, args, *sub);
        if (fig->parsed()) {
            h::ResultRecord rec = h::read_record(csv);
            h::FigureStyle s = h::default_style(rec.spec.kind);
            if (!style.empty()) {
                auto parsed = h::figure_style_from_name(style);
                if (!parsed) throw mesochaos::DomainError("unknown figure style '" + style + "'");
                s = *parsed;
            }
            std::filesystem::path out = svg.empty() ? std::filesystem::path(csv).replace_extension(".svg")
                                                    : std::filesystem::path(svg);
            h::emit_figure(rec, s, out);
            std::cout << out.string() << '\n';
        }
    } catch (const h::SpecError& e) {
        std::cerr << "invalid spec:\n";
        for (const auto& d : e.diagnostics()) std::cerr << "  " << d << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
