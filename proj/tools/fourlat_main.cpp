// Command line driver: a subcommand picks the experiment family, a JSON
// config supplies the details, and --h-min/--h-count rebuild the mesh list.
// Exit codes: 0 all verdicts pass, 1 any fail, 2 configuration error.

#include "fourlat/errors.hpp"
#include "fourlat/harness.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_path;
    double h_min = 0.0;
    int h_count = 0;
};

void print_report(const fourlat::RateReport& rep) {
    std::printf("%s  [%s, %s]\n", rep.experiment.c_str(), rep.kind.c_str(),
                rep.symbol.c_str());
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        if (i < rep.labels.size())
            std::printf("  %-18s defect=%.6g\n", rep.labels[i].c_str(),
                        rep.points[i].error);
        else
            std::printf("  h=%-12.6g error=%.10g\n", rep.points[i].h, rep.points[i].error);
    }
    std::printf("  slope=%.6g  gamma=%.6g  r2=%.6g  tolerance=%.3g  -> %s\n", rep.slope,
                rep.gamma_predicted, rep.r2, rep.tolerance, rep.pass ? "pass" : "FAIL");
    if (!rep.note.empty()) std::printf("  %s\n", rep.note.c_str());
}

} // namespace

int main(int argc, char** argv) {
    using fourlat::ExperimentKind;

    CLI::App app{"lattice discretization experiments for multiplier operators"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::vector<ExperimentKind>>> families = {
        {"identity", {ExperimentKind::identity_suite}},
        {"rate", {ExperimentKind::rate_free, ExperimentKind::rate_potential}},
        {"spectrum",
         {ExperimentKind::spectrum_distance, ExperimentKind::local_spectrum,
          ExperimentKind::gap, ExperimentKind::projection}},
        {"eigen", {ExperimentKind::eigen_track}},
        {"commutator", {ExperimentKind::commutator}},
        {"blowup", {ExperimentKind::y_blowup}},
    };

    Flags flags;
    for (const auto& fam : families) {
        CLI::App* sub = app.add_subcommand(fam.first, fam.first + " experiments");
        sub->add_option("--config", flags.config_path, "JSON experiment config")
            ->required();
        sub->add_option("--h-min", flags.h_min,
                        "smallest mesh; the list doubles upward from here");
        sub->add_option("--h-count", flags.h_count, "number of mesh points");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fourlat::ExperimentConfig cfg = fourlat::load_config(flags.config_path);

        const std::string family = app.get_subcommands().front()->get_name();
        for (const auto& fam : families) {
            if (fam.first != family) continue;
            bool found = false;
            for (const auto kind : fam.second) found = found || kind == cfg.kind;
            if (!found)
                throw fourlat::ConfigError("config kind '" + kind_name(cfg.kind) +
                                           "' does not belong to the '" + family +
                                           "' subcommand");
        }

        if (flags.h_min > 0.0 || flags.h_count > 0) {
            const int count = flags.h_count > 0
                                  ? flags.h_count
                                  : static_cast<int>(std::max<std::size_t>(
                                        cfg.h_list.size(), 4));
            const double h_min =
                flags.h_min > 0.0
                    ? flags.h_min
                    : (cfg.h_list.empty() ? std::pow(2.0, -7) : cfg.h_list.back());
            cfg.h_list.clear();
            for (int k = count - 1; k >= 0; --k)
                cfg.h_list.push_back(h_min * std::pow(2.0, k));
        }

        const fourlat::RateReport rep = fourlat::run(cfg);
        print_report(rep);
        return rep.pass ? 0 : 1;
    } catch (const fourlat::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
