// Command-line front end: sfplap <esd|compare|limit|decay|selftest> [flags]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfplap/experiment.hpp"

namespace {

struct Flags {
    std::optional<std::size_t> n;
    std::optional<double> alpha;
    std::optional<double> tau;
    std::optional<double> m;
    bool degenerate_weights = false;
    std::optional<std::string> kind;
    std::optional<std::string> kind2;
    std::optional<std::size_t> replicas;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bins;
    std::optional<std::string> out;
    std::vector<int> orders;
    bool no_timestamp = false;
    std::vector<std::size_t> sizes;
    std::optional<std::string> config;
};

void add_flags(CLI::App& sub, Flags& f) {
    sub.add_option("--n", f.n, "matrix size N");
    sub.add_option("--alpha", f.alpha, "distance exponent in [0, 1)");
    sub.add_option("--tau", f.tau, "Pareto exponent (P(W > t) = t^(1 - tau))");
    sub.add_option("--m", f.m, "truncation level");
    sub.add_flag("--degenerate-weights", f.degenerate_weights, "use W = 1 for every vertex");
    sub.add_option("--kind", f.kind, "ensemble kind");
    sub.add_option("--kind2", f.kind2, "second ensemble kind");
    sub.add_option("--replicas", f.replicas, "number of replicas");
    sub.add_option("--seed", f.seed, "base seed");
    sub.add_option("--bins", f.bins, "histogram bins");
    sub.add_option("--out", f.out, "output directory");
    sub.add_option("--orders", f.orders, "moment orders")->delimiter(',');
    sub.add_flag("--no-timestamp", f.no_timestamp, "omit wall-clock and runtime from outputs");
    sub.add_option("--sizes", f.sizes, "sizes N for decay sweeps")->delimiter(',');
    sub.add_option("--config", f.config, "JSON config file; flags override it");
}

sfplap::ExperimentConfig resolve(const std::string& command, const Flags& f) {
    sfplap::ExperimentConfig c = f.config ? sfplap::ExperimentConfig::from_file(*f.config) : sfplap::ExperimentConfig{};
    c.command = command;
    if (f.n) c.n = *f.n;
    if (f.alpha) c.alpha = *f.alpha;
    if (f.tau) c.tau = f.tau;
    if (f.m) c.m = f.m;
    if (f.degenerate_weights) c.degenerate_weights = true;
    if (f.kind) c.kind = *f.kind;
    if (f.kind2) c.kind2 = f.kind2;
    if (f.replicas) c.replicas = *f.replicas;
    if (f.seed) c.seed = *f.seed;
    if (f.bins) c.bins = *f.bins;
    if (f.out) c.out = *f.out;
    if (!f.orders.empty()) c.orders = f.orders;
    if (f.no_timestamp) c.no_timestamp = true;
    if (!f.sizes.empty()) c.sizes = f.sizes;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of centred scale-free percolation Laplacians"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    const std::pair<const char*, const char*> commands[] = {
        {"esd", "eigenvalues, histogram and moments of one ensemble"},
        {"compare", "spectral distances between two ensembles on shared noise"},
        {"limit", "limiting moments, and the density for degenerate weights"},
        {"decay", "Hoffman-Wielandt distance between two ensembles over a size sweep"},
        {"selftest", "run every command twice and check byte-identical output"},
    };
    for (const auto& [name, about] : commands) {
        CLI::App* sub = app.add_subcommand(name, about);
        add_flags(*sub, flags);
        subs.emplace_back(name, sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;

    try {
        const sfplap::RunResult r = sfplap::dispatch(resolve(command, flags));
        for (const auto& msg : r.messages) (command == "selftest" ? std::cout : std::cerr) << msg << '\n';
        for (const auto& f : r.files) std::cout << f.string() << '\n';
        return r.exit_code;
    } catch (const sfplap::usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
