#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dfderiv.hpp"

namespace {

struct Flags {
    std::string path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> probe_degree;
    std::optional<std::uint64_t> budget;
    std::size_t partitions = 1;
    std::string out;
    std::string format = "json";
};

int emit(const dfderiv::Json& report, const Flags& f) {
    const std::string text = f.format == "text" ? dfderiv::render_text(report) : report.dump(2) + "\n";
    if (f.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(f.out, std::ios::binary);
        if (!o) {
            std::cerr << "cannot write " << f.out << "\n";
            return dfderiv::exit_usage;
        }
        o << text;
    }
    return 0;
}

int run(const Flags& f, std::set<std::string> types) {
    try {
        auto s = dfderiv::parse_scenario(f.path);
        dfderiv::RunOptions o;
        o.seed = f.seed;
        o.probe_degree = f.probe_degree;
        o.budget = f.budget;
        o.partitions = f.partitions;
        o.types = std::move(types);
        auto r = dfderiv::run_scenario(s, o);
        if (int e = emit(r.report, f)) return e;
        return r.exit_code;
    } catch (const dfderiv::Error& e) {
        std::cerr << e.what() << "\n";
        return dfderiv::exit_code_for(e.code());
    }
}

/** Renders a saved report, or runs the file as a scenario when it is not one. */
int report(const Flags& f) {
    std::ifstream in(f.path, std::ios::binary);
    if (!in) {
        std::cerr << f.path << ": cannot open file\n";
        return dfderiv::exit_usage;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = dfderiv::Json::parse(ss.str(), nullptr, false);
    if (doc.is_object() && doc.contains("exit_code") && doc.contains("tasks")) {
        if (int e = emit(doc, f)) return e;
        return doc["exit_code"].get<int>();
    }
    return run(f, {});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checks, enumerations and counterexample oracles for (delta,f)-derivations"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* sub) {
        sub->add_option("scenario", f.path, "Scenario file (or saved report for `report`)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "Probe and sampling seed");
        sub->add_option("--probe-degree", f.probe_degree, "Maximum probe degree for polynomial carriers");
        sub->add_option("--budget", f.budget, "Enumeration node budget");
        sub->add_option("--partitions", f.partitions, "Worker partitions")->check(CLI::PositiveNumber);
        sub->add_option("--out", f.out, "Write the report here instead of stdout");
        sub->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    };
    auto* verify = app.add_subcommand("verify", "Run check, evaluate, fact and inclusion tasks");
    auto* oracle = app.add_subcommand("oracle", "Run oracle and lemma-suite tasks");
    auto* enumerate = app.add_subcommand("enumerate", "Run enumeration tasks");
    auto* all = app.add_subcommand("run", "Run every task");
    auto* rep = app.add_subcommand("report", "Render a saved report, or run a scenario and render it");
    for (auto* s : {verify, oracle, enumerate, all, rep}) common(s);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : dfderiv::exit_usage;
    }
    if (verify->parsed()) return run(f, {"check", "evaluate", "fact", "inclusion"});
    if (oracle->parsed()) return run(f, {"oracle", "lemma_suite"});
    if (enumerate->parsed()) return run(f, {"enumerate"});
    if (all->parsed()) return run(f, {});
    return report(f);
}
