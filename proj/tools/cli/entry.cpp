#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "run.hpp"

namespace mobhoro::cli {

namespace {

struct CommandSpec {
    const char* name;
    const char* help;
    std::vector<const char*> keys;
};

const std::vector<CommandSpec>& command_specs()
{
    static const std::vector<CommandSpec> specs{
        {"sieve", "Tabulate mu, lambda or the primes up to N", {"n", "nu"}},
        {"decompose", "Build the block decomposition of [1, N) and report exact counts", {"n", "alpha", "j0", "j1"}},
        {"criterion",
         "Bilinear correlations, tau estimate and the inequality ledger for sum nu(n) F(n)",
         {"n", "alpha", "j0", "j1", "cutoff", "exclude", "m", "nu", "seq"}},
        {"orbit", "Horocycle orbit samples and Birkhoff average", {"point", "obs", "n", "first", "last", "quad"}},
        {"correlate", "Pair correlation (1/N) sum f(xi u^pn) f(xi u^qn)", {"point", "obs", "p", "q", "n", "quad"}},
        {"disjointness", "(1/N) sum nu(n) f(T^n xi) along a ladder of N", {"point", "obs", "ladder", "nu", "quad"}},
        {"classify", "Correlator group of a boundary point", {"z"}},
    };
    return specs;
}

const std::map<std::string, std::string>& key_help()
{
    static const std::map<std::string, std::string> h{
        {"n", "upper limit N"},
        {"alpha", "block ratio alpha in (0, 1]; default 0.3"},
        {"j0", "first block index (default from the schedule)"},
        {"j1", "block index bound, blocks are j0 <= j < j1"},
        {"cutoff", "prime cutoff P for the correlation hypothesis"},
        {"exclude", "excluded prime pairs, e.g. 2:3,5:7"},
        {"m", "fixed correlation length M (default floor(N / max(p1, p2)))"},
        {"nu", "mobius | liouville (sieve: also primes)"},
        {"seq", "exp:theta=<real> | const:c=<real> | csv:<path>"},
        {"point", "identity | lower:t=<v> | cusp:z=<v> | matrix:a=..,b=..,c=..,d=.."},
        {"obs", "const:c= | bump:y0=,width= | well:y0=,width= | frame:k=,y0=,width= [,centered]"},
        {"quad", "quadrature y=,nx=,ns=,ntheta=,tail="},
        {"p", "first multiplier"},
        {"q", "second multiplier"},
        {"first", "first orbit index"},
        {"last", "last orbit index (default N)"},
        {"ladder", "comma-separated increasing N values"},
        {"z", "inf | p/q | sqrt:N | surd:a,b,c | symbolic real"},
    };
    return h;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback)
{
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path);
    require(f.is_open(), Errc::io, "cannot open " + path + " for writing");
    f << text;
    require(static_cast<bool>(f), Errc::io, "failed writing " + path);
}

void report_error(std::ostream& err, Errc code, const std::string& message)
{
    nlohmann::ordered_json e;
    e["error"] = {{"code", std::string(errc_name(code))}, {"exit_code", exit_code(code)}, {"message", message}};
    err << e.dump() << '\n';
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Experiments on Mobius disjointness for horocycle flows", "mobhoro"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::map<std::string, std::string> values;
    std::map<std::string, std::vector<CLI::Option*>> options;
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file; flags override it");
    for (const char* key : {"out", "series", "threads", "precision-bits", "format"}) {
        static const std::map<std::string, std::string> global_help{
            {"out", "report path (default stdout)"},
            {"series", "also write the CSV series to this path"},
            {"threads", "worker threads, 0 = all cores"},
            {"precision-bits", "working precision for orbit points"},
            {"format", "json | csv (csv prints the series)"}};
        options[key].push_back(app.add_option(std::string("--") + key, values[key], global_help.at(key)));
    }
    std::map<std::string, CLI::App*> subs;
    for (const auto& spec : command_specs()) {
        auto* sub = app.add_subcommand(spec.name, spec.help);
        for (const char* key : spec.keys)
            options[key].push_back(sub->add_option(std::string("--") + key, values[key], key_help().at(key)));
        subs[spec.name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, Errc::validation, e.what());
        return exit_code(Errc::validation);
    }

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            require(f.is_open(), Errc::io, "cannot read config " + config_path);
            std::stringstream ss;
            ss << f.rdbuf();
            cfg = ExperimentConfig::parse(ss.str());
        }
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) cfg.command = name;
        require(!cfg.command.empty(), Errc::validation, "no command given (see --help)");
        for (const auto& [key, opts] : options)
            for (const auto* o : opts)
                if (o->count() > 0) cfg.set(key, values[key]);

        const RunReport report = run(cfg);
        if (cfg.format == "csv") {
            std::ostringstream csv;
            emit_series(report, csv);
            write_text(cfg.out, csv.str(), out);
        } else {
            write_text(cfg.out, report.json.dump(2) + "\n", out);
        }
        if (!cfg.series.empty()) emit_series(report, std::filesystem::path(cfg.series));
        return 0;
    } catch (const Error& e) {
        report_error(err, e.code(), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "{\"error\":{\"code\":\"internal\",\"exit_code\":1,\"message\":" << nlohmann::json(e.what()).dump()
            << "}}\n";
        return 1;
    }
}

}  // namespace mobhoro::cli
