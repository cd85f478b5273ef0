#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "mobhoro/correlator.hpp"
#include "mobhoro/decomp.hpp"
#include "mobhoro/error.hpp"
#include "mobhoro/modular.hpp"
#include "mobhoro/observable.hpp"
#include "mobhoro/symbolic.hpp"

namespace mobhoro::cli {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& v)
{
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc() && ptr == v.data() + v.size(), Errc::validation,
            "config: '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

}  // namespace

double parse_number(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc() && ptr == v.data() + v.size() && std::isfinite(out), Errc::validation,
            "config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

namespace {

double parse_real(const std::string& key, const std::string& v) { return parse_number(key, v); }

std::vector<std::string> split(const std::string& v, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, sep);)
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

template <class T>
std::string opt_str(const std::optional<T>& v)
{
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>) return decimal(*v);
    else return std::to_string(*v);
}

}  // namespace

std::string decimal(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"sieve", "decompose", "criterion", "orbit",
                                            "correlate", "disjointness", "classify"};
    return c;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> k{
        "command", "n", "alpha", "j0", "j1", "cutoff", "exclude", "m", "nu", "seq", "point", "obs", "quad",
        "p", "q", "first", "last", "ladder", "z", "threads", "precision-bits", "out", "series", "format"};
    return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    auto opt_int = [&](auto& field) {
        using T = typename std::remove_reference_t<decltype(field)>::value_type;
        if (v.empty()) field.reset();
        else field = parse_integer<T>(key, v);
    };
    if (key == "command") command = v;
    else if (key == "n") n = parse_integer<std::uint64_t>(key, v);
    else if (key == "alpha") alpha = v.empty() ? std::nullopt : std::optional<double>(parse_real(key, v));
    else if (key == "j0") opt_int(j0);
    else if (key == "j1") opt_int(j1);
    else if (key == "cutoff") cutoff = parse_real(key, v);
    else if (key == "exclude") {
        exclude.clear();
        for (const auto& item : split(v, ',')) {
            const auto colon = item.find(':');
            require(colon != std::string::npos, Errc::validation, "config: exclude expects p:q pairs, got '" + item + "'");
            exclude.emplace_back(parse_integer<std::uint64_t>(key, trim(item.substr(0, colon))),
                                 parse_integer<std::uint64_t>(key, trim(item.substr(colon + 1))));
        }
    } else if (key == "m") opt_int(m);
    else if (key == "nu") nu = v;
    else if (key == "seq") seq = v;
    else if (key == "point") point = v;
    else if (key == "obs") obs = v;
    else if (key == "quad") quad = v;
    else if (key == "p") p = parse_integer<std::uint64_t>(key, v);
    else if (key == "q") q = parse_integer<std::uint64_t>(key, v);
    else if (key == "first") first = parse_integer<std::uint64_t>(key, v);
    else if (key == "last") opt_int(last);
    else if (key == "ladder") {
        ladder.clear();
        for (const auto& item : split(v, ',')) ladder.push_back(parse_integer<std::uint64_t>(key, item));
    } else if (key == "z") z = v;
    else if (key == "threads") threads = parse_integer<int>(key, v);
    else if (key == "precision-bits") opt_int(precision_bits);
    else if (key == "out") out = v;
    else if (key == "series") series = v;
    else if (key == "format") format = v;
    else fail(Errc::validation, "config: unknown key '" + key + "'");
}

std::string ExperimentConfig::serialize() const
{
    std::ostringstream os;
    auto line = [&](const char* k, const std::string& v) { os << k << '=' << v << '\n'; };
    line("command", command);
    line("n", std::to_string(n));
    line("alpha", opt_str(alpha));
    line("j0", opt_str(j0));
    line("j1", opt_str(j1));
    line("cutoff", decimal(cutoff));
    std::string ex;
    for (const auto& [a, b] : exclude) ex += (ex.empty() ? "" : ",") + std::to_string(a) + ":" + std::to_string(b);
    line("exclude", ex);
    line("m", opt_str(m));
    line("nu", nu);
    line("seq", seq);
    line("point", point);
    line("obs", obs);
    line("quad", quad);
    line("p", std::to_string(p));
    line("q", std::to_string(q));
    line("first", std::to_string(first));
    line("last", opt_str(last));
    std::string lad;
    for (auto v : ladder) lad += (lad.empty() ? "" : ",") + std::to_string(v);
    line("ladder", lad);
    line("z", z);
    line("threads", std::to_string(threads));
    line("precision-bits", opt_str(precision_bits));
    line("out", out);
    line("series", series);
    line("format", format);
    return os.str();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text)
{
    ExperimentConfig c;
    std::set<std::string> seen;
    std::istringstream is{std::string(text)};
    int lineno = 0;
    for (std::string raw; std::getline(is, raw);) {
        ++lineno;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        require(eq != std::string::npos, Errc::validation,
                "config line " + std::to_string(lineno) + ": expected key=value, got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        require(seen.insert(key).second, Errc::validation, "config: duplicate key '" + key + "'");
        c.set(key, s.substr(eq + 1));
    }
    return c;
}

void ExperimentConfig::validate() const
{
    require(std::find(commands().begin(), commands().end(), command) != commands().end(), Errc::validation,
            "config: unknown command '" + command + "'");
    require(threads >= 0, Errc::validation, "config: threads must be >= 0");
    require(format == "json" || format == "csv", Errc::validation, "config: format must be json or csv");
    require(!precision_bits || *precision_bits >= 53, Errc::validation, "config: precision-bits must be >= 53");
    if (!quad.empty()) QuadratureSpec::parse(quad);

    const bool needs_nu = command == "criterion" || command == "disjointness";
    if (needs_nu)
        require(nu == "mobius" || nu == "liouville", Errc::validation, "config: nu must be mobius or liouville");

    if (command == "sieve") {
        require(n >= 2, Errc::validation, "sieve: n must be >= 2");
        require(nu == "mobius" || nu == "liouville" || nu == "primes", Errc::validation,
                "sieve: nu must be mobius, liouville or primes");
    } else if (command == "decompose" || command == "criterion") {
        DecompositionParams::make(n, alpha.value_or(0.3), j0, j1);
        if (command == "criterion") {
            require(cutoff >= 3.0, Errc::validation, "criterion: cutoff must be >= 3");
            require(!m || *m >= 1, Errc::validation, "criterion: m must be >= 1");
            for (const auto& [a, b] : exclude)
                require(a < b, Errc::validation, "criterion: excluded pairs need p1 < p2");
            if (seq.rfind("exp:theta=", 0) == 0) SymbolicReal::parse(seq.substr(10));
            else if (seq.rfind("const:c=", 0) == 0) {
                const double c = parse_real("seq", seq.substr(8));
                require(std::abs(c) <= 1.0, Errc::validation, "criterion: constant sequence needs |c| <= 1");
            } else if (seq.rfind("csv:", 0) == 0)
                require(std::filesystem::exists(seq.substr(4)), Errc::io, "criterion: no such file " + seq.substr(4));
            else fail(Errc::validation, "criterion: seq must be exp:theta=.., const:c=.. or csv:path");
        }
    } else if (command == "orbit" || command == "correlate" || command == "disjointness") {
        ModularPoint::parse(point);
        Observable::parse(obs);
        if (command == "orbit") {
            require(first <= last.value_or(n), Errc::validation, "orbit: first must not exceed last");
        } else if (command == "correlate") {
            require(p >= 1 && q >= 1 && p != q, Errc::validation, "correlate: need distinct p, q >= 1");
            require(n >= 1, Errc::validation, "correlate: n must be >= 1");
        } else {
            require(!ladder.empty() && ladder.front() >= 1, Errc::validation, "disjointness: empty ladder");
            for (std::size_t i = 1; i < ladder.size(); ++i)
                require(ladder[i] > ladder[i - 1], Errc::validation, "disjointness: ladder must increase");
        }
    } else if (command == "classify") {
        PointDescriptor::parse(z);
    }
}

}  // namespace mobhoro::cli
