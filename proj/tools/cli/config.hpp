#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mobhoro::cli {

// Everything a run needs. Serialised as "key=value" lines; every field has a key.
struct ExperimentConfig {
    std::string command;  // sieve | decompose | criterion | orbit | correlate | disjointness | classify

    std::uint64_t n = 100000;
    std::optional<double> alpha;  // decompose / criterion; default 0.3
    std::optional<int> j0, j1;    // default from the schedule
    double cutoff = 50.0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> exclude;
    std::optional<std::uint64_t> m;  // fixed correlation length; default floor(N / max(p1, p2))
    std::string nu = "mobius";       // mobius | liouville (sieve also takes primes)
    std::string seq = "exp:theta=sqrt2";

    std::string point = "cusp:z=e";
    std::string obs = "bump:y0=2,width=0.5";
    std::string quad;  // quadrature spec, empty for defaults
    std::uint64_t p = 2, q = 3;
    std::uint64_t first = 1;
    std::optional<std::uint64_t> last;  // orbit; default n
    std::vector<std::uint64_t> ladder{10000, 100000, 1000000};

    std::string z = "sqrt:2";

    int threads = 0;  // 0: hardware concurrency
    std::optional<int> precision_bits;
    std::string out;     // report path, empty for stdout
    std::string series;  // optional CSV series path
    std::string format = "json";  // json | csv

    bool operator==(const ExperimentConfig&) const = default;

    std::string serialize() const;
    // Unknown keys, malformed values and duplicate keys are validation errors.
    static ExperimentConfig parse(std::string_view text);
    // Sets one field from its textual form; shared by parse() and the flag layer.
    void set(const std::string& key, const std::string& value);
    // Checks every field the command uses against the library preconditions.
    void validate() const;
};

const std::vector<std::string>& commands();
const std::vector<std::string>& config_keys();

// Shortest round-trip decimal form, independent of the locale.
std::string decimal(double v);
// Locale-independent finite number; validation error naming `key` otherwise.
double parse_number(const std::string& key, const std::string& text);

}  // namespace mobhoro::cli
