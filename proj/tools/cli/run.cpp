#include "run.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <ostream>

#include "mobhoro/arith.hpp"
#include "mobhoro/correlator.hpp"
#include "mobhoro/criterion.hpp"
#include "mobhoro/decomp.hpp"
#include "mobhoro/modular.hpp"
#include "mobhoro/observable.hpp"
#include "mobhoro/orbit.hpp"
#include "mobhoro/parallel.hpp"
#include "mobhoro/summation.hpp"

namespace mobhoro::cli {

using json = nlohmann::ordered_json;

namespace {

json real(double v) { return decimal(v); }

json complex_value(std::complex<double> z)
{
    return json{{"re", decimal(z.real())}, {"im", decimal(z.imag())}, {"abs", decimal(std::abs(z))}};
}

class Timer {
public:
    explicit Timer(json& timings) : timings_(timings) {}
    template <class F>
    auto phase(const std::string& name, F&& f)
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto out = f();
        timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

private:
    json& timings_;
};

MultiplicativeTable nu_table(const std::string& name, std::uint64_t n)
{
    return name == "liouville" ? sieve_liouville(n) : sieve_mobius(n);
}

OrbitOptions orbit_options(const ExperimentConfig& c)
{
    OrbitOptions o;
    o.precision_bits = c.precision_bits;
    if (!c.quad.empty()) o.quadrature = QuadratureSpec::parse(c.quad);
    return o;
}

json config_json(const ExperimentConfig& c)
{
    json out = json::object();
    std::istringstream is(c.serialize());
    for (std::string line; std::getline(is, line);) {
        const auto eq = line.find('=');
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

json run_sieve(const ExperimentConfig& c, Timer& t, RunReport& r)
{
    json res;
    res["n"] = c.n;
    if (c.nu == "primes") {
        const auto primes = t.phase("sieve", [&] { return sieve_primes(c.n); });
        res["table"] = "primes";
        res["prime_count"] = primes.size();
        res["largest_prime"] = primes.size() ? primes.primes().back() : 0;
        Series s{{"k", "p"}, {}};
        std::uint64_t k = 0;
        for (auto p : primes.primes()) s.rows.push_back({std::to_string(++k), std::to_string(p)});
        r.series = std::move(s);
        return res;
    }
    const auto nu = t.phase("sieve", [&] { return nu_table(c.nu, c.n); });
    std::int64_t sum = 0;
    std::uint64_t zeros = 0;
    Series s{{"n", "value"}, {}};
    s.rows.reserve(c.n);
    for (std::uint64_t k = 1; k <= c.n; ++k) {
        sum += nu.sign(k);
        zeros += nu.sign(k) == 0;
        s.rows.push_back({std::to_string(k), std::to_string(nu.sign(k))});
    }
    res["table"] = nu.label();
    res["summatory"] = sum;
    res["zeros"] = zeros;
    r.series = std::move(s);
    return res;
}

json decomposition_json(const Decomposition& d, const CoverageReport& cov)
{
    json res;
    const auto& p = d.params();
    res["n"] = p.n;
    res["alpha"] = real(p.alpha);
    res["j0"] = p.j0;
    res["j1"] = p.j1;
    res["d0"] = real(p.d0());
    res["d1"] = real(p.d1());
    res["universe"] = d.universe();
    res["not_in_s"] = d.not_in_s();
    res["s_total"] = d.s_total();
    res["multiple_total"] = d.multiple_total();
    res["s_minus_pq_total"] = d.s_minus_pq_total();
    res["pq_total"] = d.pq_total();
    res["leftover"] = d.leftover();
    res["inclusion_violations"] = d.inclusion_violations();
    res["counting_identity"] = d.universe() == d.not_in_s() + d.s_total() + d.multiple_total();
    json blocks = json::array();
    for (const auto& b : d.blocks())
        blocks.push_back({{"j", b.block.j},
                          {"lo", real(b.block.lo)},
                          {"hi", real(b.block.hi)},
                          {"p_count", b.block.primes.size()},
                          {"q_count", b.q_count},
                          {"s_count", b.s_count},
                          {"multiple_count", b.multiple_count},
                          {"pq_count", b.pq_count},
                          {"pq_in_s_count", b.pq_in_s_count},
                          {"s_minus_pq_count", b.s_minus_pq_count},
                          {"complement_violations", b.complement_violations}});
    res["blocks"] = blocks;
    json lines = json::array();
    for (const auto& l : cov.lines)
        lines.push_back({{"name", l.name}, {"measured", l.measured}, {"reference", real(l.reference)}, {"holds", l.holds}});
    res["coverage"] = {{"lines", lines},
                       {"mertens_product", real(cov.mertens_product)},
                       {"inverse_j0", real(cov.inverse_j0)},
                       {"complement_fraction", real(cov.complement_fraction)},
                       {"mertens_relative_gap", real(cov.mertens_relative_gap)},
                       {"boundary_prime_at_d0", cov.boundary_prime_at_d0}};
    return res;
}

json run_decompose(const ExperimentConfig& c, Timer& t, RunReport&)
{
    const auto params = DecompositionParams::make(c.n, c.alpha.value_or(0.3), c.j0, c.j1);
    const auto primes = t.phase("sieve", [&] { return sieve_primes(std::max<std::uint64_t>(c.n, 2)); });
    const auto d = t.phase("decompose", [&] { return build_decomposition(params, primes); });
    const auto cov = t.phase("coverage", [&] { return coverage_report(d, primes); });
    return decomposition_json(d, cov);
}

BoundedSequence make_sequence(const std::string& spec, std::uint64_t horizon)
{
    if (spec.rfind("exp:theta=", 0) == 0) return exponential_sequence(SymbolicReal::parse(spec.substr(10)), horizon);
    if (spec.rfind("const:c=", 0) == 0) return constant_sequence(parse_number("seq", spec.substr(8)), horizon);
    return BoundedSequence::from_csv(spec.substr(4));
}

json run_criterion(const ExperimentConfig& c, Timer& t, RunReport& r)
{
    const auto params = DecompositionParams::make(c.n, c.alpha.value_or(0.3), c.j0, c.j1);
    const auto primes = t.phase("sieve", [&] { return sieve_primes(2 * c.n); });
    const auto nu = t.phase("nu", [&] { return nu_table(c.nu, c.n); });
    const auto f = t.phase("sequence", [&] { return make_sequence(c.seq, required_horizon(params, primes)); });
    CriterionInput in;
    in.n = c.n;
    in.alpha = params.alpha;
    in.j0 = params.j0;
    in.j1 = params.j1;
    in.prime_cutoff = c.cutoff;
    in.excluded = c.exclude;
    if (c.m) in.length = CorrelationLength::fixed_length(*c.m);
    const auto rep = t.phase("ledger", [&] { return criterion_ledger(nu, f, in, primes); });

    json res;
    res["n"] = rep.n;
    res["alpha"] = real(rep.alpha);
    res["j0"] = rep.j0;
    res["j1"] = rep.j1;
    res["nu"] = rep.nu_label;
    res["sequence"] = rep.f_label;
    res["prime_cutoff"] = real(c.cutoff);
    res["correlation_length"] = rep.tau.length_policy;
    res["pair_count"] = rep.tau.pairs.size();
    json excluded = json::array();
    for (const auto& [a, b] : rep.tau.excluded) excluded.push_back({a, b});
    res["excluded_pairs"] = excluded;
    res["tau_hat"] = real(rep.tau.tau_hat);
    res["worst_pair"] = {rep.tau.worst.first, rep.tau.worst.second};
    res["tau_floor"] = real(rep.tau_floor);
    res["tau_effective"] = real(rep.tau_effective);
    res["bound_rhs"] = real(rep.bound_rhs);
    res["weighted_sum"] = complex_value(rep.weighted_sum);
    res["ledger_sum"] = complex_value(rep.ledger_sum);
    res["leftover_count"] = rep.leftover_count;
    res["leftover_sum"] = complex_value(rep.leftover_sum);
    res["diagonal_total"] = real(rep.diagonal_total);
    res["off_diagonal_total"] = real(rep.off_diagonal_total);
    res["ratio"] = real(rep.ratio);
    res["verdict"] = rep.verdict;
    res["unconditional_chain_holds"] = rep.unconditional_chain_holds();
    json checks = json::array();
    for (const auto& k : rep.checks)
        checks.push_back({{"line", k.line},
                          {"description", k.description},
                          {"lhs", real(k.lhs)},
                          {"rhs", real(k.rhs)},
                          {"holds", k.holds},
                          {"unconditional", k.unconditional}});
    res["checks"] = checks;
    json blocks = json::array();
    for (const auto& b : rep.blocks)
        blocks.push_back({{"j", b.j},
                          {"p_count", b.p_count},
                          {"q_count", b.q_count},
                          {"block_sum", complex_value(b.block_sum)},
                          {"inner_abs", real(b.inner_abs)},
                          {"diagonal", real(b.diagonal)},
                          {"off_diagonal", real(b.off_diagonal)},
                          {"block_tau", real(b.block_tau)}});
    res["blocks"] = blocks;

    Series s{{"p1", "p2", "m", "re", "im", "normalized"}, {}};
    for (const auto& p : rep.tau.pairs)
        s.rows.push_back({std::to_string(p.p1), std::to_string(p.p2), std::to_string(p.m), decimal(p.sum.real()),
                          decimal(p.sum.imag()), decimal(p.normalized)});
    r.series = std::move(s);
    return res;
}

json point_json(const ModularPoint& xi)
{
    const auto g = genericity(xi);
    return {{"label", xi.label()}, {"generic", g.generic}, {"cusp_direction", g.cusp.describe()}};
}

json run_orbit(const ExperimentConfig& c, Timer& t, RunReport& r)
{
    const auto xi = ModularPoint::parse(c.point);
    const auto f = t.phase("observable", [&] { return Observable::parse(c.obs); });
    const auto opt = orbit_options(c);
    const std::uint64_t last = c.last.value_or(c.n);
    json res;
    res["point"] = point_json(xi);
    res["observable"] = f.label();
    res["first"] = c.first;
    res["last"] = last;
    res["precision_bits"] = opt.precision_bits.value_or(default_precision_bits(xi, last));
    const bool want_series = !c.series.empty() || c.format == "csv";
    double average = 0.0;
    if (want_series || c.first != 1) {
        const auto samples = t.phase("orbit", [&] { return orbit_series(xi, f, c.first, last, opt); });
        const double sum = pairwise_sum_of<double>(0, samples.size(), [&](std::size_t i) { return samples[i].f; });
        average = sum / static_cast<double>(samples.size());
        Series s{{"n", "x", "y", "theta", "f"}, {}};
        s.rows.reserve(samples.size());
        for (const auto& v : samples)
            s.rows.push_back({std::to_string(v.n), decimal(v.point.x), decimal(v.point.y), decimal(v.point.theta),
                              decimal(v.f)});
        r.series = std::move(s);
    } else {
        average = t.phase("orbit", [&] { return birkhoff_average(f, xi, last, opt); });
    }
    res["average"] = real(average);
    const double mean = t.phase("haar_mean", [&] {
        return f.exact_mean() ? *f.exact_mean() : haar_mean(f, opt.quadrature).mean;
    });
    res["haar_mean"] = real(mean);
    res["gap"] = real(std::abs(average - mean));
    return res;
}

json run_correlate(const ExperimentConfig& c, Timer& t, RunReport& r)
{
    const auto xi = ModularPoint::parse(c.point);
    const auto f = t.phase("observable", [&] { return Observable::parse(c.obs); });
    const auto e = t.phase("correlate", [&] { return pair_correlation(f, xi, c.p, c.q, c.n, orbit_options(c)); });
    json res;
    res["point"] = point_json(xi);
    res["observable"] = f.label();
    res["p"] = e.p;
    res["q"] = e.q;
    res["n"] = e.n;
    res["value"] = real(e.value);
    res["mean"] = real(e.mean);
    res["target"] = real(e.target);
    res["gap"] = real(e.gap);
    res["sup_bound"] = real(f.sup_abs() * f.sup_abs());
    res["precision_bits"] = e.precision_bits;
    r.series = Series{{"p", "q", "n", "value", "target", "gap"},
                      {{std::to_string(e.p), std::to_string(e.q), std::to_string(e.n), decimal(e.value),
                        decimal(e.target), decimal(e.gap)}}};
    return res;
}

json run_disjointness(const ExperimentConfig& c, Timer& t, RunReport& r)
{
    const auto xi = ModularPoint::parse(c.point);
    const auto f = t.phase("observable", [&] { return Observable::parse(c.obs); });
    const auto nu = t.phase("nu", [&] { return nu_table(c.nu, c.ladder.back()); });
    const auto rep =
        t.phase("disjointness", [&] { return mobius_disjointness_sum(xi, f, c.ladder, nu, orbit_options(c)); });
    json res;
    res["point"] = point_json(xi);
    res["observable"] = f.label();
    res["nu"] = nu.label();
    res["mean"] = real(rep.mean);
    res["precision_bits"] = rep.precision_bits;
    json ladder = json::array();
    Series s{{"n", "total", "centered", "constant", "mertens_ratio"}, {}};
    for (const auto& g : rep.ladder) {
        ladder.push_back({{"n", g.n},
                          {"total", real(g.total)},
                          {"centered", real(g.centered)},
                          {"constant", real(g.constant)},
                          {"mertens_ratio", real(g.mertens_ratio)}});
        s.rows.push_back({std::to_string(g.n), decimal(g.total), decimal(g.centered), decimal(g.constant),
                          decimal(g.mertens_ratio)});
    }
    res["ladder"] = ladder;
    r.series = std::move(s);
    return res;
}

json surd_json(const SurdElement& e, const mpq_class& t, const mpq_class& u)
{
    json m = json::array();
    for (const auto& v : e.matrix) m.push_back(v.get_str());
    return {{"t", t.get_str()},
            {"u", u.get_str()},
            {"value", e.value.to_string()},
            {"approx", real(e.value.approx())},
            {"matrix", m},
            {"norm", e.norm.get_str()},
            {"stabilizes", e.stabilizes},
            {"chi_conjugated", real(e.chi_conjugated)},
            {"chi_matches", e.chi_matches},
            {"rational", e.rational}};
}

json run_classify(const ExperimentConfig& c, Timer& t, RunReport&)
{
    const auto z = PointDescriptor::parse(c.z);
    const auto cls = t.phase("classify", [&] { return classify_correlator(z); });
    json res;
    res["descriptor"] = z.describe();
    res["point"] = z.symbol;
    res["kind"] = cls.kind == CorrelatorClass::Kind::full_rational_group ? "FullRationalGroup" : "TrivialGroup";
    res["group"] = cls.group();
    if (z.kind == PointDescriptor::Kind::quadratic_surd) {
        const mpz_class d = z.discriminant();
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
        res["discriminant"] = d.get_str();
        json samples = json::array();
        for (int k = 1; k <= 3; ++k) {
            const mpq_class tt(root + k), uu(1);
            samples.push_back(surd_json(surd_group_element(z.abc[0], z.abc[1], z.abc[2], tt, uu), tt, uu));
        }
        res["witness"] = samples.front();
        res["samples"] = samples;
    }
    return res;
}

}  // namespace

RunReport run(const ExperimentConfig& config)
{
    config.validate();
    set_default_threads(static_cast<unsigned>(config.threads));
    RunReport r;
    r.json["schema"] = kReportSchema;
    r.json["command"] = config.command;
    r.json["config"] = config_json(config);
    json timings = json::object();
    Timer t(timings);
    static const std::map<std::string, std::function<json(const ExperimentConfig&, Timer&, RunReport&)>> table{
        {"sieve", run_sieve},     {"decompose", run_decompose},       {"criterion", run_criterion},
        {"orbit", run_orbit},     {"correlate", run_correlate},       {"disjointness", run_disjointness},
        {"classify", run_classify}};
    const auto t0 = std::chrono::steady_clock::now();
    r.json["result"] = table.at(config.command)(config, t, r);
    timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.json["timings"] = timings;
    return r;
}

void emit_series(const RunReport& report, std::ostream& out)
{
    require(report.series.has_value(), Errc::validation, "this command produces no series");
    auto row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    row(report.series->header);
    for (const auto& r : report.series->rows) row(r);
    require(static_cast<bool>(out), Errc::io, "failed writing series");
}

void emit_series(const RunReport& report, const std::filesystem::path& path)
{
    std::ofstream out(path);
    require(out.is_open(), Errc::io, "cannot open " + path.string() + " for writing");
    emit_series(report, out);
}

int exit_code(Errc code) noexcept { return static_cast<int>(code); }

}  // namespace mobhoro::cli
