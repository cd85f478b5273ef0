#include "mobhoro/observable.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "mobhoro/error.hpp"
#include "mobhoro/parallel.hpp"
#include "mobhoro/summation.hpp"

namespace mobhoro {

namespace {

double smoothstep5(double t)
{
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

double number(const std::string& text, const std::string& spec)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == text.size() && !text.empty() && std::isfinite(v), Errc::validation,
            "observable spec '" + spec + "': '" + text + "' is not a number");
    return v;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Observable Observable::constant(double c)
{
    Observable f;
    f.family_ = Family::constant;
    f.p0_ = c;
    f.cusp_limit_ = c;
    f.exact_mean_ = c;
    f.label_ = "const:c=" + fmt(c);
    return f;
}

Observable Observable::bump(double y0, double width)
{
    require(width > 0.0 && y0 > 0.0, Errc::validation, "bump: need y0 > 0 and width > 0");
    Observable f;
    f.family_ = Family::bump;
    f.p0_ = y0;
    f.p1_ = width;
    f.cusp_limit_ = 1.0;
    f.label_ = "bump:y0=" + fmt(y0) + ",width=" + fmt(width);
    return f;
}

Observable Observable::well(double y0, double width)
{
    require(width > 0.0 && y0 > 0.0, Errc::validation, "well: need y0 > 0 and width > 0");
    Observable f;
    f.family_ = Family::well;
    f.p0_ = y0;
    f.p1_ = width;
    f.cusp_limit_ = 0.0;
    f.label_ = "well:y0=" + fmt(y0) + ",width=" + fmt(width);
    return f;
}

Observable Observable::frame(int k, double y0, double width)
{
    require(width > 0.0 && y0 >= 1.0, Errc::validation, "frame: need y0 >= 1 and width > 0");
    Observable f;
    f.family_ = Family::frame;
    f.k_ = k;
    f.p0_ = y0;
    f.p1_ = width;
    f.cusp_limit_ = 0.0;
    f.label_ = "frame:k=" + std::to_string(k) + ",y0=" + fmt(y0) + ",width=" + fmt(width);
    return f;
}

Observable Observable::parse(std::string_view text)
{
    const std::string spec(text);
    std::string_view s = text;
    if (s.rfind("obs:", 0) == 0) s.remove_prefix(4);
    const auto colon = s.find(':');
    const std::string kind(s.substr(0, colon));
    std::map<std::string, std::string> kv;
    bool centered = false;
    if (colon != std::string_view::npos) {
        std::stringstream items{std::string(s.substr(colon + 1))};
        for (std::string item; std::getline(items, item, ',');) {
            if (item == "centered") {
                centered = true;
                continue;
            }
            const auto eq = item.find('=');
            require(eq != std::string::npos, Errc::validation,
                    "observable spec '" + spec + "': expected key=value, got '" + item + "'");
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    auto get = [&](const std::string& key, std::optional<double> fallback = {}) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            require(fallback.has_value(), Errc::validation, "observable spec '" + spec + "' needs '" + key + "'");
            return *fallback;
        }
        return number(it->second, spec);
    };
    Observable f;
    if (kind == "const")
        f = constant(get("c"));
    else if (kind == "bump")
        f = bump(get("y0", 2.0), get("width", 0.5));
    else if (kind == "well")
        f = well(get("y0", 2.0), get("width", 0.5));
    else if (kind == "frame")
        f = frame(static_cast<int>(get("k", 1.0)), get("y0", 1.0), get("width", 0.5));
    else
        fail(Errc::validation, "unknown observable '" + kind + "' in '" + spec + "'");
    if (centered) return split_observable(f).centered;
    return f;
}

double Observable::operator()(double, double y, double theta) const
{
    double v = 0.0;
    switch (family_) {
    case Family::constant: v = p0_; break;
    case Family::bump: v = 0.5 * (1.0 + std::tanh((y - p0_) / p1_)); break;
    case Family::well: {
        const double t = std::log(y / p0_) / p1_;
        v = std::exp(-t * t);
        break;
    }
    case Family::frame: {
        const double r = p0_ / y;
        v = std::cos(k_ * theta) * smoothstep5((y - p0_) / p1_) * r * r;
        break;
    }
    }
    return v - shift_;
}

double Observable::sup_abs() const noexcept
{
    switch (family_) {
    case Family::constant: return std::abs(p0_ - shift_);
    case Family::bump:
    case Family::well: return std::max(std::abs(shift_), std::abs(1.0 - shift_));
    case Family::frame: return 1.0 + std::abs(shift_);
    }
    return 0.0;
}

Observable Observable::shifted(double c) const
{
    Observable f = *this;
    f.shift_ += c;
    if (f.exact_mean_) *f.exact_mean_ -= c;
    f.label_ = label_ + "-(" + fmt(c) + ")";
    return f;
}

QuadratureSpec QuadratureSpec::parse(std::string_view text)
{
    QuadratureSpec q;
    const std::string spec(text);
    std::stringstream items(spec);
    for (std::string item; std::getline(items, item, ',');) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        require(eq != std::string::npos, Errc::validation, "quadrature spec '" + spec + "': expected key=value");
        const std::string key = item.substr(0, eq);
        const double v = number(item.substr(eq + 1), spec);
        if (key == "y")
            q.y_cut = v;
        else if (key == "nx")
            q.nx = static_cast<int>(v);
        else if (key == "ns")
            q.ns = static_cast<int>(v);
        else if (key == "ntheta")
            q.ntheta = static_cast<int>(v);
        else if (key == "tail")
            q.tail_tolerance = v;
        else
            fail(Errc::validation, "quadrature spec '" + spec + "': unknown key '" + key + "'");
    }
    require(q.y_cut > 1.0 && q.nx >= 2 && q.ns >= 2 && q.ntheta >= 1 && q.tail_tolerance > 0.0,
            Errc::validation, "quadrature spec '" + spec + "': out of range");
    return q;
}

std::string QuadratureSpec::to_string() const
{
    return "y=" + fmt(y_cut) + ",nx=" + std::to_string(nx) + ",ns=" + std::to_string(ns) +
           ",ntheta=" + std::to_string(ntheta) + ",tail=" + fmt(tail_tolerance);
}

namespace {

struct Rule {
    std::vector<double> nodes, weights;  // on [-1, 1]
};

// Composite Gauss-Legendre on [-1, 1] with about n nodes. GSL tabulates orders up
// to 100 exactly; larger orders come from an asymptotic formula good to ~1e-10
// only, so longer rules are split into equal panels.
Rule gauss_legendre(int n)
{
    constexpr int kMaxOrder = 100;
    const int panels = (n + kMaxOrder - 1) / kMaxOrder;
    const int order = (n + panels - 1) / panels;
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> t(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
    require(t != nullptr, Errc::capacity, "quadrature: cannot allocate Gauss-Legendre table");
    Rule r;
    r.nodes.resize(static_cast<std::size_t>(panels) * order);
    r.weights.resize(r.nodes.size());
    const double width = 2.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = -1.0 + p * width;
        for (int i = 0; i < order; ++i) {
            const std::size_t k = static_cast<std::size_t>(p) * order + i;
            gsl_integration_glfixed_point(a, a + width, static_cast<std::size_t>(i), &r.nodes[k], &r.weights[k],
                                          t.get());
        }
    }
    return r;
}

}  // namespace

HaarMean haar_mean(const Observable& f, const QuadratureSpec& q)
{
    require(q.y_cut > 1.0 && q.nx >= 2 && q.ns >= 2 && q.ntheta >= 1, Errc::validation,
            "quadrature: invalid spec " + q.to_string());
    const Rule rx = gauss_legendre(q.nx);
    const Rule rs = gauss_legendre(q.ns);
    const int nth = f.frame_dependent() ? q.ntheta : 1;
    auto avg = [&](double x, double y) {
        if (nth == 1) return f(x, y, 0.0);
        double acc = 0.0;
        for (int k = 0; k < nth; ++k) acc += f(x, y, 2.0 * std::numbers::pi * k / nth);
        return acc / nth;
    };
    const double s_lo = 1.0 / q.y_cut;
    const std::size_t nx = rx.nodes.size();
    std::vector<double> column_f(nx), column_1(nx), deviation(nx);
    parallel_for(nx, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = 0.5 * rx.nodes[i];
            const double s_hi = 1.0 / std::sqrt(1.0 - x * x);
            const double half = 0.5 * (s_hi - s_lo), mid = 0.5 * (s_hi + s_lo);
            const double inner = pairwise_sum_of<double>(0, rs.nodes.size(), [&](std::size_t k) {
                const double s = mid + half * rs.nodes[k];
                return rs.weights[k] * avg(x, 1.0 / s);
            });
            column_f[i] = 0.5 * rx.weights[i] * half * inner;
            column_1[i] = 0.5 * rx.weights[i] * (s_hi - s_lo);
            deviation[i] = std::abs(avg(x, q.y_cut) - f.cusp_limit());
        }
    });
    HaarMean h;
    const double tail = f.cusp_limit() * s_lo;
    h.mass = pairwise_sum(std::span<const double>(column_f)) + tail;
    h.domain_mass = pairwise_sum(std::span<const double>(column_1)) + s_lo;
    h.tail_error = *std::max_element(deviation.begin(), deviation.end()) * s_lo;
    require(h.tail_error <= q.tail_tolerance, Errc::quadrature,
            "quadrature: observable '" + f.label() + "' has not reached its cusp limit at y=" + fmt(q.y_cut));
    h.mean = h.mass / h.domain_mass;
    return h;
}

SplitObservable split_observable(const Observable& f, const QuadratureSpec& q)
{
    SplitObservable out;
    out.mean = f.exact_mean() ? *f.exact_mean() : haar_mean(f, q).mean;
    out.centered = f.shifted(out.mean);
    return out;
}

}  // namespace mobhoro
