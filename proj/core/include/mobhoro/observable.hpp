#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mobhoro {

// Continuous real observable on the modular surface (or on the frame bundle),
// evaluated on reduced coordinates.
class Observable {
public:
    enum class Family { constant, bump, well, frame };

    // [obs:]const:c=v | bump:y0=..,width=.. | well:y0=..,width=.. | frame:k=..,y0=..,width=..
    // An extra ",centered" item subtracts the Haar mean (computed with default quadrature).
    static Observable parse(std::string_view spec);
    static Observable constant(double c);
    // (1 + tanh((y - y0)/w)) / 2; tends to 1 in the cusp.
    static Observable bump(double y0, double width);
    // exp(-(ln(y/y0)/w)^2); tends to 0 in the cusp.
    static Observable well(double y0, double width);
    // cos(k theta) * smoothstep((y - y0)/w) * (y0 / y)^2 with y0 >= 1; tends to 0.
    static Observable frame(int k, double y0, double width);

    double operator()(double x, double y, double theta) const;
    bool frame_dependent() const noexcept { return family_ == Family::frame; }
    double cusp_limit() const noexcept { return cusp_limit_ - shift_; }
    // Known mean (constants, and centered observables by construction).
    std::optional<double> exact_mean() const noexcept { return exact_mean_; }
    double sup_abs() const noexcept;
    const std::string& label() const noexcept { return label_; }

    // f - c with the given constant.
    Observable shifted(double c) const;

private:
    Family family_ = Family::constant;
    double p0_ = 0.0, p1_ = 0.0;  // (y0, width) or (c, unused)
    int k_ = 0;
    double shift_ = 0.0;
    double cusp_limit_ = 0.0;
    std::optional<double> exact_mean_;
    std::string label_;
};

struct QuadratureSpec {
    double y_cut = 1e3;
    int nx = 2000;  // nodes per axis; split into Gauss-Legendre panels of at most 100
    int ns = 2000;
    int ntheta = 64;
    double tail_tolerance = 1e-8;

    // "y=1000,nx=2000,ns=2000,ntheta=64,tail=1e-8"; missing keys keep defaults.
    static QuadratureSpec parse(std::string_view spec);
    std::string to_string() const;
};

struct HaarMean {
    double mean = 0.0;        // normalised to total measure 1
    double mass = 0.0;        // integral of f over the truncated domain plus the cusp tail
    double domain_mass = 0.0; // same with f = 1; pi/3 up to quadrature error
    double tail_error = 0.0;  // bound on the cusp-tail approximation error
};

// Gauss-Legendre tensor quadrature in (x, s = 1/y) where d mu = dx ds; the part
// y > y_cut is added as cusp_limit / y_cut. Quadrature error if the observable has
// not settled to its cusp limit at y_cut.
HaarMean haar_mean(const Observable& f, const QuadratureSpec& q = {});

struct SplitObservable {
    Observable centered;
    double mean = 0.0;
};

// f = centered + mean with mean = haar_mean(f).
SplitObservable split_observable(const Observable& f, const QuadratureSpec& q = {});

}  // namespace mobhoro
