#include "mobhoro/error.hpp"

namespace mobhoro {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::validation: return "validation";
    case Errc::capacity: return "capacity";
    case Errc::precision: return "precision";
    case Errc::domain: return "domain";
    case Errc::horizon: return "horizon";
    case Errc::range: return "range";
    case Errc::io: return "io";
    case Errc::unsupported: return "unsupported";
    case Errc::quadrature: return "quadrature";
    }
    return "unknown";
}

}  // namespace mobhoro
