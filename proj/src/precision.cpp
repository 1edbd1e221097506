#include "gauss_counter/precision.hpp"

#include <charconv>
#include <limits>
#include <sstream>

#include "gauss_counter/error.hpp"

namespace gauss_counter {

std::string to_decimal(double x)
{
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << x;
    return out.str();
}

std::string to_decimal(const Real& x)
{
    // Two guard digits below the working precision are noise; drop them.
    return x.str(static_cast<std::streamsize>(real_digits) - 2, std::ios_base::scientific);
}

Real parse_real(const std::string& text)
{
    try {
        return Real(text);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "not a decimal number: '" + text + "'");
    }
}

}  // namespace gauss_counter
