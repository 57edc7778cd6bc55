#include "peermech/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace peermech {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Integer pow10(long exponent) {
    Integer result = 1;
    for (long k = 0; k < exponent; ++k) result *= 10;
    return result;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// GMP reads a leading 0 as an octal prefix.
std::string strip_zeros(std::string_view s) {
    const auto k = s.find_first_not_of('0');
    return k == std::string_view::npos ? std::string("0") : std::string(s.substr(k));
}

Integer parse_integer(std::string_view s, std::string_view original) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw std::invalid_argument("malformed number: '" + std::string(original) + "'");
    Integer value{strip_zeros(s)};
    return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty number");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(trim(s.substr(0, slash)), text);
        Integer den = parse_integer(trim(s.substr(slash + 1)), text);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        return Rational(num, den);
    }

    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        std::string_view exp_text = s.substr(e + 1);
        Integer exp_value = parse_integer(exp_text, text);
        if (abs(exp_value) > 1000) throw std::invalid_argument("exponent out of range: '" + std::string(text) + "'");
        exponent = exp_value.convert_to<long>();
    }

    bool negative = false;
    if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
        negative = mantissa.front() == '-';
        mantissa.remove_prefix(1);
    }
    std::string digits;
    long fraction_digits = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        std::string_view whole = mantissa.substr(0, dot);
        std::string_view frac = mantissa.substr(dot + 1);
        if (whole.empty() && frac.empty()) throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
            throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
        digits = std::string(whole) + std::string(frac);
        fraction_digits = static_cast<long>(frac.size());
    } else {
        if (!all_digits(mantissa)) throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
        digits = std::string(mantissa);
    }

    Rational value{Integer(strip_zeros(digits))};
    const long shift = exponent - fraction_digits;
    if (shift > 0) value *= Rational(pow10(shift));
    if (shift < 0) value /= Rational(pow10(-shift));
    return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

Integer floor(const Rational& value) {
    Integer num = boost::multiprecision::numerator(value);
    Integer den = boost::multiprecision::denominator(value);
    Integer q = num / den;  // truncates toward zero
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

}  // namespace peermech
