#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace peermech {

/// Exact rational scalar used throughout. Expression templates are off so the
/// type behaves like a plain value inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a decimal string ("0.25", "-1.5e-2") into the
/// exact fraction it denotes. Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// "p/q" for non-integers, "p" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Largest integer not exceeding value.
Integer floor(const Rational& value);

}  // namespace peermech
