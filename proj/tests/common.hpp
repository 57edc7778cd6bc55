#pragma once

#include "peermech/env.hpp"

#include <string>

inline std::string data_path(const std::string& name) { return std::string(PEERMECH_TEST_DATA) + "/" + name; }

inline peermech::Rational R(const char* text) { return peermech::parse_rational(text); }
