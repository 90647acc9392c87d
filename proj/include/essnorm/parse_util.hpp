#pragma once

#include <complex>
#include <string>
#include <vector>

// Small text helpers shared by the spec mini-languages (map specs, measure
// specs, Dirichlet polynomials, scenario files).

namespace essnorm::parse {

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
bool starts_with(const std::string& s, const std::string& prefix);

/// Complex literal: `1.5`, `2i`, `1+2i`, `-0.5-0.25i`, `i`.
std::complex<double> parse_complex(const std::string& s);
std::string format_complex(std::complex<double> z);

double parse_double(const std::string& s);
long parse_long(const std::string& s);

/// Comma-separated complex list.
std::vector<std::complex<double>> parse_complex_list(const std::string& s);

/// Reads a whole file into a string; throws std::runtime_error on failure.
std::string read_file(const std::string& path);

}  // namespace essnorm::parse
