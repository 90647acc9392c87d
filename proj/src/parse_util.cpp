#include "essnorm/parse_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace essnorm::parse {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (pos != t.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

long parse_long(const std::string& s) {
    const std::string t = trim(s);
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(t, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
    if (pos != t.size()) throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

std::complex<double> parse_complex(const std::string& raw) {
    std::string t = trim(raw);
    if (t.empty()) throw std::invalid_argument("empty complex literal");
    if (t.back() != 'i' && t.back() != 'I') return {parse_double(t), 0.0};

    t.pop_back();  // strip the trailing i
    // Find the sign separating real and imaginary parts (skip a leading sign
    // and signs inside exponents).
    std::size_t sep = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            sep = k;
            break;
        }
    }
    auto imag_of = [](const std::string& part) {
        std::string u = trim(part);
        if (u.empty() || u == "+") return 1.0;
        if (u == "-") return -1.0;
        return parse_double(u);
    };
    if (sep == std::string::npos) return {0.0, imag_of(t)};
    return {parse_double(t.substr(0, sep)), imag_of(t.substr(sep))};
}

std::string format_complex(std::complex<double> z) {
    char buf[80];
    if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.12g", z.real());
    } else {
        std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    }
    return buf;
}

std::vector<std::complex<double>> parse_complex_list(const std::string& s) {
    std::vector<std::complex<double>> out;
    for (const auto& part : split(s, ',')) {
        if (trim(part).empty()) continue;
        out.push_back(parse_complex(part));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace essnorm::parse
