#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

namespace qm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_plain(const std::string& t, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + whole + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + whole + "'");
    return v;
}

}  // namespace

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
    }
    return out;
}

std::map<std::string, std::string> read_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return read_key_values(in);
}

double parse_real(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty number");
    double sign = 1.0;
    if (t[0] == '-' || t[0] == '+') {
        if (t[0] == '-') sign = -1.0;
        t = trim(t.substr(1));
    }
    // Split on '/' once: numerator / denominator.
    std::string num = t, den;
    if (const auto slash = t.find('/'); slash != std::string::npos) {
        num = trim(t.substr(0, slash));
        den = trim(t.substr(slash + 1));
    }
    auto factor = [&](std::string f) {
        double v = 1.0;
        if (const auto p = f.find("pi"); p != std::string::npos) {
            if (f.find("pi", p + 2) != std::string::npos) throw ConfigError("not a number: '" + text + "'");
            v = M_PI;
            std::string rest = trim(f.substr(0, p) + f.substr(p + 2));
            if (!rest.empty() && rest.front() == '*') rest = trim(rest.substr(1));
            if (!rest.empty() && rest.back() == '*') rest = trim(rest.substr(0, rest.size() - 1));
            if (!rest.empty()) v *= parse_plain(rest, text);
            return v;
        }
        return parse_plain(f, text);
    };
    double v = factor(num);
    if (!den.empty()) {
        const double d = factor(den);
        if (d == 0.0) throw ConfigError("division by zero in '" + text + "'");
        v /= d;
    }
    return sign * v;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        if (v != std::floor(v)) throw ConfigError("integer expected in '" + text + "'");
        out.push_back(int(v));
    }
    return out;
}

void apply_key_values(CLI::App& app, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        std::string name = "--" + key;
        for (char& c : name)
            if (c == '_') c = '-';
        CLI::Option* opt = nullptr;
        try {
            opt = app.get_option(name);
        } catch (const CLI::OptionNotFound&) {
            throw ConfigError("unknown config key '" + key + "' for " + app.get_name());
        }
        if (opt->count() > 0) continue;  // flags win
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", x);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::invalid_argument("csv: row width differs from header");
    rows_.push_back(row);
}

void CsvTable::write(std::ostream& out) const {
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (i < integer_.size() && integer_[i]) out << static_cast<long long>(std::llround(row[i]));
            else out << format_real(row[i]);
        }
        out << '\n';
    }
}

}  // namespace qm::cli
