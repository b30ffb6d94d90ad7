#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace qm::cli {

// Invalid user input; the driver exits with status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat "key = value" lines; '#' starts a comment. Duplicate keys are errors.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values_file(const std::string& path);

// Real numbers with an optional pi factor: "0.5", "pi", "-pi/2", "2*pi", "3pi/4".
double parse_real(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

// Fills options of `app` that were not given on the command line. Keys use
// underscores for the dashes of the long option names.
void apply_key_values(CLI::App& app, const std::map<std::string, std::string>& values);

// CSV with a header; doubles in scientific notation with six significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    // Columns listed in integer_columns are printed without exponent.
    void set_integer_columns(std::vector<bool> flags) { integer_ = std::move(flags); }
    void add_row(const std::vector<double>& row);
    void write(std::ostream& out) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<bool> integer_;
    std::vector<std::vector<double>> rows_;
};

std::string format_real(double x);

}  // namespace qm::cli
