#ifndef E2PA_REPORT_HPP
#define E2PA_REPORT_HPP

// Plain-text run reports: a provenance block echoing every input, free-text
// result lines, and comma-separated record tables.

#include "e2pa/io.hpp"

#include <deque>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace e2pa::report {

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void input(const std::string& key, const std::string& value) { inputs_.emplace_back(key, value); }
    void input(const std::string& key, double value) { inputs_.emplace_back(key, io::fmt(value)); }
    void line(std::string text) { lines_.push_back(std::move(text)); }
    Table& table(std::string name, std::vector<std::string> header) {
        tables_.push_back({std::move(name), std::move(header), {}});
        return tables_.back();
    }

    const std::deque<Table>& tables() const { return tables_; }

    void write(std::ostream& out) const {
        out << "# e2pa " << command_ << "\n[inputs]\n";
        for (const auto& [k, v] : inputs_) out << k << " = " << v << '\n';
        out << "[results]\n";
        for (const auto& l : lines_) out << l << '\n';
        for (const auto& t : tables_) {
            out << "[records " << t.name << "]\n";
            write_csv(out, t);
        }
    }

    static void write_csv(std::ostream& out, const Table& t) {
        for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
        out << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
            out << '\n';
        }
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> lines_;
    std::deque<Table> tables_;  // stable references across table() calls
};

/// "12.3 +/- 4.5 (k=2)" style with a fixed number of significant digits.
inline std::string with_uncertainty(double v, double expanded, double k, int digits = 4) {
    return io::fmt(v, digits) + " +/- " + io::fmt(expanded, 2) + " (k=" + io::fmt(k, 3) + ")";
}

} // namespace e2pa::report

#endif
