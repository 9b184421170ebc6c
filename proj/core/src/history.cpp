#include "c0ipg/history.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace c0ipg {

namespace {

std::ofstream open_for_writing(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    return out;
}

Real parse_real(const std::string& field, const std::string& line)
{
    char* end = nullptr;
    const Real v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw std::runtime_error("malformed number '" + field + "' in history row: " + line);
    }
    return v;
}

}  // namespace

void emit_history(std::ostream& out, const AdaptTrace& trace, std::optional<Complex> reference)
{
    out << kHistoryHeader << '\n';
    std::ostringstream row;
    row.precision(12);
    for (const IterationRecord& r : trace.records) {
        row.str("");
        row << r.iter << ',' << r.dof << ',' << r.k.real() << ',' << r.k.imag() << ',';
        if (reference) {
            row << std::abs(r.k - *reference);
        }
        row << ',' << r.eta2_primal << ',' << r.eta2_dual << ',' << r.eta2_total << ',' << r.marked << ','
            << r.seconds;
        out << row.str() << '\n';
    }
}

void emit_history(const std::string& path, const AdaptTrace& trace, std::optional<Complex> reference)
{
    auto out = open_for_writing(path);
    emit_history(out, trace, reference);
}

std::vector<HistoryRow> parse_history(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kHistoryHeader) {
        throw std::runtime_error("unexpected history header: " + line);
    }
    std::vector<HistoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() != 10) {
            throw std::runtime_error("history row needs 10 fields: " + line);
        }
        HistoryRow r;
        r.iter = static_cast<int>(parse_real(fields[0], line));
        r.dof = static_cast<int>(parse_real(fields[1], line));
        r.k = {parse_real(fields[2], line), parse_real(fields[3], line)};
        if (!fields[4].empty()) {
            r.err_abs = parse_real(fields[4], line);
        }
        r.eta2_primal = parse_real(fields[5], line);
        r.eta2_dual = parse_real(fields[6], line);
        r.eta2_total = parse_real(fields[7], line);
        r.marked = static_cast<int>(parse_real(fields[8], line));
        r.seconds = parse_real(fields[9], line);
        rows.push_back(r);
    }
    return rows;
}

void write_indicators(std::ostream& out, const std::vector<Real>& values)
{
    out << "triangle_id,eta_sq\n";
    out.precision(12);
    for (std::size_t t = 0; t < values.size(); ++t) {
        out << t << ',' << values[t] << '\n';
    }
}

void write_indicators(const std::string& path, const std::vector<Real>& values)
{
    auto out = open_for_writing(path);
    write_indicators(out, values);
}

Complex parse_complex(std::string_view text)
{
    std::string s;
    for (char ch : text) {
        if (ch != ' ') {
            s.push_back(ch == 'j' ? 'i' : ch);
        }
    }
    auto fail = [&]() -> Complex { throw std::invalid_argument("cannot parse complex number '" + std::string(text) + "'"); };
    if (s.empty()) {
        return fail();
    }
    const char* begin = s.c_str();
    char* end = nullptr;
    if (s.back() != 'i') {
        const Real re = std::strtod(begin, &end);
        return end == begin + s.size() ? Complex(re, 0.0) : fail();
    }
    // Split at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size() - 1; i > 0; --i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [&](const std::string& part) -> Real {
        if (part == "+" || part.empty()) {
            return 1.0;
        }
        if (part == "-") {
            return -1.0;
        }
        char* e = nullptr;
        const Real v = std::strtod(part.c_str(), &e);
        if (e != part.c_str() + part.size()) {
            fail();
        }
        return v;
    };
    const std::string body = s.substr(0, s.size() - 1);
    if (split == std::string::npos) {
        return {0.0, imag_of(body)};
    }
    const std::string re_part = body.substr(0, split);
    const Real re = std::strtod(re_part.c_str(), &end);
    if (end != re_part.c_str() + re_part.size()) {
        return fail();
    }
    return {re, imag_of(body.substr(split))};
}

}  // namespace c0ipg
