#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpmimo/errors.hpp"
#include "mpmimo/netparams.hpp"

namespace mpmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Token {
    std::string text;
    int line;
};

struct DataLine {
    std::vector<double> values;
    int line;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, int line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw SyntaxError(line, "expected a number, got '" + tok + "'");
    return v;
}

double unit_scale(const std::string& unit, int line) {
    const std::string u = lower(unit);
    if (u == "hz") return 1.0;
    if (u == "khz") return 1e3;
    if (u == "mhz") return 1e6;
    if (u == "ghz") return 1e9;
    throw SyntaxError(line, "unknown frequency unit '" + unit + "'");
}

enum class ValueFormat { RI, MA, DB };

cd decode_pair(double a, double b, ValueFormat fmt) {
    switch (fmt) {
        case ValueFormat::RI:
            return {a, b};
        case ValueFormat::MA:
            return std::polar(a, b * kPi / 180.0);
        case ValueFormat::DB:
            return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    return {};
}

// Builds one matrix from 2*n*n values laid out row-major, honoring the
// Touchstone 2-port column order S11 S21 S12 S22.
CMat build_matrix(std::size_t n, const std::vector<cd>& vals) {
    CMat m(n, n);
    if (n == 2) {
        m(0, 0) = vals[0];
        m(1, 0) = vals[1];
        m(0, 1) = vals[2];
        m(1, 1) = vals[3];
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = vals[i * n + j];
    }
    return m;
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> pts) : points(std::move(pts)) {
    if (points.empty()) throw Error("frequency grid is empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i] > 0.0) || !std::isfinite(points[i]))
            throw Error("frequency grid points must be positive and finite");
        if (i > 0 && points[i] <= points[i - 1])
            throw NonMonotoneFrequency("frequency grid is not strictly increasing");
    }
}

NetworkParams parse_touchstone(const std::string& text) {
    // Pass 1: strip comments, find the single option line, collect data lines.
    bool have_option = false;
    int option_line = 0;
    std::string unit_tok, kind_tok, fmt_tok;
    double z_ref = 0.0;
    std::vector<DataLine> data;

    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        if (const auto bang = raw.find('!'); bang != std::string::npos) raw.erase(bang);
        const auto toks = split_ws(raw);
        if (toks.empty()) continue;
        if (toks[0][0] == '[')
            throw UnsupportedFormat("Touchstone v2 keyword sections are not supported");
        if (toks[0] == "#") {
            if (have_option) throw SyntaxError(lineno, "second option line");
            if (toks.size() != 6 || lower(toks[4]) != "r")
                throw SyntaxError(lineno, "option line must be '# <unit> <S|Z> <RI|MA|DB> R <z_ref>'");
            unit_tok = toks[1];
            kind_tok = lower(toks[2]);
            fmt_tok = lower(toks[3]);
            z_ref = parse_number(toks[5], lineno);
            if (!(z_ref > 0.0)) throw SyntaxError(lineno, "reference impedance must be positive");
            have_option = true;
            option_line = lineno;
            continue;
        }
        if (!have_option) throw SyntaxError(lineno, "data before the option line");
        DataLine dl{{}, lineno};
        for (const auto& t : toks) dl.values.push_back(parse_number(t, lineno));
        data.push_back(std::move(dl));
    }
    if (!have_option) throw SyntaxError(lineno, "missing option line");
    if (data.empty()) throw SyntaxError(option_line, "no data lines");

    ParamKind kind;
    if (kind_tok == "s")
        kind = ParamKind::Scattering;
    else if (kind_tok == "z")
        kind = ParamKind::Impedance;
    else if (kind_tok == "y" || kind_tok == "g" || kind_tok == "h")
        throw UnsupportedFormat("parameter kind '" + kind_tok + "' is not supported");
    else
        throw SyntaxError(option_line, "unknown parameter kind '" + kind_tok + "'");

    ValueFormat fmt;
    if (fmt_tok == "ri")
        fmt = ValueFormat::RI;
    else if (fmt_tok == "ma")
        fmt = ValueFormat::MA;
    else if (fmt_tok == "db")
        fmt = ValueFormat::DB;
    else
        throw SyntaxError(option_line, "unknown value format '" + fmt_tok + "'");

    const double fscale = unit_scale(unit_tok, option_line);

    // Infer port count from the first data line: 1 + 2 values is a 1-port,
    // 1 + 2n values a row of an n >= 3 port block, and 9 values either a
    // complete 2-port line or the first row of a 4-port block (settled by
    // whether a frequency-less 8-value line follows).
    const std::size_t t0 = data[0].values.size();
    std::size_t n_ports = 0;
    bool row_mode = false;
    if (t0 == 3) {
        n_ports = 1;
    } else if (t0 == 9) {
        if (data.size() > 1 && data[1].values.size() == 8) {
            n_ports = 4;
            row_mode = true;
        } else {
            n_ports = 2;
        }
    } else if (t0 >= 7 && t0 % 2 == 1) {
        n_ports = (t0 - 1) / 2;
        row_mode = true;
    } else {
        throw SyntaxError(data[0].line, "unrecognized data layout");
    }

    std::vector<double> freqs;
    std::vector<CMat> mats;
    std::size_t idx = 0;
    while (idx < data.size()) {
        const DataLine& head = data[idx];
        if (head.values.size() != (row_mode ? 1 + 2 * n_ports : 1 + 2 * n_ports * n_ports))
            throw SyntaxError(head.line, "wrong value count for a " + std::to_string(n_ports) +
                                             "-port data line");
        std::vector<cd> vals;
        vals.reserve(n_ports * n_ports);
        auto push_pairs = [&](const std::vector<double>& v, std::size_t from) {
            for (std::size_t i = from; i + 1 < v.size(); i += 2)
                vals.push_back(decode_pair(v[i], v[i + 1], fmt));
        };
        push_pairs(head.values, 1);
        ++idx;
        if (row_mode) {
            for (std::size_t r = 1; r < n_ports; ++r, ++idx) {
                if (idx >= data.size())
                    throw SyntaxError(head.line, "incomplete matrix block at end of file");
                if (data[idx].values.size() != 2 * n_ports)
                    throw SyntaxError(data[idx].line, "continuation row must hold one matrix row");
                push_pairs(data[idx].values, 0);
            }
        }
        const double f = head.values[0] * fscale;
        if (!freqs.empty() && f <= freqs.back())
            throw NonMonotoneFrequency("frequencies must be strictly increasing");
        freqs.push_back(f);
        mats.push_back(build_matrix(n_ports, vals));
    }

    NetworkParams p;
    p.kind = kind;
    p.n_ports = n_ports;
    p.z_ref = z_ref;
    p.grid = FrequencyGrid(std::move(freqs));
    p.matrices = std::move(mats);
    return p;
}

NetworkParams parse_touchstone_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_touchstone(buf.str());
}

std::string write_touchstone(const NetworkParams& params) {
    const std::size_t n = params.n_ports;
    char num[64];
    auto fmt_num = [&](double v) {
        std::snprintf(num, sizeof num, "%.12g", v);
        return std::string(num);
    };
    std::ostringstream out;
    out << "! " << n << "-port " << (params.kind == ParamKind::Scattering ? "S" : "Z")
        << "-parameters\n";
    out << "# Hz " << (params.kind == ParamKind::Scattering ? "S" : "Z") << " RI R "
        << fmt_num(params.z_ref) << "\n";
    for (std::size_t fi = 0; fi < params.grid.size(); ++fi) {
        const CMat& m = params.matrices[fi];
        out << fmt_num(params.grid.points[fi]);
        auto put = [&](cd v) { out << " " << fmt_num(v.real()) << " " << fmt_num(v.imag()); };
        if (n == 2) {
            put(m(0, 0));
            put(m(1, 0));
            put(m(0, 1));
            put(m(1, 1));
            out << "\n";
        } else if (n == 1) {
            put(m(0, 0));
            out << "\n";
        } else {
            // n >= 3: matrix row per line, frequency only on the first
            for (std::size_t j = 0; j < n; ++j) put(m(0, j));
            out << "\n";
            for (std::size_t i = 1; i < n; ++i) {
                bool first = true;
                for (std::size_t j = 0; j < n; ++j) {
                    if (!first) out << " ";
                    first = false;
                    out << fmt_num(m(i, j).real()) << " " << fmt_num(m(i, j).imag());
                }
                out << "\n";
            }
        }
    }
    return out.str();
}

void write_touchstone_file(const NetworkParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << write_touchstone(params);
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace mpmimo
