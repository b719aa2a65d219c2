#ifndef E2PA_IO_HPP
#define E2PA_IO_HPP

// Text file formats: two-column spectra, JSI/JTI grids, count series.

#include "e2pa/error.hpp"
#include "e2pa/jsi.hpp"
#include "e2pa/spectrum.hpp"
#include "e2pa/stats.hpp"

#include <glob.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace e2pa::io {

/// Shortest round-trip representation, independent of locale.
inline std::string fmt(double v, int precision = 17) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = line.find(sep, start);
        out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

/// Two columns (wavelength_nm, value); '#' comments and one header line allowed.
inline Spectrum read_spectrum_csv(const std::string& path, SpectrumKind kind) {
    auto in = open_in(path);
    std::vector<double> wl, v;
    std::string line;
    std::size_t n = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = split(t);
        double a, b;
        if (f.size() != 2 || !parse_double(f[0], a) || !parse_double(f[1], b)) {
            if (!header_seen && wl.empty()) {
                header_seen = true;
                continue;
            }
            throw ParseError(path, n, "expected two numeric columns (wavelength_nm, value)");
        }
        wl.push_back(a);
        v.push_back(b);
    }
    try {
        return Spectrum(std::move(wl), std::move(v), kind);
    } catch (const DomainError& e) {
        throw ParseError(path, 0, e.what());
    }
}

/// Grid layout: first row = idler axis values (leading cell ignored), then
/// one row per signal value: signal, intensities...
inline jsi::JointSpectrum read_jsi_grid(const std::string& path,
                                        jsi::GridKind kind = jsi::GridKind::wavelength_nm) {
    auto in = open_in(path);
    std::string line;
    std::size_t n = 0;
    jsi::JointSpectrum j;
    j.kind = kind;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = split(t);
        if (!have_header) {
            if (f.size() < 3) throw ParseError(path, n, "header needs a corner cell and at least two idler values");
            for (std::size_t k = 1; k < f.size(); ++k) {
                double x;
                if (!parse_double(f[k], x)) throw ParseError(path, n, "non-numeric idler axis value in column " + std::to_string(k + 1));
                j.grid_i.push_back(x);
            }
            have_header = true;
            continue;
        }
        if (f.size() != j.grid_i.size() + 1)
            throw ParseError(path, n, "expected " + std::to_string(j.grid_i.size() + 1) + " columns, found " +
                                          std::to_string(f.size()));
        double x;
        if (!parse_double(f[0], x)) throw ParseError(path, n, "non-numeric signal axis value");
        j.grid_s.push_back(x);
        for (std::size_t k = 1; k < f.size(); ++k) {
            double v;
            if (!parse_double(f[k], v)) throw ParseError(path, n, "non-numeric intensity in column " + std::to_string(k + 1));
            if (v < 0.0) throw ParseError(path, n, "negative intensity in column " + std::to_string(k + 1));
            j.intensity.push_back(v);
        }
    }
    if (!have_header) throw ParseError(path, n, "file has no header row");
    try {
        jsi::validate(j);
    } catch (const DomainError& e) {
        throw ParseError(path, 0, e.what());
    }
    return j;
}

inline void write_grid(std::ostream& out, const std::vector<double>& gs, const std::vector<double>& gi,
                       const std::vector<double>& values, std::size_t s_lo, std::size_t s_hi, std::size_t i_lo,
                       std::size_t i_hi, std::size_t stride, const char* corner) {
    out << corner;
    for (std::size_t i = i_lo; i < i_hi; i += stride) out << ',' << fmt(gi[i], 8);
    out << '\n';
    for (std::size_t s = s_lo; s < s_hi; s += stride) {
        out << fmt(gs[s], 8);
        for (std::size_t i = i_lo; i < i_hi; i += stride) out << ',' << fmt(values[s * gi.size() + i], 8);
        out << '\n';
    }
}

inline void write_jsi_grid(const std::string& path, const jsi::JointSpectrum& j) {
    auto out = open_out(path);
    write_grid(out, j.grid_s, j.grid_i, j.intensity, 0, j.ns(), 0, j.ni(), 1,
               j.kind == jsi::GridKind::wavelength_nm ? "lambda_s_nm\\lambda_i_nm" : "omega_s\\omega_i");
}

/// JTI in the JSI layout, cropped to |t| <= crop_fs and subsampled by stride.
inline void write_jti_grid(const std::string& path, const jsi::JointTemporal& j, double crop_fs = 0.0,
                           std::size_t stride = 1) {
    if (stride == 0) stride = 1;
    auto range = [&](const std::vector<double>& g) {
        std::size_t lo = 0, hi = g.size();
        if (crop_fs > 0.0) {
            while (lo < hi && g[lo] < -crop_fs) ++lo;
            while (hi > lo && g[hi - 1] > crop_fs) --hi;
        }
        return std::pair{lo, hi};
    };
    const auto [slo, shi] = range(j.grid_ts);
    const auto [ilo, ihi] = range(j.grid_ti);
    auto out = open_out(path);
    write_grid(out, j.grid_ts, j.grid_ti, j.intensity, slo, shi, ilo, ihi, stride, "t_s_fs\\t_i_fs");
}

inline const char* phase_code(ChopperPhase p) { return to_string(p); }

inline ChopperPhase parse_phase(std::string_view s, const std::string& path, std::size_t line) {
    if (s == "signal" || s == "S") return ChopperPhase::signal;
    if (s == "background" || s == "B") return ChopperPhase::background;
    if (s == "transition" || s == "T") return ChopperPhase::transition;
    throw ParseError(path, line, "unknown chopper phase '" + std::string(s) + "'");
}

/// Metadata lines "# key = value" precede the table; extra keys are kept.
struct CountSeriesFile {
    CountSeries series;
    std::map<std::string, std::string> metadata;
};

inline void write_count_series(std::ostream& out, const CountSeries& s,
                               const std::map<std::string, std::string>& extra = {}) {
    validate(s);
    if (s.power_uW) out << "# power_uW = " << fmt(*s.power_uW) << '\n';
    out << "# bin_width_s = " << fmt(s.width(0)) << '\n';
    out << "# fold_count = " << s.fold_count << '\n';
    if (s.seed) out << "# seed = " << *s.seed << '\n';
    for (const auto& [k, v] : extra) out << "# " << k << " = " << v << '\n';
    out << "t_start_s,counts,phase\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << fmt(s.bin_edges_s[i]) << ',' << s.counts[i] << ',' << phase_code(s.phase[i]) << '\n';
}

inline void write_count_series(const std::string& path, const CountSeries& s,
                               const std::map<std::string, std::string>& extra = {}) {
    auto out = open_out(path);
    write_count_series(out, s, extra);
}

inline CountSeriesFile read_count_series(const std::string& path) {
    auto in = open_in(path);
    CountSeriesFile f;
    std::string line;
    std::size_t n = 0;
    std::optional<double> width;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            f.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
            continue;
        }
        const auto c = split(t);
        if (!header && c.size() == 3 && c[0] == "t_start_s") {
            header = true;
            continue;
        }
        if (c.size() != 3) throw ParseError(path, n, "expected three columns (t_start_s, counts, phase)");
        double t0, cnt;
        if (!parse_double(c[0], t0)) throw ParseError(path, n, "non-numeric t_start_s");
        if (!parse_double(c[1], cnt) || cnt < 0.0 || cnt != std::floor(cnt))
            throw ParseError(path, n, "counts must be a non-negative integer");
        f.series.bin_edges_s.push_back(t0);
        f.series.counts.push_back(static_cast<std::uint64_t>(cnt));
        f.series.phase.push_back(parse_phase(c[2], path, n));
    }
    if (f.series.counts.empty()) throw ParseError(path, n, "no data rows");
    auto num = [&](const char* key) -> std::optional<double> {
        auto it = f.metadata.find(key);
        if (it == f.metadata.end()) return std::nullopt;
        double v;
        if (!parse_double(it->second, v)) throw ParseError(path, 0, std::string("bad metadata value for ") + key);
        return v;
    };
    width = num("bin_width_s");
    if (!width) {
        if (f.series.bin_edges_s.size() < 2) throw ParseError(path, 0, "single-bin series needs bin_width_s metadata");
        width = f.series.bin_edges_s.back() - f.series.bin_edges_s[f.series.bin_edges_s.size() - 2];
    }
    f.series.bin_edges_s.push_back(f.series.bin_edges_s.back() + *width);
    if (auto v = num("fold_count")) f.series.fold_count = static_cast<std::uint64_t>(*v);
    if (auto v = num("seed")) f.series.seed = static_cast<std::uint64_t>(*v);
    f.series.power_uW = num("power_uW");
    try {
        validate(f.series);
    } catch (const DomainError& e) {
        throw ParseError(path, 0, e.what());
    }
    return f;
}

/// Sorted paths matching a shell glob; empty when nothing matches.
inline std::vector<std::string> glob_paths(const std::string& pattern) {
    glob_t g{};
    std::vector<std::string> out;
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0)
        for (std::size_t k = 0; k < g.gl_pathc; ++k) out.emplace_back(g.gl_pathv[k]);
    globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) throw IoError("glob failed for '" + pattern + "'");
    return out;
}

/// One numeric column, or the last column of a comma-separated table.
inline std::vector<double> read_column(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> v;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = split(t);
        double x;
        if (!parse_double(f.back(), x)) {
            if (v.empty() && n == 1) continue;
            throw ParseError(path, n, "non-numeric value");
        }
        v.push_back(x);
    }
    return v;
}

/// Three columns (power_uW, rate, sigma) with an optional header.
inline std::vector<stats::PowerPoint> read_power_points(const std::string& path) {
    auto in = open_in(path);
    std::vector<stats::PowerPoint> pts;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = split(t);
        stats::PowerPoint p;
        if (f.size() != 3 || !parse_double(f[0], p.power_uW) || !parse_double(f[1], p.rate) ||
            !parse_double(f[2], p.sigma)) {
            if (pts.empty() && n == 1) continue;
            throw ParseError(path, n, "expected three numeric columns (power_uW, rate, sigma)");
        }
        pts.push_back(p);
    }
    return pts;
}

} // namespace e2pa::io

#endif
