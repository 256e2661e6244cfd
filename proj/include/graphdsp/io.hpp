#pragma once

// File formats: edge lists, signal/coordinate/label CSV, JSON for polynomials,
// filters, classifiers and spectral bases, and the binary LP code container.

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "graphdsp/apps/classifier.hpp"
#include "graphdsp/apps/lp.hpp"
#include "graphdsp/config.hpp"
#include "graphdsp/filtering.hpp"
#include "graphdsp/graph.hpp"
#include "graphdsp/polynomial.hpp"
#include "graphdsp/spectral_basis.hpp"

namespace graphdsp::io {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
    return buf;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos, 16);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw ValidationError("invalid fingerprint '" + s + "'");
    return v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

inline bool try_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

inline double parse_double(const std::string& s, const std::string& source, std::size_t line) {
    double v;
    if (!try_double(s, v)) throw ValidationError(where(source, line) + "expected a finite number, got '" + s + "'");
    return v;
}

inline std::size_t parse_index(const std::string& s, const std::string& source, std::size_t line) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError(where(source, line) + "expected a node index, got '" + s + "'");
    return static_cast<std::size_t>(std::stoull(s));
}

inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace detail

// ---- edge lists -----------------------------------------------------------

/// Header `graphdsp-edges v1 N=<n>`, a fingerprint comment, then `src dst re [im]`
/// per edge. An edge (src, dst, w) means A[dst, src] = w.
inline std::string serialize_graph(const Graph& g) {
    std::string out = "graphdsp-edges v1 N=" + std::to_string(g.size()) + "\n";
    out += "# fingerprint=" + hex64(g.fingerprint()) + "\n";
    for (const auto& e : g.edges()) {
        out += std::to_string(e.src) + " " + std::to_string(e.dst) + " " + fmt_double(e.weight.real());
        if (e.weight.imag() != 0.0) out += " " + fmt_double(e.weight.imag());
        out += "\n";
    }
    return out;
}

inline Graph parse_graph(const std::string& text, const std::string& source = "<edges>") {
    const auto lines = detail::lines_of(text);
    std::size_t i = 0;
    while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
    if (i == lines.size()) throw ValidationError(source + ": empty edge file");
    const auto head = detail::split_ws(lines[i]);
    if (head.size() != 3 || head[0] != "graphdsp-edges" || head[1] != "v1" || head[2].rfind("N=", 0) != 0)
        throw ValidationError(detail::where(source, i + 1) + "expected header 'graphdsp-edges v1 N=<n>'");
    const std::size_t n = detail::parse_index(head[2].substr(2), source, i + 1);
    std::optional<std::uint64_t> fp;
    std::vector<Edge> edges;
    for (++i; i < lines.size(); ++i) {
        const std::string line = detail::trim(lines[i]);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = detail::trim(line.substr(1));
            if (body.rfind("fingerprint=", 0) == 0) fp = parse_hex64(body.substr(12));
            continue;
        }
        const auto tok = detail::split_ws(line);
        if (tok.size() < 3 || tok.size() > 4)
            throw ValidationError(detail::where(source, i + 1) + "expected 'src dst re [im]'");
        Edge e;
        e.src = detail::parse_index(tok[0], source, i + 1);
        e.dst = detail::parse_index(tok[1], source, i + 1);
        const double re = detail::parse_double(tok[2], source, i + 1);
        const double im = tok.size() == 4 ? detail::parse_double(tok[3], source, i + 1) : 0.0;
        e.weight = {re, im};
        if (e.src >= n || e.dst >= n)
            throw ValidationError(detail::where(source, i + 1) + "node index out of range for N=" + std::to_string(n));
        edges.push_back(e);
    }
    Graph g;
    try {
        g = Graph(n, std::move(edges));
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    if (fp && *fp != g.fingerprint())
        throw ValidationError(source + ": fingerprint comment does not match the edge list");
    return g;
}

inline Graph read_graph(const std::string& path) { return parse_graph(read_file(path), path); }
inline void write_graph(const std::string& path, const Graph& g) { write_file(path, serialize_graph(g)); }

// ---- signals --------------------------------------------------------------

/// One value per line; `re,im` on every line when any entry is complex.
inline std::string serialize_signal(const CVector& s) {
    const bool cpx = s.size() > 0 && s.imag().cwiseAbs().maxCoeff() != 0.0;
    std::string out;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out += fmt_double(s(i).real());
        if (cpx) out += "," + fmt_double(s(i).imag());
        out += "\n";
    }
    return out;
}

inline CVector parse_signal(const std::string& text, const std::string& source = "<signal>") {
    std::vector<cplx> vals;
    const auto lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = detail::trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        const auto f = detail::split(line, ',');
        if (f.size() > 2) throw ValidationError(detail::where(source, i + 1) + "expected 're' or 're,im'");
        const double re = detail::parse_double(f[0], source, i + 1);
        const double im = f.size() == 2 ? detail::parse_double(f[1], source, i + 1) : 0.0;
        vals.emplace_back(re, im);
    }
    CVector out(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
    return out;
}

inline CVector read_signal(const std::string& path) { return parse_signal(read_file(path), path); }
inline void write_signal(const std::string& path, const CVector& s) { write_file(path, serialize_signal(s)); }

// ---- coordinates ----------------------------------------------------------

struct Coordinates {
    std::vector<std::string> ids;
    std::vector<Point> points;
};

/// Rows `id,x,y[,z]`; an optional header row is recognized by a non-numeric x.
inline Coordinates parse_coords(const std::string& text, const std::string& source = "<coords>") {
    Coordinates out;
    const auto lines = detail::lines_of(text);
    bool first = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = detail::trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        const auto f = detail::split(line, ',');
        double probe;
        if (first && f.size() >= 2 && !detail::try_double(f[1], probe)) {
            first = false;
            continue;
        }
        first = false;
        if (f.size() < 3 || f.size() > 4)
            throw ValidationError(detail::where(source, i + 1) + "expected 'id,x,y[,z]'");
        Point p;
        for (std::size_t k = 1; k < f.size(); ++k) p.push_back(detail::parse_double(f[k], source, i + 1));
        if (!out.points.empty() && out.points.front().size() != p.size())
            throw ValidationError(detail::where(source, i + 1) + "inconsistent coordinate dimension");
        out.ids.push_back(f[0]);
        out.points.push_back(std::move(p));
    }
    if (out.points.empty()) throw ValidationError(source + ": no coordinates");
    return out;
}

inline std::string serialize_coords(const std::vector<Point>& pts) {
    std::string out = "id,x,y" + std::string(pts.empty() || pts[0].size() < 3 ? "" : ",z") + "\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out += std::to_string(i);
        for (double x : pts[i]) out += "," + fmt_double(x);
        out += "\n";
    }
    return out;
}

// ---- labels ---------------------------------------------------------------

/// Rows `node_id,value` with integer values in `allowed`; unlisted nodes are 0.
inline std::vector<int> parse_labels(const std::string& text, std::size_t n, const std::vector<int>& allowed,
                                     const std::string& source = "<labels>") {
    std::vector<int> out(n, 0);
    std::vector<bool> seen(n, false);
    const auto lines = detail::lines_of(text);
    bool first = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = detail::trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        const auto f = detail::split(line, ',');
        if (first && f.size() == 2 && f[0].find_first_not_of("0123456789") != std::string::npos) {
            first = false;
            continue;
        }
        first = false;
        if (f.size() != 2) throw ValidationError(detail::where(source, i + 1) + "expected 'node_id,value'");
        const std::size_t node = detail::parse_index(f[0], source, i + 1);
        if (node >= n) throw ValidationError(detail::where(source, i + 1) + "node " + f[0] + " out of range");
        if (seen[node]) throw ValidationError(detail::where(source, i + 1) + "node " + f[0] + " listed twice");
        const double v = detail::parse_double(f[1], source, i + 1);
        const int iv = static_cast<int>(v);
        if (static_cast<double>(iv) != v || std::find(allowed.begin(), allowed.end(), iv) == allowed.end())
            throw ValidationError(detail::where(source, i + 1) + "value '" + f[1] + "' not allowed");
        out[node] = iv;
        seen[node] = true;
    }
    return out;
}

inline std::string serialize_labels(const std::vector<int>& labels, const std::string& value_name = "label") {
    std::string out = "node_id," + value_name + "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    return out;
}

inline CVector labels_to_signal(const std::vector<int>& labels) {
    CVector s(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) s(static_cast<Eigen::Index>(i)) = static_cast<double>(labels[i]);
    return s;
}

// ---- JSON -----------------------------------------------------------------

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError("expected a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json polynomial_to_json(const Polynomial& p) {
    json c = json::array();
    for (const auto& x : p.coeffs()) c.push_back(complex_json(x));
    return json{{"coeffs", c}};
}

inline Polynomial polynomial_from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
        throw ValidationError("polynomial JSON must be an object with a 'coeffs' array");
    std::vector<cplx> c;
    for (const auto& x : j["coeffs"]) c.push_back(complex_from_json(x));
    for (const auto& x : c)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw ValidationError("non-finite coefficient");
    return Polynomial(std::move(c), 0.0);
}

inline json filter_to_json(const GraphFilter& f) {
    json j = polynomial_to_json(f.taps);
    j["graph_fingerprint"] = hex64(f.graph_id);
    return j;
}

inline GraphFilter filter_from_json(const json& j) {
    GraphFilter f{polynomial_from_json(j), 0};
    if (j.contains("graph_fingerprint")) f.graph_id = parse_hex64(j["graph_fingerprint"].get<std::string>());
    return f;
}

inline json classifier_to_json(const ClassifierFilter& cf) {
    return json{{"stages", cf.stages}, {"stage_errors", cf.stage_errors}};
}

inline ClassifierFilter classifier_from_json(const json& j) {
    if (!j.is_object() || !j.contains("stages") || !j["stages"].is_array())
        throw ValidationError("classifier JSON must contain a 'stages' array");
    ClassifierFilter cf;
    for (const auto& x : j["stages"]) {
        if (!x.is_number()) throw ValidationError("classifier stages must be numbers");
        const double h = x.get<double>();
        if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("classifier stages must be finite and nonnegative");
        cf.stages.push_back(h);
    }
    if (j.contains("stage_errors"))
        for (const auto& x : j["stage_errors"]) cf.stage_errors.push_back(x.get<std::size_t>());
    return cf;
}

inline json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json basis_to_json(const SpectralBasis& b) {
    json eig = json::array();
    for (const auto& x : b.eigenvalues()) eig.push_back(complex_json(x));
    return json{{"backend", std::string(to_string(b.backend()))},
                {"graph_fingerprint", hex64(b.graph_id())},
                {"n", b.size()},
                {"eigenvalues", eig},
                {"chains", b.chains()},
                {"cond_V", b.cond_v()},
                {"V", matrix_json(b.v())},
                {"F", matrix_json(b.f())}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": invalid JSON: " + e.what());
    }
}

// ---- LP code container ----------------------------------------------------

inline constexpr char kLpMagic[] = "GDSPLP1";

namespace detail {
inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffU);
}
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline std::uint64_t get_u64(std::string_view in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw ValidationError("LP code: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return v;
}
inline double get_f64(std::string_view in, std::size_t& pos) { return std::bit_cast<double>(get_u64(in, pos)); }
} // namespace detail

/// Magic `GDSPLP1`, then N, L, B (u64), min, max (f64), graph fingerprint (u64),
/// L taps as (re, im) f64 pairs, and N B-bit codes packed LSB first. All little-endian.
inline std::string serialize_lpcode(const LPCode& c) {
    std::string out(kLpMagic, 7);
    const auto& taps = c.taps.taps.coeffs();
    detail::put_u64(out, c.codes.size());
    detail::put_u64(out, taps.size());
    detail::put_u64(out, c.header.bits);
    detail::put_f64(out, c.header.min);
    detail::put_f64(out, c.header.max);
    detail::put_u64(out, c.fingerprint);
    for (const auto& t : taps) {
        detail::put_f64(out, t.real());
        detail::put_f64(out, t.imag());
    }
    std::uint64_t acc = 0;
    unsigned nbits = 0;
    for (auto code : c.codes) {
        acc |= static_cast<std::uint64_t>(code) << nbits;
        nbits += c.header.bits;
        while (nbits >= 8) {
            out += static_cast<char>(acc & 0xffU);
            acc >>= 8;
            nbits -= 8;
        }
    }
    if (nbits > 0) out += static_cast<char>(acc & 0xffU);
    return out;
}

inline LPCode parse_lpcode(std::string_view in) {
    if (in.size() < 7 || in.substr(0, 7) != std::string_view(kLpMagic, 7))
        throw ValidationError("LP code: bad magic (expected GDSPLP1)");
    std::size_t pos = 7;
    const std::uint64_t n = detail::get_u64(in, pos);
    const std::uint64_t l = detail::get_u64(in, pos);
    const std::uint64_t bits = detail::get_u64(in, pos);
    if (bits < 1 || bits > 16) throw ValidationError("LP code: bits must be in [1, 16]");
    if (l > 64 || n > (std::uint64_t{1} << 40)) throw ValidationError("LP code: implausible header");
    LPCode c;
    c.header.bits = static_cast<unsigned>(bits);
    c.header.min = detail::get_f64(in, pos);
    c.header.max = detail::get_f64(in, pos);
    c.fingerprint = detail::get_u64(in, pos);
    std::vector<cplx> taps;
    for (std::uint64_t i = 0; i < l; ++i) {
        const double re = detail::get_f64(in, pos);
        const double im = detail::get_f64(in, pos);
        taps.emplace_back(re, im);
    }
    c.taps = {Polynomial(std::move(taps), 0.0), c.fingerprint};
    const std::uint64_t payload = (n * bits + 7) / 8;
    if (in.size() - pos != payload) throw ValidationError("LP code: payload size does not match the header");
    std::uint64_t acc = 0;
    unsigned have = 0;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        while (have < bits) {
            acc |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << have;
            have += 8;
        }
        c.codes.push_back(static_cast<std::uint32_t>(acc & mask));
        acc >>= bits;
        have -= static_cast<unsigned>(bits);
    }
    return c;
}

} // namespace graphdsp::io
