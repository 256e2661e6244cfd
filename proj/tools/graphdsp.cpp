// graphdsp command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "graphdsp/graphdsp.hpp"

namespace fs = std::filesystem;
using namespace graphdsp;
using io::json;

namespace {

struct Context {
    std::uint64_t seed = Rng::kDefaultSeed;
    std::string backend = "numeric";
    std::vector<std::string> tol_overrides;
    std::string out_dir = ".";
    bool timings = false;

    Tolerances tol;
    JordanOptions jordan;
    std::chrono::steady_clock::time_point start;

    void prepare() {
        if (backend == "exact") jordan.backend = Backend::exact;
        else if (backend == "numeric") jordan.backend = Backend::numeric;
        else throw ValidationError("--backend must be 'exact' or 'numeric'");
        for (const auto& kv : tol_overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ValidationError("--tol expects <name>=<value>, got '" + kv + "'");
            double v = 0.0;
            if (!io::detail::try_double(kv.substr(eq + 1), v)) throw ValidationError("--tol value in '" + kv + "' is not a number");
            if (!tol.set(kv.substr(0, eq), v)) throw ValidationError("unknown tolerance '" + kv.substr(0, eq) + "'");
        }
        fs::create_directories(out_dir);
        start = std::chrono::steady_clock::now();
    }

    std::string path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

    void write(const std::string& name, const std::string& data) const { io::write_file(path(name), data); }

    json summary(const std::string& command) const {
        return json{{"command", command}, {"seed", seed}, {"backend", backend}};
    }

    void finish(json s) const {
        if (timings)
            s["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::string text = io::dump(s);
        write("summary.json", text);
        std::cout << text;
    }
};

GraphSignal load_signal(const Graph& g, const std::string& path) {
    CVector v = io::read_signal(path);
    if (static_cast<std::size_t>(v.size()) != g.size())
        throw ValidationError(path + ": signal has " + std::to_string(v.size()) + " values, graph has " +
                              std::to_string(g.size()) + " nodes");
    return GraphSignal(g, std::move(v));
}

GraphFilter load_filter(const Graph& g, const std::string& file, const std::vector<double>& taps) {
    GraphFilter f;
    if (!file.empty()) {
        f = io::filter_from_json(io::parse_json(io::read_file(file), file));
    } else if (!taps.empty()) {
        std::vector<cplx> c(taps.begin(), taps.end());
        f.taps = Polynomial(std::move(c), 0.0);
    } else {
        throw ValidationError("a filter is required (--filter FILE or --taps h0,h1,...)");
    }
    f.check_against(g);
    f.graph_id = g.fingerprint();
    return f;
}

double relative_error(const CVector& ref, const CVector& x) {
    const double d = ref.norm();
    return d > 0.0 ? (ref - x).norm() / d : (ref - x).norm();
}

RMatrix parse_calls(const std::string& path, std::size_t& n_out) {
    const std::string text = io::read_file(path);
    const auto lines = io::detail::lines_of(text);
    struct Call {
        std::size_t a, b;
        double d;
    };
    std::vector<Call> calls;
    std::size_t n = 0;
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = io::detail::trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("N=", 0) == 0) {
            n = io::detail::parse_index(line.substr(2), path, i + 1);
            continue;
        }
        const auto f = io::detail::split(line, ',');
        if (!header_seen && f.size() == 3 && f[0] == "caller") {
            header_seen = true;
            continue;
        }
        if (f.size() != 3) throw ValidationError(io::detail::where(path, i + 1) + "expected 'caller,callee,duration'");
        calls.push_back({io::detail::parse_index(f[0], path, i + 1), io::detail::parse_index(f[1], path, i + 1),
                         io::detail::parse_double(f[2], path, i + 1)});
        n = std::max({n, calls.back().a + 1, calls.back().b + 1});
    }
    RMatrix t = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& c : calls) t(static_cast<Eigen::Index>(c.a), static_cast<Eigen::Index>(c.b)) += c.d;
    n_out = n;
    return t;
}

std::string serialize_calls(const RMatrix& t) {
    std::string out = "N=" + std::to_string(t.rows()) + "\ncaller,callee,duration\n";
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j)
            if (t(i, j) != 0.0) out += std::to_string(i) + "," + std::to_string(j) + "," + io::fmt_double(t(i, j)) + "\n";
    return out;
}

std::vector<std::size_t> parse_range(const std::string& spec, std::size_t lo_allowed, std::size_t hi_allowed,
                                     const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& part : io::detail::split(spec, ',')) {
        const auto dots = part.find("..");
        std::size_t lo, hi;
        try {
            if (dots == std::string::npos) {
                lo = hi = std::stoul(part);
            } else {
                lo = std::stoul(part.substr(0, dots));
                hi = std::stoul(part.substr(dots + 2));
            }
        } catch (const std::exception&) {
            throw ValidationError(what + ": cannot parse range '" + spec + "'");
        }
        if (lo > hi || lo < lo_allowed || hi > hi_allowed)
            throw ValidationError(what + ": range '" + part + "' outside [" + std::to_string(lo_allowed) + ", " +
                                  std::to_string(hi_allowed) + "]");
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    CLI::App app{"graphdsp: discrete signal processing on graphs"};
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    app.add_option("--seed", ctx.seed, "RNG seed")->capture_default_str();
    app.add_option("--backend", ctx.backend, "Jordan/interpolation backend: exact | numeric")->capture_default_str();
    app.add_option("--tol", ctx.tol_overrides, "Tolerance override <name>=<value> (repeatable)");
    app.add_option("--out", ctx.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--timings", ctx.timings, "Include wall-clock timings in the summary");

    std::function<void()> action;

    // graph build
    auto* graph_cmd = app.add_subcommand("graph", "Graph construction");
    graph_cmd->require_subcommand(1);
    auto* build = graph_cmd->add_subcommand("build", "Build a graph from coordinates, an edge list, or a call log");
    std::string coords_file, edges_file, calls_file;
    std::size_t knn_k = 0;
    build->add_option("--coords", coords_file, "Coordinates CSV id,x,y[,z]");
    build->add_option("--k", knn_k, "Neighbors per node for --coords");
    build->add_option("--edges", edges_file, "Edge-list file");
    build->add_option("--calls", calls_file, "Call log CSV caller,callee,duration");
    build->callback([&] {
        action = [&] {
            const int forms = !coords_file.empty() + !edges_file.empty() + !calls_file.empty();
            if (forms != 1) throw ValidationError("graph build: give exactly one of --coords, --edges, --calls");
            Graph g;
            json s = ctx.summary("graph build");
            if (!coords_file.empty()) {
                if (knn_k == 0) throw ValidationError("graph build: --coords requires --k");
                auto c = io::parse_coords(io::read_file(coords_file), coords_file);
                g = knn_similarity_graph(c.points, knn_k);
                s["k"] = knn_k;
            } else if (!edges_file.empty()) {
                g = io::read_graph(edges_file);
            } else {
                std::size_t n = 0;
                g = normalize_call_graph(parse_calls(calls_file, n));
            }
            const CMatrix a = g.dense();
            ctx.write("graph.edges", io::serialize_graph(g));
            s["nodes"] = g.size();
            s["edges"] = g.edges().size();
            s["fingerprint"] = io::hex64(g.fingerprint());
            s["symmetric"] = (a - a.transpose()).cwiseAbs().maxCoeff() == 0.0;
            s["files"] = {"graph.edges"};
            ctx.finish(s);
        };
    });

    // synth
    auto* synth = app.add_subcommand("synth", "Synthetic datasets");
    synth->require_subcommand(1);
    SmoothFieldParams sf;
    auto* sf_cmd = synth->add_subcommand("smooth-field", "Smooth field on a kNN graph");
    sf_cmd->add_option("--nodes", sf.nodes)->capture_default_str();
    sf_cmd->add_option("--k", sf.k)->capture_default_str();
    sf_cmd->add_option("--order", sf.order)->capture_default_str();
    sf_cmd->add_option("--noise", sf.noise)->capture_default_str();
    sf_cmd->add_option("--snapshots", sf.snapshots)->capture_default_str();
    sf_cmd->callback([&] {
        action = [&] {
            Rng rng(ctx.seed);
            const SmoothField field = synth_smooth_field(sf, rng);
            json s = ctx.summary("synth smooth-field");
            json files = json::array({"coords.csv", "graph.edges"});
            ctx.write("coords.csv", io::serialize_coords(field.points));
            ctx.write("graph.edges", io::serialize_graph(field.graph));
            for (std::size_t t = 0; t < field.signals.size(); ++t) {
                char name[32];
                std::snprintf(name, sizeof name, field.signals.size() == 1 ? "signal.csv" : "signal_%03zu.csv", t);
                ctx.write(name, io::serialize_signal(field.signals[t].cast<cplx>()));
                files.push_back(name);
            }
            s["nodes"] = sf.nodes;
            s["k"] = sf.k;
            s["order"] = sf.order;
            s["noise"] = sf.noise;
            s["snapshots"] = sf.snapshots;
            s["files"] = files;
            ctx.finish(s);
        };
    });
    TwoBlockParams tb;
    auto* tb_cmd = synth->add_subcommand("two-block", "Planted two-community directed graph");
    tb_cmd->add_option("--block-size", tb.block_size)->capture_default_str();
    tb_cmd->add_option("--p-in", tb.p_in)->capture_default_str();
    tb_cmd->add_option("--p-out", tb.p_out)->capture_default_str();
    tb_cmd->callback([&] {
        action = [&] {
            Rng rng(ctx.seed);
            const TwoBlock data = synth_two_block(tb, rng);
            ctx.write("graph.edges", io::serialize_graph(data.graph));
            ctx.write("truth.csv", io::serialize_labels(data.labels));
            json s = ctx.summary("synth two-block");
            s["nodes"] = data.graph.size();
            s["edges"] = data.graph.edges().size();
            s["files"] = {"graph.edges", "truth.csv"};
            ctx.finish(s);
        };
    });
    CallLogParams cl;
    auto* cl_cmd = synth->add_subcommand("call-log", "Community call log with planted churn");
    cl_cmd->add_option("--communities", cl.communities)->capture_default_str();
    cl_cmd->add_option("--community-size", cl.community_size)->capture_default_str();
    cl_cmd->add_option("--churn-communities", cl.churn_communities)->capture_default_str();
    cl_cmd->add_option("--p-in", cl.p_in)->capture_default_str();
    cl_cmd->add_option("--p-out", cl.p_out)->capture_default_str();
    cl_cmd->callback([&] {
        action = [&] {
            Rng rng(ctx.seed);
            const CallLog log = synth_call_log(cl, rng);
            ctx.write("calls.csv", serialize_calls(log.durations));
            ctx.write("churned.csv", io::serialize_labels(log.churned, "indicator"));
            ctx.write("truth.csv", io::serialize_labels(log.truth, "indicator"));
            json s = ctx.summary("synth call-log");
            s["nodes"] = log.truth.size();
            s["files"] = {"calls.csv", "churned.csv", "truth.csv"};
            ctx.finish(s);
        };
    });

    // shift
    std::string graph_file, signal_file, filter_file, spectrum_file;
    std::vector<double> taps_list;
    auto* shift_cmd = app.add_subcommand("shift", "Apply the graph shift A s");
    shift_cmd->add_option("--graph", graph_file)->required();
    shift_cmd->add_option("--signal", signal_file)->required();
    shift_cmd->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphSignal out = graph_shift(g, load_signal(g, signal_file));
            ctx.write("shifted.csv", io::serialize_signal(out.values()));
            json s = ctx.summary("shift");
            s["files"] = {"shifted.csv"};
            ctx.finish(s);
        };
    });

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "Polynomial graph filters");
    filter_cmd->require_subcommand(1);
    auto add_filter_opts = [&](CLI::App* c) {
        c->add_option("--graph", graph_file)->required();
        c->add_option("--filter", filter_file, "Filter JSON");
        c->add_option("--taps", taps_list, "Real taps h0,h1,...")->delimiter(',');
    };
    auto* f_apply = filter_cmd->add_subcommand("apply", "h(A) s");
    add_filter_opts(f_apply);
    f_apply->add_option("--signal", signal_file)->required();
    f_apply->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphFilter f = load_filter(g, filter_file, taps_list);
            const GraphSignal out = apply_filter(g, f, load_signal(g, signal_file));
            ctx.write("filtered.csv", io::serialize_signal(out.values()));
            json s = ctx.summary("filter apply");
            s["degree"] = f.taps.degree();
            s["files"] = {"filtered.csv"};
            ctx.finish(s);
        };
    });
    auto* f_invert = filter_cmd->add_subcommand("invert", "g with g(A) h(A) = I");
    add_filter_opts(f_invert);
    f_invert->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphFilter f = load_filter(g, filter_file, taps_list);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            const GraphFilter inv = invert_filter(f, basis, ctx.tol);
            ctx.write("inverse.json", io::dump(io::filter_to_json(inv)));
            const CMatrix a = g.dense();
            json s = ctx.summary("filter invert");
            s["degree"] = inv.taps.degree();
            s["residual"] = (eval_matrix(inv.taps, a) * eval_matrix(f.taps, a) -
                             CMatrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
            s["files"] = {"inverse.json"};
            ctx.finish(s);
        };
    });
    auto* f_reduce = filter_cmd->add_subcommand("reduce", "h mod m_A");
    add_filter_opts(f_reduce);
    f_reduce->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphFilter f = load_filter(g, filter_file, taps_list);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            const Polynomial m = ctx.jordan.backend == Backend::exact ? to_complex(min_poly_exact(basis)) : min_poly(basis);
            const GraphFilter red = reduce_filter(f, m);
            ctx.write("reduced.json", io::dump(io::filter_to_json(red)));
            json s = ctx.summary("filter reduce");
            s["minimal_polynomial"] = io::polynomial_to_json(m)["coeffs"];
            s["degree"] = red.taps.degree();
            s["files"] = {"reduced.json"};
            ctx.finish(s);
        };
    });
    auto* f_impulse = filter_cmd->add_subcommand("impulse", "Impulse response h(A) delta");
    add_filter_opts(f_impulse);
    f_impulse->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphFilter f = load_filter(g, filter_file, taps_list);
            ctx.write("impulse.csv", io::serialize_signal(impulse_response(g, f).values()));
            json s = ctx.summary("filter impulse");
            s["files"] = {"impulse.csv"};
            ctx.finish(s);
        };
    });

    // gft / igft
    auto* gft_cmd = app.add_subcommand("gft", "Graph Fourier transform F s");
    gft_cmd->add_option("--graph", graph_file)->required();
    gft_cmd->add_option("--signal", signal_file)->required();
    gft_cmd->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            const Spectrum spec = gft(basis, load_signal(g, signal_file));
            ctx.write("spectrum.csv", io::serialize_signal(spec.coeffs));
            json s = ctx.summary("gft");
            s["cond_V"] = basis.cond_v();
            s["files"] = {"spectrum.csv"};
            ctx.finish(s);
        };
    });
    auto* igft_cmd = app.add_subcommand("igft", "Inverse graph Fourier transform V s_hat");
    igft_cmd->add_option("--graph", graph_file)->required();
    igft_cmd->add_option("--spectrum", spectrum_file)->required();
    igft_cmd->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            CVector coeffs = io::read_signal(spectrum_file);
            if (static_cast<std::size_t>(coeffs.size()) != g.size())
                throw ValidationError(spectrum_file + ": spectrum length does not match the graph");
            const GraphSignal out = igft(basis, Spectrum{std::move(coeffs), basis.graph_id()});
            ctx.write("signal.csv", io::serialize_signal(out.values()));
            json s = ctx.summary("igft");
            s["files"] = {"signal.csv"};
            ctx.finish(s);
        };
    });

    // spectral decompose
    auto* spectral_cmd = app.add_subcommand("spectral", "Jordan decomposition");
    spectral_cmd->require_subcommand(1);
    auto* decompose = spectral_cmd->add_subcommand("decompose", "Export the spectral basis as JSON");
    decompose->add_option("--graph", graph_file)->required();
    decompose->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            ctx.write("basis.json", io::dump(io::basis_to_json(basis)));
            json s = ctx.summary("spectral decompose");
            s["distinct_eigenvalues"] = basis.eigenvalues().size();
            s["filter_dimension"] = basis.filter_dimension();
            s["diagonalizable"] = basis.is_diagonalizable();
            s["cond_V"] = basis.cond_v();
            s["files"] = {"basis.json"};
            ctx.finish(s);
        };
    });

    // lp
    auto* lp_cmd = app.add_subcommand("lp", "Linear-prediction coding");
    lp_cmd->require_subcommand(1);
    std::size_t lp_taps = 3;
    unsigned lp_bits = 8;
    std::string code_file, taps_range = "2..10", bits_range = "1..16";
    std::vector<std::string> signal_files;
    auto* lp_fit_cmd = lp_cmd->add_subcommand("fit", "Fit prediction taps");
    lp_fit_cmd->add_option("--graph", graph_file)->required();
    lp_fit_cmd->add_option("--signal", signal_file)->required();
    lp_fit_cmd->add_option("--taps", lp_taps, "Tap count L (2..10)")->capture_default_str();
    lp_fit_cmd->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphSignal sig = load_signal(g, signal_file);
            const GraphFilter f = lp_fit(g, sig, lp_taps, ctx.tol);
            const CVector r = lp_residual(g, f, sig).values();
            ctx.write("lp_filter.json", io::dump(io::filter_to_json(f)));
            json s = ctx.summary("lp fit");
            s["taps"] = io::polynomial_to_json(f.taps)["coeffs"];
            s["signal_energy"] = sig.values().squaredNorm();
            s["residual_energy"] = r.squaredNorm();
            s["files"] = {"lp_filter.json"};
            ctx.finish(s);
        };
    });
    auto* lp_enc = lp_cmd->add_subcommand("encode", "Quantize the prediction residual");
    lp_enc->add_option("--graph", graph_file)->required();
    lp_enc->add_option("--filter", filter_file)->required();
    lp_enc->add_option("--signal", signal_file)->required();
    lp_enc->add_option("--bits", lp_bits, "Bits per residual sample (1..16)")->capture_default_str();
    lp_enc->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const GraphFilter f = load_filter(g, filter_file, {});
            const LPCode code = lp_encode(g, f, load_signal(g, signal_file), lp_bits);
            ctx.write("code.lpc", io::serialize_lpcode(code));
            json s = ctx.summary("lp encode");
            s["bits"] = lp_bits;
            s["min"] = code.header.min;
            s["max"] = code.header.max;
            s["files"] = {"code.lpc"};
            ctx.finish(s);
        };
    });
    auto* lp_dec = lp_cmd->add_subcommand("decode", "Reconstruct a signal from an LP code");
    lp_dec->add_option("--graph", graph_file)->required();
    lp_dec->add_option("--code", code_file)->required();
    lp_dec->add_option("--signal", signal_file, "Original signal, to report the reconstruction error");
    lp_dec->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const LPCode code = io::parse_lpcode(io::read_file(code_file));
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            const GraphSignal out = lp_decode(g, code.taps, code, basis, ctx.tol);
            ctx.write("decoded.csv", io::serialize_signal(out.values()));
            json s = ctx.summary("lp decode");
            if (!signal_file.empty()) s["relative_error"] = relative_error(load_signal(g, signal_file).values(), out.values());
            s["files"] = {"decoded.csv"};
            ctx.finish(s);
        };
    });
    auto* lp_sweep = lp_cmd->add_subcommand("sweep", "Reconstruction error over a grid of L and B");
    lp_sweep->add_option("--graph", graph_file)->required();
    lp_sweep->add_option("--signal", signal_files, "One or more signal files")->required();
    lp_sweep->add_option("--taps", taps_range, "Tap counts, e.g. 2..10")->capture_default_str();
    lp_sweep->add_option("--bits", bits_range, "Bit depths, e.g. 1..16")->capture_default_str();
    lp_sweep->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            std::vector<GraphSignal> sigs;
            for (const auto& f : signal_files) sigs.push_back(load_signal(g, f));
            const auto ls = parse_range(taps_range, 2, 10, "--taps");
            const auto bs = parse_range(bits_range, 1, 16, "--bits");
            std::string csv = "L,B,relative_error,mean_snr_db\n";
            for (auto l : ls) {
                std::vector<GraphFilter> fits;
                for (const auto& sg : sigs) fits.push_back(lp_fit(g, sg, l, ctx.tol));
                for (auto b : bs) {
                    double err2 = 0.0, sig2 = 0.0, snr = 0.0;
                    for (std::size_t i = 0; i < sigs.size(); ++i) {
                        const LPCode code = lp_encode(g, fits[i], sigs[i], static_cast<unsigned>(b));
                        const CVector rec = lp_decode(g, fits[i], code, basis, ctx.tol).values();
                        const double e2 = (rec - sigs[i].values()).squaredNorm();
                        const double s2 = sigs[i].values().squaredNorm();
                        err2 += e2;
                        sig2 += s2;
                        snr += 10.0 * std::log10(s2 / std::max(e2, 1e-300));
                    }
                    csv += std::to_string(l) + "," + std::to_string(b) + "," + io::fmt_double(std::sqrt(err2 / sig2)) +
                           "," + io::fmt_double(snr / static_cast<double>(sigs.size())) + "\n";
                }
            }
            ctx.write("lp_sweep.csv", csv);
            json s = ctx.summary("lp sweep");
            s["signals"] = sigs.size();
            s["files"] = {"lp_sweep.csv"};
            ctx.finish(s);
        };
    });

    // compress
    std::size_t keep = 0;
    bool sweep = false;
    auto* compress_cmd = app.add_subcommand("compress", "Keep the C largest GFT coefficients");
    compress_cmd->add_option("--graph", graph_file)->required();
    compress_cmd->add_option("--signal", signal_file)->required();
    compress_cmd->add_option("--keep", keep, "Number of coefficients C");
    compress_cmd->add_flag("--sweep", sweep, "Write relative error for every C = 1..N");
    compress_cmd->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const SpectralBasis basis = jordan_decompose(g, ctx.jordan, ctx.tol);
            const GraphSignal sig = load_signal(g, signal_file);
            json s = ctx.summary("compress");
            if (!suited_for_compression(basis)) {
                std::cerr << "warning: cond(V) = " << basis.cond_v() << " exceeds 1e3; coefficient magnitudes are not comparable\n";
                s["warning"] = "ill-conditioned basis";
            }
            json files = json::array();
            if (sweep) {
                const Spectrum full = gft(basis, sig);
                std::string csv = "C,relative_error\n";
                for (std::size_t c = 1; c <= g.size(); ++c) {
                    const GraphSignal rec = decompress(basis, truncate_spectrum(full, c));
                    csv += std::to_string(c) + "," + io::fmt_double(relative_error(sig.values(), rec.values())) + "\n";
                }
                ctx.write("compress_sweep.csv", csv);
                files.push_back("compress_sweep.csv");
            }
            if (keep > 0) {
                const Spectrum sp = compress(basis, sig, keep);
                const GraphSignal rec = decompress(basis, sp);
                ctx.write("compressed_spectrum.csv", io::serialize_signal(sp.coeffs));
                ctx.write("reconstructed.csv", io::serialize_signal(rec.values()));
                files.push_back("compressed_spectrum.csv");
                files.push_back("reconstructed.csv");
                s["keep"] = keep;
                s["relative_error"] = relative_error(sig.values(), rec.values());
            }
            if (!sweep && keep == 0) throw ValidationError("compress: give --keep C and/or --sweep");
            s["files"] = files;
            ctx.finish(s);
        };
    });

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Adaptive-filter label propagation");
    classify_cmd->require_subcommand(1);
    std::string labels_file, train_labels_file, truth_file, classifier_file, strategy = "random";
    double seed_fraction = 0.05;
    std::size_t stages = 10;
    auto* cl_train = classify_cmd->add_subcommand("train", "Train classification stages");
    cl_train->add_option("--graph", graph_file)->required();
    cl_train->add_option("--labels", labels_file, "Known labels CSV node_id,label");
    cl_train->add_option("--train-labels", train_labels_file, "Training subset t (default: seeded half of each class)");
    cl_train->add_option("--truth", truth_file, "Ground-truth labels; seeds are drawn from it");
    cl_train->add_option("--seed-fraction", seed_fraction, "Fraction of nodes revealed with --truth")->capture_default_str();
    cl_train->add_option("--strategy", strategy, "Seed selection with --truth: random | most-links")->capture_default_str();
    cl_train->add_option("--stages", stages, "Stage count P")->capture_default_str();
    cl_train->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            Rng rng(ctx.seed);
            json s = ctx.summary("classify train");
            std::vector<int> truth;
            GraphSignal known;
            if (!truth_file.empty()) {
                if (!labels_file.empty()) throw ValidationError("classify train: give --labels or --truth, not both");
                truth = io::parse_labels(io::read_file(truth_file), g.size(), {-1, 0, 1}, truth_file);
                SeedStrategy st;
                if (strategy == "random") st = SeedStrategy::random;
                else if (strategy == "most-links") st = SeedStrategy::most_links;
                else throw ValidationError("--strategy must be 'random' or 'most-links'");
                known = select_seeds(g, truth, seed_fraction, st, rng);
            } else if (!labels_file.empty()) {
                known = GraphSignal(g, io::labels_to_signal(io::parse_labels(io::read_file(labels_file), g.size(), {-1, 0, 1}, labels_file)));
            } else {
                throw ValidationError("classify train: --labels or --truth is required");
            }
            const GraphSignal t = train_labels_file.empty()
                                      ? split_training_labels(known, rng)
                                      : GraphSignal(g, io::labels_to_signal(io::parse_labels(
                                                           io::read_file(train_labels_file), g.size(), {-1, 0, 1}, train_labels_file)));
            const ClassifierFilter cf = train_classifier(g, t, known, stages);
            ctx.write("classifier.json", io::dump(io::classifier_to_json(cf)));
            std::vector<int> known_int, pred_int;
            const GraphSignal pred = classify(g, cf, known);
            for (std::size_t n = 0; n < g.size(); ++n) {
                known_int.push_back(static_cast<int>(known[n].real()));
                pred_int.push_back(static_cast<int>(pred[n].real()));
            }
            ctx.write("known.csv", io::serialize_labels(known_int));
            ctx.write("predicted.csv", io::serialize_labels(pred_int));
            s["stages"] = cf.stages;
            s["training_errors"] = cf.stage_errors;
            if (!truth.empty()) {
                std::size_t held = 0, correct = 0;
                for (std::size_t n = 0; n < g.size(); ++n)
                    if (known_int[n] == 0) {
                        ++held;
                        correct += pred_int[n] == truth[n];
                    }
                s["heldout_accuracy"] = held ? static_cast<double>(correct) / static_cast<double>(held) : 1.0;
            }
            s["files"] = {"classifier.json", "known.csv", "predicted.csv"};
            ctx.finish(s);
        };
    });
    auto* cl_apply = classify_cmd->add_subcommand("apply", "Apply trained stages to known labels");
    cl_apply->add_option("--graph", graph_file)->required();
    cl_apply->add_option("--classifier", classifier_file)->required();
    cl_apply->add_option("--labels", labels_file)->required();
    cl_apply->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const ClassifierFilter cf = io::classifier_from_json(io::parse_json(io::read_file(classifier_file), classifier_file));
            const GraphSignal known(g, io::labels_to_signal(io::parse_labels(io::read_file(labels_file), g.size(), {-1, 0, 1}, labels_file)));
            const GraphSignal pred = classify(g, cf, known);
            std::vector<int> out;
            for (std::size_t n = 0; n < g.size(); ++n) out.push_back(static_cast<int>(pred[n].real()));
            ctx.write("predicted.csv", io::serialize_labels(out));
            json s = ctx.summary("classify apply");
            s["undecided"] = std::count(out.begin(), out.end(), 0);
            s["files"] = {"predicted.csv"};
            ctx.finish(s);
        };
    });

    // churn
    auto* churn_cmd = app.add_subcommand("churn", "Churn prediction on a normalized call graph");
    churn_cmd->require_subcommand(1);
    std::string churned_file;
    double train_fraction = 0.5;
    auto* ch_train = churn_cmd->add_subcommand("train", "Train stages against known outcomes");
    ch_train->add_option("--graph", graph_file)->required();
    ch_train->add_option("--churned", churned_file, "Observed churn indicators node_id,indicator")->required();
    ch_train->add_option("--truth", truth_file, "Outcome indicators node_id,indicator")->required();
    ch_train->add_option("--train-fraction", train_fraction, "Fraction of nodes whose outcome is used for training")
        ->capture_default_str();
    ch_train->add_option("--stages", stages)->capture_default_str();
    ch_train->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            if (!is_row_normalized(g)) std::cerr << "warning: graph rows do not sum to 1 (not a normalized call graph)\n";
            const auto churned = io::parse_labels(io::read_file(churned_file), g.size(), {0, 1}, churned_file);
            const auto truth = io::parse_labels(io::read_file(truth_file), g.size(), {0, 1}, truth_file);
            Rng rng(ctx.seed);
            std::vector<bool> mask(g.size());
            for (std::size_t n = 0; n < g.size(); ++n) mask[n] = rng.uniform() < train_fraction;
            const GraphSignal s0(g, io::labels_to_signal(churned));
            const ClassifierFilter cf = train_churn(g, s0, truth, mask, stages, ctx.tol);
            const ChurnPrediction pred = predict_churn(g, cf, s0, ctx.tol);
            std::size_t test = 0, correct = 0, positives = 0;
            for (std::size_t n = 0; n < g.size(); ++n)
                if (!mask[n]) {
                    ++test;
                    correct += pred.churn[n] == (truth[n] != 0);
                    positives += truth[n] != 0;
                }
            ctx.write("classifier.json", io::dump(io::classifier_to_json(cf)));
            json s = ctx.summary("churn train");
            s["stages"] = cf.stages;
            s["training_errors"] = cf.stage_errors;
            s["heldout_nodes"] = test;
            s["heldout_accuracy"] = test ? static_cast<double>(correct) / static_cast<double>(test) : 1.0;
            s["majority_baseline"] =
                test ? static_cast<double>(std::max(positives, test - positives)) / static_cast<double>(test) : 1.0;
            s["files"] = {"classifier.json"};
            ctx.finish(s);
        };
    });
    auto* ch_pred = churn_cmd->add_subcommand("predict", "Predict churn from observed indicators");
    ch_pred->add_option("--graph", graph_file)->required();
    ch_pred->add_option("--classifier", classifier_file)->required();
    ch_pred->add_option("--churned", churned_file)->required();
    ch_pred->callback([&] {
        action = [&] {
            const Graph g = io::read_graph(graph_file);
            const ClassifierFilter cf = io::classifier_from_json(io::parse_json(io::read_file(classifier_file), classifier_file));
            const auto churned = io::parse_labels(io::read_file(churned_file), g.size(), {0, 1}, churned_file);
            const ChurnPrediction pred = predict_churn(g, cf, GraphSignal(g, io::labels_to_signal(churned)), ctx.tol);
            if (!pred.graph_normalized) std::cerr << "warning: graph rows do not sum to 1 (not a normalized call graph)\n";
            std::string csv = "node_id,score,churn\n";
            std::size_t count = 0;
            for (std::size_t n = 0; n < g.size(); ++n) {
                csv += std::to_string(n) + "," + io::fmt_double(pred.scores[n].real()) + "," + (pred.churn[n] ? "1" : "0") + "\n";
                count += pred.churn[n];
            }
            ctx.write("churn_predictions.csv", csv);
            json s = ctx.summary("churn predict");
            s["predicted_churners"] = count;
            s["files"] = {"churn_predictions.csv"};
            ctx.finish(s);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        ctx.prepare();
        if (action) action();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
