// bpnum: command-line front end. Every subcommand writes CSV preceded by a
// "# key=value" manifest; `--config <file>` replays such a manifest.
//
// Exit codes: 0 success, 2 invalid input, 3 NaN produced at run time.

#include "bpnum/channel.hpp"
#include "bpnum/csv.hpp"
#include "bpnum/decoder.hpp"
#include "bpnum/fp_analysis.hpp"
#include "bpnum/graph.hpp"
#include "bpnum/kernels.hpp"
#include "bpnum/montecarlo.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace bpnum;

constexpr int kExitInvalid = 2;
constexpr int kExitNan = 3;

struct NanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text, const std::string& what)
{
    std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw std::invalid_argument(what + ": '" + t + "' is not a number");
    return v;
}

std::vector<std::string> split(std::string_view text, std::string_view separators)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find_first_of(separators, pos);
        if (next == std::string_view::npos)
            next = text.size();
        auto piece = trim(text.substr(pos, next - pos));
        if (!piece.empty())
            parts.push_back(piece);
        pos = next + 1;
    }
    return parts;
}

std::vector<double> parse_numbers(std::string_view text, const std::string& what)
{
    std::vector<double> out;
    for (const auto& p : split(text, ", \t\r\n"))
        out.push_back(parse_number(p, what));
    if (out.empty())
        throw std::invalid_argument(what + ": empty list");
    return out;
}

std::string join_numbers(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_double(v[i]);
    return s;
}

// Splits a list of kernel names on commas outside parentheses.
std::vector<std::string> split_kernels(std::string_view text)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::optional<double> parse_clip(const std::string& text)
{
    if (text.empty() || text == "none")
        return std::nullopt;
    double c = parse_number(text, "clip");
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("clip must be positive");
    return c;
}

unsigned default_workers()
{
    if (const char* env = std::getenv("BPNUM_WORKERS")) {
        double w = parse_number(env, "BPNUM_WORKERS");
        if (!(w >= 1.0) || w != std::floor(w))
            throw std::invalid_argument("BPNUM_WORKERS must be a positive integer");
        return static_cast<unsigned>(w);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Manifest base_manifest(const std::string& subcommand)
{
    Manifest m;
    m.add("subcommand", subcommand);
    m.add("version", std::string(BPNUM_VERSION));
    return m;
}

// ---------------------------------------------------------------------------

struct Common {
    std::string out;
    std::string config;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--out,-o", c.out, "Output file (default: standard output)");
    sub->add_option("--config", c.config, "Replay options from a key=value file or earlier output");
}

struct LimitsOpts {
    std::string formats = "binary32,binary64,binary128";
};

std::string run_limits(const LimitsOpts& o)
{
    std::vector<FpFormat> formats;
    for (const auto& name : split(o.formats, ","))
        formats.push_back(format_by_name(name));
    if (formats.empty())
        throw std::invalid_argument("formats: empty list");
    std::string names;
    for (std::size_t i = 0; i < formats.size(); ++i)
        names += (i ? "," : "") + formats[i].name();
    Manifest m = base_manifest("limits");
    m.add("formats", names);
    std::ostringstream s;
    s << m.header();
    write_limits_csv(s, formats);
    return s.str();
}

struct PhiOpts {
    double lo = 0.01;
    double hi = 40.0;
    int per_decade = 512;
    double window = 0.25;
    std::string x;
    std::string format = "binary64";
};

std::string run_phi_accuracy(const PhiOpts& o)
{
    const FpFormat& fmt = format_by_name(o.format);
    std::vector<double> grid;
    Manifest m = base_manifest("phi-accuracy");
    if (!o.x.empty()) {
        grid = parse_numbers(o.x, "x");
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
                throw std::invalid_argument("x: grid must be positive and strictly increasing");
        m.add("x", join_numbers(grid));
    } else {
        grid = log_grid(o.lo, o.hi, o.per_decade);
        m.add("lo", o.lo);
        m.add("hi", o.hi);
        m.add("per-decade", std::to_string(o.per_decade));
    }
    if (!(o.window >= 0.0))
        throw std::invalid_argument("window must be non-negative");
    m.add("window", o.window);
    m.add("format", fmt.name());

    auto phi0 = accuracy_sweep(PhiVariant::Phi0, grid, fmt);
    auto phi1 = accuracy_sweep(PhiVariant::Phi1, grid, fmt);
    auto phi2 = accuracy_sweep(PhiVariant::Phi2, grid, fmt);

    std::ostringstream s;
    s << m.header();
    std::vector<AccuracyPoint> all;
    for (const auto* c : {&phi0, &phi1, &phi2})
        all.insert(all.end(), c->begin(), c->end());
    write_accuracy_csv(s, all);
    for (const auto* series : {&phi1, &phi2}) {
        auto cross = find_crossover(phi0, *series, o.window);
        s << "# crossover variant=" << to_string(series->front().variant);
        if (cross)
            s << " x=" << format_double(cross->x) << " bits=" << format_double(cross->bits) << '\n';
        else
            s << " none\n";
    }
    return s.str();
}

struct ResolutionOpts {
    std::string domains = "LLR,LR,LD,GIT2,OLD";
    double lo = 1.0;
    std::string hi;
    int per_decade = 64;
};

std::string run_resolution(const ResolutionOpts& o)
{
    Manifest m = base_manifest("resolution");
    std::vector<Domain> domains;
    std::string names;
    for (const auto& d : split(o.domains, ",")) {
        domains.push_back(parse_domain(d));
        names += (names.empty() ? "" : ",") + d;
    }
    if (domains.empty())
        throw std::invalid_argument("domains: empty list");
    std::optional<double> hi;
    if (!o.hi.empty() && o.hi != "auto")
        hi = parse_number(o.hi, "hi");
    m.add("domains", names);
    m.add("lo", o.lo);
    m.add("hi", hi ? format_double(*hi) : std::string("auto"));
    m.add("per-decade", std::to_string(o.per_decade));

    std::vector<ResolutionPoint> all;
    for (Domain d : domains) {
        double top = hi.value_or(0.0);
        if (!hi) {
            // Stay just inside the domain's representable range, and within
            // the span where every domain is defined.
            const auto limit = static_cast<double>(llr_limit(limiting_technique(d), binary64()).value());
            top = std::min(745.0, limit * (1.0 - 1e-6));
        }
        auto grid = log_grid(o.lo, top, o.per_decade);
        auto pts = resolution_profile(d, grid);
        all.insert(all.end(), pts.begin(), pts.end());
    }
    std::ostringstream s;
    s << m.header();
    write_resolution_csv(s, all);
    return s.str();
}

struct CnNoiseOpts {
    std::string kernels = "PAIRWISE_EXACT,PAIRWISE_RICHTER,MSA,MSA_NORMALIZED,MSA_OFFSET,TANH,GIT2,LR,LD,OLD";
    std::string m = "1,2,4,8,16,30,40";
    int degree = 4;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
};

std::string run_cn_noise(const CnNoiseOpts& o)
{
    std::vector<KernelKind> kernels;
    std::string names;
    for (const auto& k : split_kernels(o.kernels)) {
        kernels.push_back(parse_kernel(k));
        names += (names.empty() ? "" : ",") + to_string(kernels.back());
    }
    auto grid = parse_numbers(o.m, "m");
    Manifest m = base_manifest("cn-noise");
    m.add("kernels", names);
    m.add("m", join_numbers(grid));
    m.add("degree", std::to_string(o.degree));
    m.add("samples", std::to_string(o.samples));
    m.add("seed", std::to_string(o.seed));

    auto pts = cn_noise_experiment(kernels, grid, o.degree, o.samples, o.seed);
    std::ostringstream s;
    s << m.header();
    write_cn_noise_csv(s, pts);
    for (const auto& p : pts)
        if (std::isnan(p.rms_error))
            throw NanError("cn-noise: kernel " + p.kernel + " produced NaN\n" + s.str());
    return s.str();
}

struct DecodeOpts {
    std::string alist;
    std::string kernel = "PAIRWISE_EXACT";
    int max_iters = 200;
    std::string clip = "none";
};

DecoderConfig decoder_config(const DecodeOpts& o)
{
    DecoderConfig cfg;
    cfg.kernel = parse_kernel(o.kernel);
    cfg.max_iters = o.max_iters;
    cfg.clip = parse_clip(o.clip);
    cfg.validate();
    return cfg;
}

void add_decoder_manifest(Manifest& m, const DecodeOpts& o, const DecoderConfig& cfg)
{
    m.add("alist", o.alist);
    m.add("kernel", to_string(cfg.kernel));
    m.add("max-iters", std::to_string(cfg.max_iters));
    m.add("clip", cfg.clip ? format_double(*cfg.clip) : std::string("none"));
}

struct FerOpts {
    DecodeOpts dec;
    std::string ebn0 = "1.0,1.5,2.0";
    std::uint64_t min_errors = 100;
    std::uint64_t max_frames = 10'000'000;
    std::string rate = "auto";
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

std::string run_fer(const FerOpts& o)
{
    if (o.dec.alist.empty())
        throw std::invalid_argument("--alist is required");
    const TannerGraph g = read_alist(o.dec.alist);
    SweepConfig sc;
    sc.decoder = decoder_config(o.dec);
    sc.ebn0_db = parse_numbers(o.ebn0, "ebn0");
    sc.stop = {o.min_errors, o.max_frames};
    sc.master_seed = o.seed;
    sc.workers = o.workers ? o.workers : default_workers();
    if (o.rate != "auto")
        sc.rate = parse_number(o.rate, "rate");

    Manifest m = base_manifest("fer");
    add_decoder_manifest(m, o.dec, sc.decoder);
    m.add("ebn0", join_numbers(sc.ebn0_db));
    m.add("min-errors", std::to_string(o.min_errors));
    m.add("max-frames", std::to_string(o.max_frames));
    m.add("rate", sc.rate ? format_double(*sc.rate) : std::string("auto"));
    m.add("seed", std::to_string(o.seed));

    auto pts = run_sweep(g, sc);
    std::ostringstream s;
    s << m.header();
    write_fer_csv(s, pts);
    for (const auto& p : pts)
        if (p.nan_frames)
            throw NanError("fer: " + std::to_string(p.nan_frames) + " frame(s) at " +
                           format_double(p.ebn0_db) + " dB produced NaN\n" + s.str());
    return s.str();
}

struct DecodeOneOpts {
    DecodeOpts dec;
    std::string llrs;
};

std::string run_decode_one(const DecodeOneOpts& o)
{
    if (o.dec.alist.empty())
        throw std::invalid_argument("--alist is required");
    if (o.llrs.empty())
        throw std::invalid_argument("--llrs is required");
    const TannerGraph g = read_alist(o.dec.alist);
    const DecoderConfig cfg = decoder_config(o.dec);
    std::vector<double> llrs;
    std::error_code ec;
    if (std::filesystem::is_regular_file(o.llrs, ec))
        llrs = parse_numbers(read_file(o.llrs), "llrs");
    else
        llrs = parse_numbers(o.llrs, "llrs");

    Manifest m = base_manifest("decode-one");
    add_decoder_manifest(m, o.dec, cfg);
    m.add("llrs", o.llrs);

    const DecodeResult r = decode(g, llrs, cfg);
    std::ostringstream s;
    s << m.header();
    s << "converged,iterations,max_abs_llr,rescales,hybrid_switched,bits,posterior\n";
    s << (r.converged ? 1 : 0) << ',' << r.iterations_used << ',' << format_double(r.max_abs_llr_seen)
      << ',' << r.rescale_events << ',' << (r.hybrid_switched ? 1 : 0) << ',';
    for (auto b : r.hard_bits)
        s << static_cast<int>(b);
    s << ',';
    for (std::size_t i = 0; i < r.posterior.size(); ++i)
        s << (i ? ";" : "") << format_double(r.posterior[i]);
    s << '\n';
    if (r.nan_detected)
        throw NanError("decode-one: NaN at iteration " + std::to_string(r.iterations_used) + "\n" +
                       s.str());
    return s.str();
}

struct GenOpts {
    std::size_t n = 1008;
    std::size_t dv = 3;
    std::size_t dc = 6;
    std::uint64_t seed = 1;
    int girth = 6;
};

std::string run_gen_regular(const GenOpts& o)
{
    Manifest m = base_manifest("gen-regular");
    m.add("n", std::to_string(o.n));
    m.add("dv", std::to_string(o.dv));
    m.add("dc", std::to_string(o.dc));
    m.add("seed", std::to_string(o.seed));
    m.add("girth", std::to_string(o.girth));
    auto g = generate_regular(o.n, o.dv, o.dc, o.seed, o.girth);
    return m.header() + write_alist(g);
}

// ---------------------------------------------------------------------------

// Expands `--config FILE` into explicit options placed before the user's
// own, so that anything given on the command line wins.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    if (args.size() < 2 || args[1].starts_with("-"))
        return args;
    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].starts_with("--config="))
            path = args[i].substr(9);
    }
    if (path.empty())
        return args;
    auto kv = parse_key_values(read_file(path));
    if (auto it = kv.find("subcommand"); it != kv.end() && it->second != args[1])
        throw std::invalid_argument("config file is for subcommand '" + it->second + "', not '" +
                                    args[1] + "'");
    std::vector<std::string> out{args[0], args[1]};
    for (const auto& [k, v] : kv)
        if (k != "subcommand" && k != "version")
            out.push_back("--" + k + "=" + v);
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::invalid_argument("cannot write '" + c.out + "'");
    f << text;
    if (!f.flush())
        throw std::runtime_error("write to '" + c.out + "' failed");
}

int run(int argc, char** argv)
{
    CLI::App app{"Numerical analysis and simulation of belief-propagation LDPC decoding"};
    app.set_version_flag("--version", std::string(BPNUM_VERSION));
    app.require_subcommand(1);

    Common common;
    std::string text;

    LimitsOpts limits;
    auto* s_limits = app.add_subcommand("limits", "LLR range limit of each check-node technique");
    add_common(s_limits, common);
    s_limits->add_option("--formats", limits.formats, "Comma list of binary32, binary64, binary128");
    s_limits->callback([&] { text = run_limits(limits); });

    PhiOpts phi;
    auto* s_phi = app.add_subcommand("phi-accuracy", "Significant bits of the Phi evaluations");
    add_common(s_phi, common);
    s_phi->add_option("--lo", phi.lo, "Smallest x of the log grid");
    s_phi->add_option("--hi", phi.hi, "Largest x of the log grid");
    s_phi->add_option("--per-decade", phi.per_decade, "Grid points per decade");
    s_phi->add_option("--x", phi.x, "Explicit comma list of x values (overrides the log grid)");
    s_phi->add_option("--window", phi.window, "Width of the lower-envelope window");
    s_phi->add_option("--format", phi.format, "Format whose precision caps the bit count");
    s_phi->callback([&] { text = run_phi_accuracy(phi); });

    ResolutionOpts res;
    auto* s_res = app.add_subcommand("resolution", "Quantization step in LLR units per domain");
    add_common(s_res, common);
    s_res->add_option("--domains", res.domains, "Comma list of LLR, LR, LD, GIT2, OLD");
    s_res->add_option("--lo", res.lo, "Smallest lambda");
    s_res->add_option("--hi", res.hi, "Largest lambda, or auto");
    s_res->add_option("--per-decade", res.per_decade, "Grid points per decade");
    s_res->callback([&] { text = run_resolution(res); });

    CnNoiseOpts cn;
    auto* s_cn = app.add_subcommand("cn-noise", "RMS check-node error against an exact reference");
    add_common(s_cn, common);
    s_cn->add_option("--kernels", cn.kernels, "Comma list of kernels");
    s_cn->add_option("--m", cn.m, "Comma list of mean input LLRs");
    s_cn->add_option("--degree", cn.degree, "Inputs per check");
    s_cn->add_option("--samples", cn.samples, "Draws per grid point");
    s_cn->add_option("--seed", cn.seed, "Master seed");
    s_cn->callback([&] { text = run_cn_noise(cn); });

    auto add_decoder_opts = [](CLI::App* sub, DecodeOpts& d) {
        sub->add_option("--alist", d.alist, "Parity-check matrix in alist format");
        sub->add_option("--kernel", d.kernel, "Check-node kernel");
        sub->add_option("--max-iters", d.max_iters, "Iteration cap");
        sub->add_option("--clip", d.clip, "Message magnitude limit, or none");
    };

    FerOpts fer;
    auto* s_fer = app.add_subcommand("fer", "Frame error rate sweep over Eb/N0");
    add_common(s_fer, common);
    add_decoder_opts(s_fer, fer.dec);
    s_fer->add_option("--ebn0", fer.ebn0, "Comma list of Eb/N0 values in dB");
    s_fer->add_option("--min-errors", fer.min_errors, "Stop a point after this many frame errors");
    s_fer->add_option("--max-frames", fer.max_frames, "Stop a point after this many frames");
    s_fer->add_option("--rate", fer.rate, "Code rate, or auto for the design rate");
    s_fer->add_option("--seed", fer.seed, "Master seed");
    s_fer->add_option("--workers", fer.workers, "Worker threads (default: $BPNUM_WORKERS or all cores)");
    s_fer->callback([&] { text = run_fer(fer); });

    DecodeOneOpts one;
    auto* s_one = app.add_subcommand("decode-one", "Decode one vector of channel LLRs");
    add_common(s_one, common);
    add_decoder_opts(s_one, one.dec);
    s_one->add_option("--llrs", one.llrs, "Comma list of channel LLRs, or a file of them");
    s_one->callback([&] { text = run_decode_one(one); });

    GenOpts gen;
    auto* s_gen = app.add_subcommand("gen-regular", "Random regular LDPC code in alist format");
    add_common(s_gen, common);
    s_gen->add_option("--n", gen.n, "Code length");
    s_gen->add_option("--dv", gen.dv, "Variable degree");
    s_gen->add_option("--dc", gen.dc, "Check degree");
    s_gen->add_option("--seed", gen.seed, "Construction seed");
    s_gen->add_option("--girth", gen.girth, "6 rejects 4-cycles, 4 only duplicate edges");
    s_gen->callback([&] { text = run_gen_regular(gen); });

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    std::vector<const char*> cargs;
    for (const auto& a : args)
        cargs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    } catch (const NanError& e) {
        std::string what = e.what();
        auto nl = what.find('\n');
        std::cerr << "error: " << what.substr(0, nl) << '\n';
        try {
            emit(common, what.substr(nl + 1));
        } catch (const std::exception& w) {
            std::cerr << "error: " << w.what() << '\n';
        }
        return kExitNan;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        emit(common, text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    return run(argc, argv);
}
