#include "bpnum/csv.hpp"

#include <cstdio>
#include <ostream>

namespace bpnum {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Manifest::add(std::string key, std::string value)
{
    entries_.emplace_back(std::move(key), std::move(value));
}

std::string Manifest::header() const
{
    std::string s;
    for (const auto& [k, v] : entries_)
        s += "# " + k + "=" + v + "\n";
    return s;
}

std::map<std::string, std::string> parse_key_values(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    std::map<std::string, std::string> kv;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (!line.empty() && line.front() == '#')
            line = trim(line.substr(1));
        auto eq = line.find('=');
        if (line.empty() || eq == std::string_view::npos || eq == 0)
            continue;
        auto key = trim(line.substr(0, eq));
        if (key.find_first_of(" ,\t") != std::string_view::npos)
            continue;
        kv[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return kv;
}

void write_limits_csv(std::ostream& out, std::span<const FpFormat> formats)
{
    out << "technique,format,llr_limit\n";
    for (Technique t : kAllTechniques)
        for (const FpFormat& f : formats)
            out << to_string(t) << ',' << f.name() << ',' << llr_limit(t, f).to_string(17) << '\n';
}

void write_fer_header(std::ostream& out)
{
    out << "ebn0_db,frames,frame_errors,bit_errors,fer,ber,ci95,avg_iters,undetected\n";
}

void write_fer_row(std::ostream& out, const FerPoint& p)
{
    out << format_double(p.ebn0_db) << ',' << p.frames << ',' << p.frame_errors << ','
        << p.bit_errors << ',' << format_double(p.fer) << ',' << format_double(p.ber) << ','
        << format_double(p.ci95_halfwidth) << ',' << format_double(p.avg_iterations) << ','
        << p.undetected_errors << '\n';
}

void write_fer_csv(std::ostream& out, std::span<const FerPoint> points)
{
    write_fer_header(out);
    for (const auto& p : points)
        write_fer_row(out, p);
}

void write_cn_noise_csv(std::ostream& out, std::span<const CnNoisePoint> points)
{
    out << "m_lambda,kernel,rms_error,samples\n";
    for (const auto& p : points) {
        const bool quote = p.kernel.find(',') != std::string::npos;
        out << format_double(p.m_lambda) << ',' << (quote ? "\"" : "") << p.kernel
            << (quote ? "\"" : "") << ',' << format_double(p.rms_error) << ',' << p.samples << '\n';
    }
}

void write_resolution_csv(std::ostream& out, std::span<const ResolutionPoint> points)
{
    out << "lambda,domain,step_llr\n";
    for (const auto& p : points)
        out << format_double(p.lambda) << ',' << to_string(p.domain) << ','
            << format_double(p.step_llr) << '\n';
}

void write_accuracy_csv(std::ostream& out, std::span<const AccuracyPoint> points)
{
    out << "x,variant,bits\n";
    for (const auto& p : points)
        out << format_double(p.x) << ',' << to_string(p.variant) << ',' << format_double(p.bits)
            << '\n';
}

} // namespace bpnum
