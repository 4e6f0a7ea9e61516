#pragma once

// CSV output with a leading "# key=value" manifest, and the matching reader
// used to re-run a command from a previous output file.

#include "bpnum/fp_analysis.hpp"
#include "bpnum/montecarlo.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bpnum {

/// %.17g, which round-trips every double.
std::string format_double(double v);

class Manifest {
public:
    void add(std::string key, std::string value);
    void add(std::string key, double value) { add(std::move(key), format_double(value)); }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    /// One "# key=value" line per entry, in insertion order.
    std::string header() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Reads "key=value" and "# key=value" lines; blank lines, other comments
/// and lines without '=' (such as CSV rows) are skipped. Later keys win.
std::map<std::string, std::string> parse_key_values(std::string_view text);

void write_limits_csv(std::ostream& out, std::span<const FpFormat> formats);
void write_fer_csv(std::ostream& out, std::span<const FerPoint> points);
void write_fer_header(std::ostream& out);
void write_fer_row(std::ostream& out, const FerPoint& p);
void write_cn_noise_csv(std::ostream& out, std::span<const CnNoisePoint> points);
void write_resolution_csv(std::ostream& out, std::span<const ResolutionPoint> points);
void write_accuracy_csv(std::ostream& out, std::span<const AccuracyPoint> points);

} // namespace bpnum
