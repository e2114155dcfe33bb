#ifndef QTLAB_TOOLS_ARTIFACTS_HPP
#define QTLAB_TOOLS_ARTIFACTS_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "run_config.hpp"

namespace qtlab::cli {

/// Comma-separated, '\n'-terminated, doubles as %.17g.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> columns);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    void separator();

    std::ofstream out_;
    std::string line_;
    bool first_ = true;
};

std::string format_number(double v);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

class InvariantReport {
public:
    explicit InvariantReport(std::string command) : command_(std::move(command)) {}

    /// pass iff value <= threshold; NaN never passes.
    void add(const std::string& name, double value, double threshold);
    const std::vector<CheckResult>& checks() const { return checks_; }
    bool all_pass() const;
    nlohmann::ordered_json to_json(const RunConfig& cfg) const;

private:
    std::string command_;
    std::vector<CheckResult> checks_;
};

nlohmann::ordered_json config_echo(const RunConfig& cfg);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

} // namespace qtlab::cli

#endif
