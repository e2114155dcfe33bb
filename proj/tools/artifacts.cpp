#include "artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "qtlab/error.hpp"

#ifndef QTLAB_VERSION
#define QTLAB_VERSION "unknown"
#endif

namespace qtlab::cli {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> columns)
    : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw Error("cannot write " + path.string());
    }
    for (const char* c : columns) {
        cell(std::string(c));
    }
    end_row();
}

void CsvWriter::separator() {
    if (!first_) {
        line_ += ',';
    }
    first_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
    separator();
    line_ += format_number(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    separator();
    line_ += std::to_string(v);
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    separator();
    line_ += v;
    return *this;
}

void CsvWriter::end_row() {
    line_ += '\n';
    out_ << line_;
    line_.clear();
    first_ = true;
}

void InvariantReport::add(const std::string& name, double value, double threshold) {
    const bool exists = std::any_of(checks_.begin(), checks_.end(), [&](const CheckResult& c) { return c.name == name; });
    if (exists) {
        throw std::logic_error("duplicate check " + name);
    }
    checks_.push_back({name, value, threshold, std::isfinite(value) && value <= threshold});
}

bool InvariantReport::all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    std::istringstream lines(cfg.canonical());
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        echo[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return echo;
}

nlohmann::ordered_json InvariantReport::to_json(const RunConfig& cfg) const {
    nlohmann::ordered_json doc;
    doc["command"] = command_;
    doc["version"] = QTLAB_VERSION;
    doc["scenario"] = to_string(cfg.scenario);
    doc["config_hash"] = hex_hash(cfg.hash());
    auto& list = doc["checks"] = nlohmann::ordered_json::array();
    Index failed = 0;
    for (const CheckResult& c : checks_) {
        nlohmann::ordered_json entry;
        entry["name"] = c.name;
        entry["value"] = c.value;
        entry["threshold"] = c.threshold;
        entry["pass"] = c.pass;
        list.push_back(std::move(entry));
        failed += c.pass ? 0 : 1;
    }
    doc["passed"] = static_cast<Index>(checks_.size()) - failed;
    doc["failed"] = failed;
    return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

} // namespace qtlab::cli
