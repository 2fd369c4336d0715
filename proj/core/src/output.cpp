#include "gnls/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ctime>
#include <iostream>

#include <json.hpp>

#include "gnls/errors.hpp"

#ifndef GNLS_GIT_DESCRIBE
#define GNLS_GIT_DESCRIBE "unknown"
#endif

namespace gnls {

using nlohmann::json;

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("row width " + std::to_string(row.size()) + " in table '" + name + "' with " +
                                    std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string cell_text(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_real(*d);
    if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_real(*d);
    }
    if (const long long* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + csv_field(t.columns[j].name);
    out += "\r\n";
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) out += (j ? "," : "") + csv_field(cell_text(r[j]));
        out += "\r\n";
    }
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
                else quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

EventLog::EventLog(const std::string& path, bool echo) : out_(path), echo_(echo) {
    if (!out_) throw IoError("cannot open event log '" + path + "'");
}

void EventLog::emit(const std::string& event, const std::vector<std::pair<std::string, Cell>>& fields) {
    json j;
    std::lock_guard<std::mutex> lock(mu_);
    j["seq"] = seq_++;
    j["time"] = utc_now();
    j["event"] = event;
    for (const auto& [k, v] : fields) j[k] = cell_json(v);
    const std::string line = j.dump();
    if (out_.is_open()) out_ << line << '\n' << std::flush;
    if (echo_) std::cerr << line << '\n';
}

const char* build_git_describe() { return GNLS_GIT_DESCRIBE; }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_results(const ResultRecord& rec, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
    auto put = [&](const std::string& name, const std::string& body) {
        const fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write '" + p.string() + "'");
        out << body;
        if (!out) throw IoError("write failed for '" + p.string() + "'");
    };
    json meta;
    meta["schema_version"] = rec.schema_version;
    meta["git_describe"] = rec.git_describe;
    meta["started"] = rec.started;
    meta["finished"] = rec.finished;
    meta["experiment"] = to_string(rec.config.experiment);
    meta["config"] = format_config(rec.config);
    meta["warnings"] = rec.warnings;
    meta["rows_total"] = rec.rows_total;
    meta["rows_failed"] = rec.rows_failed;
    json tables = json::array();
    for (const Table& t : rec.tables) {
        json cols = json::array();
        for (const Column& c : t.columns) cols.push_back({{"name", c.name}, {"meaning", c.meaning}});
        tables.push_back({{"file", t.name + ".csv"}, {"rows", t.rows.size()}, {"columns", cols}});
        put(t.name + ".csv", to_csv(t));
    }
    meta["tables"] = tables;
    put("config.ini", format_config(rec.config));
    put("record.json", meta.dump(2) + "\n");
}

}  // namespace gnls
