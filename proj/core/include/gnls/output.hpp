#pragma once

#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gnls/config.hpp"

namespace gnls {

// 17 significant digits: parses back to the same double.
std::string format_real(double x);

struct Column {
    std::string name;
    std::string meaning;  // unit or definition, written to record.json
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);  // throws std::invalid_argument on a width mismatch
};

// RFC 4180: comma separated, CRLF line ends, fields quoted when they contain ',', '"', CR or LF.
std::string csv_field(std::string_view s);
std::string to_csv(const Table& t);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// JSON-lines event log; each line carries a sequence number, the event name and the fields.
class EventLog {
public:
    EventLog() = default;
    explicit EventLog(const std::string& path, bool echo = false);
    void emit(const std::string& event, const std::vector<std::pair<std::string, Cell>>& fields = {});
    bool is_open() const { return out_.is_open(); }

private:
    std::ofstream out_;
    std::mutex mu_;
    long long seq_ = 0;
    bool echo_ = false;
};

struct ResultRecord {
    int schema_version = 1;
    RunConfig config;
    std::string git_describe;
    std::string started;   // UTC, ISO 8601
    std::string finished;
    std::vector<Table> tables;
    std::vector<std::string> warnings;
    int rows_total = 0;   // rows a driver attempted
    int rows_failed = 0;
};

const char* build_git_describe();
std::string utc_now();

// <dir>/<table>.csv for each table, <dir>/config.ini and <dir>/record.json; IoError on failure.
void write_results(const ResultRecord& record, const std::string& dir);

}  // namespace gnls
