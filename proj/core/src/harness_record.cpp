#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "mesochaos/harness.hpp"

namespace mesochaos::harness {

namespace {

const char* type_name(ColumnType t) {
    switch (t) {
        case ColumnType::integer: return "int";
        case ColumnType::real: return "real";
        case ColumnType::text: return "text";
    }
    return "text";
}

ColumnType type_from_name(const std::string& s) {
    if (s == "int") return ColumnType::integer;
    if (s == "real") return ColumnType::real;
    if (s == "text") return ColumnType::text;
    throw DomainError("csv: unknown column type '" + s + "'");
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_cell(const Cell& c) {
    if (auto p = std::get_if<std::int64_t>(&c)) return std::to_string(*p);
    if (auto p = std::get_if<double>(&c)) return format_real(*p);
    return quote(std::get<std::string>(c));
}

// Splits one CSV record, honouring quotes; may consume further lines for embedded newlines.
bool read_fields(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    std::string cur;
    bool quoted = false;
    for (;;) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cur += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!quoted) break;
        cur += '\n';
        if (!std::getline(in, line)) throw DomainError("csv: unterminated quoted field");
    }
    fields.push_back(cur);
    return true;
}

Cell parse_cell(const std::string& s, ColumnType t) {
    switch (t) {
        case ColumnType::integer: return static_cast<std::int64_t>(std::stoll(s));
        case ColumnType::real:
            if (s == "nan") return std::nan("");
            if (s == "inf") return HUGE_VAL;
            if (s == "-inf") return -HUGE_VAL;
            return std::stod(s);
        case ColumnType::text: return s;
    }
    return s;
}

nlohmann::json meta_json(const ResultRecord& r) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : r.columns) cols.push_back({{"name", c.name}, {"type", type_name(c.type)}});
    return {{"kind", kind_name(r.spec.kind)},
            {"anchor", anchor(r.spec.kind)},
            {"spec", r.spec.to_json()},
            {"seed", r.spec.seed},
            {"version", r.version},
            {"wall_time", r.wall_time},
            {"columns", cols},
            {"row_count", r.rows.size()},
            {"metadata", r.metadata}};
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::filesystem::path meta_path(const std::filesystem::path& csv) {
    auto m = csv;
    m.replace_extension(".meta.json");
    return m;
}

}  // namespace

std::size_t ResultRecord::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    throw DomainError("record has no column '" + std::string(name) + "'");
}

std::vector<double> ResultRecord::real_column(std::string_view name) const {
    const std::size_t i = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const Cell& c = row.at(i);
        if (auto p = std::get_if<double>(&c)) out.push_back(*p);
        else if (auto q = std::get_if<std::int64_t>(&c)) out.push_back(static_cast<double>(*q));
        else throw DomainError("column '" + std::string(name) + "' is not numeric");
    }
    return out;
}

std::vector<std::string> ResultRecord::text_column(std::string_view name) const {
    const std::size_t i = column_index(name);
    std::vector<std::string> out;
    for (const auto& row : rows) {
        const Cell& c = row.at(i);
        if (auto p = std::get_if<std::string>(&c)) out.push_back(*p);
        else out.push_back(format_cell(c));
    }
    return out;
}

bool ResultRecord::all_ok() const {
    for (const auto& s : text_column("status"))
        if (s != "ok") return false;
    return true;
}

void write_csv(const ResultRecord& record, const std::filesystem::path& csv) {
    std::ostringstream out;
    for (std::size_t i = 0; i < record.columns.size(); ++i) {
        if (i) out << ',';
        out << record.columns[i].name << ':' << type_name(record.columns[i].type);
    }
    out << '\n';
    for (const auto& row : record.rows) {
        if (row.size() != record.columns.size()) throw DomainError("csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_cell(row[i]);
        }
        out << '\n';
    }
    write_atomically(csv, out.str());
    write_atomically(meta_path(csv), meta_json(record).dump(2) + "\n");
}

ResultRecord read_record(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw Error("cannot open " + csv.string());
    ResultRecord r;
    std::vector<std::string> fields;
    if (!read_fields(in, fields)) throw DomainError("csv: empty file");
    for (const auto& f : fields) {
        auto colon = f.rfind(':');
        if (colon == std::string::npos) throw DomainError("csv: header field '" + f + "' lacks a type");
        r.columns.push_back({f.substr(0, colon), type_from_name(f.substr(colon + 1))});
    }
    while (read_fields(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != r.columns.size()) throw DomainError("csv: row width differs from header");
        std::vector<Cell> row;
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_cell(fields[i], r.columns[i].type));
        r.rows.push_back(std::move(row));
    }
    std::ifstream mi(meta_path(csv));
    if (mi) {
        nlohmann::json m = nlohmann::json::parse(mi);
        r.spec = ExperimentSpec::from_json(m.at("spec"));
        r.version = m.value("version", "");
        r.wall_time = m.value("wall_time", 0.0);
        r.metadata = m.value("metadata", nlohmann::json::object());
    }
    return r;
}

OutputFiles write_outputs(const ResultRecord& record, const std::filesystem::path& dir, bool figure) {
    std::filesystem::create_directories(dir);
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    std::string base = kind_name(record.spec.kind) + "-" + stamp;
    std::filesystem::path csv = dir / (base + ".csv");
    for (int k = 1; std::filesystem::exists(csv); ++k) csv = dir / (base + "-" + std::to_string(k) + ".csv");
    OutputFiles files;
    files.csv = csv;
    files.meta = meta_path(csv);
    write_csv(record, csv);
    if (figure && !record.rows.empty()) {
        files.svg = csv;
        files.svg.replace_extension(".svg");
        emit_figure(record, default_style(record.spec.kind), files.svg);
    }
    return files;
}

}  // namespace mesochaos::harness
