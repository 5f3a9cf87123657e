// SPDX-License-Identifier: Apache-2.0
#include "mimopa/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "mimopa/errors.hpp"

namespace mimopa {

namespace {

using json = nlohmann::json;

struct Value {
    enum class Type { String, Integer, Float, Boolean, Array };
    Type type = Type::String;
    std::string str;
    long long integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a # comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            in_string = !in_string;
        } else if (line[i] == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool is_integer_token(const std::string& t) {
    std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (i == t.size()) {
        return false;
    }
    return std::all_of(t.begin() + i, t.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

Value parse_scalar(const std::string& origin, int line, const std::string& token) {
    Value v;
    v.line = line;
    if (token.size() >= 2 && token.front() == '"') {
        if (token.back() != '"' || token.size() < 2) {
            fail(origin, line, "unterminated string " + token);
        }
        v.type = Value::Type::String;
        v.str = token.substr(1, token.size() - 2);
        return v;
    }
    if (token == "true" || token == "false") {
        v.type = Value::Type::Boolean;
        v.boolean = (token == "true");
        return v;
    }
    if (is_integer_token(token)) {
        v.type = Value::Type::Integer;
        v.integer = std::stoll(token);
        return v;
    }
    char* end = nullptr;
    const double d = std::strtod(token.c_str(), &end);
    if (end && *end == '\0' && end != token.c_str()) {
        v.type = Value::Type::Float;
        v.real = d;
        return v;
    }
    fail(origin, line, "cannot parse value '" + token + "'");
}

Value parse_value(const std::string& origin, int line, const std::string& token) {
    if (!token.empty() && token.front() == '[') {
        if (token.back() != ']') {
            fail(origin, line, "unterminated array " + token);
        }
        Value v;
        v.type = Value::Type::Array;
        v.line = line;
        const std::string body = token.substr(1, token.size() - 2);
        std::string item;
        bool in_string = false;
        auto flush = [&]() {
            const std::string t = trim(item);
            if (!t.empty()) {
                v.array.push_back(parse_scalar(origin, line, t));
            } else if (!v.array.empty()) {
                fail(origin, line, "empty array element");
            }
            item.clear();
        };
        for (char c : body) {
            if (c == '"') {
                in_string = !in_string;
            }
            if (c == ',' && !in_string) {
                flush();
            } else {
                item += c;
            }
        }
        flush();
        return v;
    }
    return parse_scalar(origin, line, token);
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& valid) {
    std::string best;
    std::size_t best_dist = std::string::npos;
    for (const auto& v : valid) {
        const std::size_t d = levenshtein(key, v);
        if (d < best_dist) {
            best_dist = d;
            best = v;
        }
    }
    return best;
}

// Parsed document: full key paths ("experiment.kind") to values.
struct Document {
    std::string origin;
    std::map<std::string, Value> entries;

    const Value* find(const std::string& path) const {
        auto it = entries.find(path);
        return it == entries.end() ? nullptr : &it->second;
    }
};

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"", {"schema_version"}},
        {"experiment",
         {"kind", "trials", "seed", "precoders", "allocators", "output", "format"}},
        {"system", {"n_tx", "users", "sigma_n2", "sigma_e2", "e_tr"}},
        {"algorithm", {"mu", "iterations", "es_grid_step", "robust_scale"}},
        {"sweep", {"snr_db"}},
        {"probe", {"theta_steps"}},
    };
    return s;
}

Document parse_document(const std::string& text, const std::string& origin) {
    Document doc;
    doc.origin = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(origin, line_no, "malformed section header " + line);
            }
            section = trim(line.substr(1, line.size() - 2));
            if (schema().find(section) == schema().end() || section.empty()) {
                std::vector<std::string> names;
                for (const auto& [k, _] : schema()) {
                    if (!k.empty()) {
                        names.push_back(k);
                    }
                }
                fail(origin, line_no,
                     "unknown section [" + section + "]; did you mean [" +
                         nearest_key(section, names) + "]?");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(origin, line_no, "expected key = value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string token = trim(line.substr(eq + 1));
        if (key.empty() || token.empty()) {
            fail(origin, line_no, "expected key = value, got '" + line + "'");
        }
        const auto& valid = schema().at(section);
        if (std::find(valid.begin(), valid.end(), key) == valid.end()) {
            const std::string where =
                section.empty() ? "top level" : "[" + section + "]";
            fail(origin, line_no,
                 "unknown key '" + key + "' in " + where + "; did you mean '" +
                     nearest_key(key, valid) + "'?");
        }
        const std::string path = section.empty() ? key : section + "." + key;
        if (doc.entries.count(path)) {
            fail(origin, line_no, "duplicate key '" + path + "'");
        }
        doc.entries.emplace(path, parse_value(origin, line_no, token));
    }
    return doc;
}

// Typed accessors: missing keys fall back to the given default.

double get_float(const Document& doc, const std::string& path, double dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type == Value::Type::Float) {
        return v->real;
    }
    if (v->type == Value::Type::Integer) {
        return static_cast<double>(v->integer);
    }
    fail(doc.origin, v->line, "'" + path + "' must be a number");
}

long long get_int(const Document& doc, const std::string& path, long long dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type != Value::Type::Integer) {
        fail(doc.origin, v->line, "'" + path + "' must be an integer");
    }
    return v->integer;
}

std::string get_string(const Document& doc, const std::string& path,
                       const std::string& dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type != Value::Type::String) {
        fail(doc.origin, v->line, "'" + path + "' must be a quoted string");
    }
    return v->str;
}

std::vector<double> get_float_array(const Document& doc, const std::string& path,
                                    std::vector<double> dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type != Value::Type::Array) {
        fail(doc.origin, v->line, "'" + path + "' must be an array");
    }
    std::vector<double> out;
    for (const Value& e : v->array) {
        if (e.type == Value::Type::Float) {
            out.push_back(e.real);
        } else if (e.type == Value::Type::Integer) {
            out.push_back(static_cast<double>(e.integer));
        } else {
            fail(doc.origin, v->line, "'" + path + "' must contain numbers");
        }
    }
    return out;
}

std::vector<int> get_int_array(const Document& doc, const std::string& path,
                               std::vector<int> dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type != Value::Type::Array) {
        fail(doc.origin, v->line, "'" + path + "' must be an array");
    }
    std::vector<int> out;
    for (const Value& e : v->array) {
        if (e.type != Value::Type::Integer) {
            fail(doc.origin, v->line, "'" + path + "' must contain integers");
        }
        out.push_back(static_cast<int>(e.integer));
    }
    return out;
}

std::vector<std::string> get_string_array(const Document& doc, const std::string& path,
                                          std::vector<std::string> dflt) {
    const Value* v = doc.find(path);
    if (!v) {
        return dflt;
    }
    if (v->type != Value::Type::Array) {
        fail(doc.origin, v->line, "'" + path + "' must be an array");
    }
    std::vector<std::string> out;
    for (const Value& e : v->array) {
        if (e.type != Value::Type::String) {
            fail(doc.origin, v->line, "'" + path + "' must contain quoted strings");
        }
        out.push_back(e.str);
    }
    return out;
}

int value_line(const Document& doc, const std::string& path) {
    const Value* v = doc.find(path);
    return v ? v->line : 0;
}

ExperimentKind parse_kind(const Document& doc) {
    const Value* v = doc.find("experiment.kind");
    if (!v) {
        throw ConfigError(doc.origin + ": missing required key 'kind' in [experiment]");
    }
    if (v->type != Value::Type::String) {
        fail(doc.origin, v->line, "'experiment.kind' must be a quoted string");
    }
    if (v->str == "learning_curve") {
        return ExperimentKind::LEARNING_CURVE;
    }
    if (v->str == "sumrate_sweep") {
        return ExperimentKind::SUMRATE_SWEEP;
    }
    if (v->str == "convexity_probe") {
        return ExperimentKind::CONVEXITY_PROBE;
    }
    fail(doc.origin, v->line,
         "unknown kind '" + v->str +
             "' (expected learning_curve, sumrate_sweep, or convexity_probe)");
}

PrecoderKind parse_precoder(const Document& doc, const std::string& name, int line) {
    if (name == "mf") {
        return PrecoderKind::MF;
    }
    if (name == "zf") {
        return PrecoderKind::ZF;
    }
    if (name == "mmse") {
        return PrecoderKind::MMSE;
    }
    fail(doc.origin, line,
         "unknown precoder '" + name + "' (expected mf, zf, or mmse)");
}

AllocatorKind parse_allocator(const Document& doc, const std::string& name, int line) {
    if (name == "es") {
        return AllocatorKind::ES;
    }
    if (name == "rmapa") {
        return AllocatorKind::RMAPA;
    }
    if (name == "mapa") {
        return AllocatorKind::MAPA;
    }
    if (name == "upa") {
        return AllocatorKind::UPA;
    }
    if (name == "random") {
        return AllocatorKind::RANDOM;
    }
    fail(doc.origin, line,
         "unknown allocator '" + name +
             "' (expected es, rmapa, mapa, upa, or random)");
}

ExperimentSpec build_spec(const Document& doc) {
    const Value* sv = doc.find("schema_version");
    if (sv) {
        if (sv->type != Value::Type::Integer || sv->integer != 1) {
            fail(doc.origin, sv->line, "unsupported schema_version (expected 1)");
        }
    }

    ExperimentSpec spec;
    spec.kind = parse_kind(doc);
    const bool sweep = spec.kind == ExperimentKind::SUMRATE_SWEEP;
    const bool probe = spec.kind == ExperimentKind::CONVEXITY_PROBE;

    // Kind-dependent defaults; everything can be overridden per key.
    spec.trials = static_cast<int>(get_int(doc, "experiment.trials",
                                           sweep ? 2000 : (probe ? 1 : 1000)));
    spec.system.seed =
        static_cast<std::uint64_t>(get_int(doc, "experiment.seed", 12345));
    spec.system.n_tx = static_cast<int>(get_int(doc, "system.n_tx", 4));
    spec.system.users =
        get_int_array(doc, "system.users", probe ? std::vector<int>{1, 1}
                                                 : std::vector<int>{2, 2});
    spec.system.sigma_n2 = get_float(doc, "system.sigma_n2", 1.0);
    spec.system.sigma_e2 = get_float(doc, "system.sigma_e2", sweep ? 0.1 : 0.0);
    spec.system.e_tr = get_float(doc, "system.e_tr", 10.0);
    spec.system.mu = get_float(doc, "algorithm.mu", 0.01);
    spec.system.iterations =
        static_cast<int>(get_int(doc, "algorithm.iterations", 100));
    spec.system.es_grid_step =
        get_float(doc, "algorithm.es_grid_step", sweep ? 0.05 : 0.005);
    spec.system.robust_scale = get_float(doc, "algorithm.robust_scale", 1.0);

    const std::vector<std::string> prec_names = get_string_array(
        doc, "experiment.precoders",
        sweep ? std::vector<std::string>{"zf", "mmse"}
              : std::vector<std::string>{"mf", "zf", "mmse"});
    for (const auto& name : prec_names) {
        spec.precoders.push_back(
            parse_precoder(doc, name, value_line(doc, "experiment.precoders")));
    }
    const std::vector<std::string> alloc_names = get_string_array(
        doc, "experiment.allocators",
        sweep ? std::vector<std::string>{"es", "rmapa", "mapa", "upa", "random"}
              : std::vector<std::string>{"mapa"});
    for (const auto& name : alloc_names) {
        spec.allocators.push_back(
            parse_allocator(doc, name, value_line(doc, "experiment.allocators")));
    }

    if (sweep) {
        spec.snr_grid_db = get_float_array(doc, "sweep.snr_db",
                                           {0.0, 5.0, 10.0, 15.0, 20.0});
    } else if (doc.find("sweep.snr_db")) {
        fail(doc.origin, value_line(doc, "sweep.snr_db"),
             "snr_db is only valid for kind = sumrate_sweep");
    }
    if (probe) {
        spec.theta_steps = static_cast<int>(get_int(doc, "probe.theta_steps", 200));
    } else if (doc.find("probe.theta_steps")) {
        fail(doc.origin, value_line(doc, "probe.theta_steps"),
             "theta_steps is only valid for kind = convexity_probe");
    }

    const std::string format = get_string(doc, "experiment.format", "csv");
    if (format == "csv") {
        spec.output_format = OutputFormat::CSV;
    } else if (format == "json") {
        spec.output_format = OutputFormat::JSON;
    } else {
        fail(doc.origin, value_line(doc, "experiment.format"),
             "unknown format '" + format + "' (expected csv or json)");
    }
    spec.output_path = get_string(doc, "experiment.output",
                                  to_string(spec.kind) + "." + format);

    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(doc.origin + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(doc.origin + ": " + e.what());
    }
    return spec;
}

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
    return build_spec(parse_document(text, origin));
}

void emit_result(const ExperimentResult& result, OutputFormat format,
                 const std::string& path) {
    if (result.columns.empty()) {
        throw IoError("refusing to emit empty result to " + path);
    }
    const std::size_t rows = result.columns.front().size();
    for (const auto& col : result.columns) {
        if (col.size() != rows) {
            throw IoError("inconsistent column lengths in result for " + path);
        }
    }
    std::string payload;
    if (format == OutputFormat::CSV) {
        std::ostringstream out;
        for (const auto& [k, v] : result.metadata) {
            out << "# " << k << " = " << v << "\n";
        }
        for (std::size_t c = 0; c < result.column_names.size(); ++c) {
            out << (c ? "," : "") << result.column_names[c];
        }
        out << "\n";
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < result.columns.size(); ++c) {
                out << (c ? "," : "") << csv_number(result.columns[c][r]);
            }
            out << "\n";
        }
        payload = out.str();
    } else {
        json j;
        j["metadata"] = json::object();
        for (const auto& [k, v] : result.metadata) {
            j["metadata"][k] = v;
        }
        j["tables"] = json::object();
        for (std::size_t c = 0; c < result.column_names.size(); ++c) {
            j["tables"][result.column_names[c]] = result.columns[c];
        }
        payload = j.dump(2) + "\n";
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << payload;
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

ReadBack read_result(const std::string& path, OutputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    ReadBack rb;
    if (format == OutputFormat::JSON) {
        json j = json::parse(text);
        for (auto& [k, v] : j.at("metadata").items()) {
            rb.metadata[k] = v.get<std::string>();
        }
        for (auto& [k, v] : j.at("tables").items()) {
            rb.column_names.push_back(k);
            rb.columns.push_back(v.get<std::vector<double>>());
        }
        return rb;
    }
    std::istringstream lines(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(lines, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const std::size_t eq = line.find('=');
            if (eq != std::string::npos) {
                rb.metadata[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
            }
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        if (!header_seen) {
            while (std::getline(cells, cell, ',')) {
                rb.column_names.push_back(trim(cell));
            }
            rb.columns.resize(rb.column_names.size());
            header_seen = true;
            continue;
        }
        std::size_t c = 0;
        while (std::getline(cells, cell, ',')) {
            if (c >= rb.columns.size()) {
                throw IoError("row wider than header in '" + path + "'");
            }
            rb.columns[c++].push_back(std::stod(cell));
        }
    }
    return rb;
}

std::string data_section(const std::string& file_contents, OutputFormat format) {
    if (format == OutputFormat::JSON) {
        return json::parse(file_contents).at("tables").dump();
    }
    std::istringstream lines(file_contents);
    std::string line;
    std::string out;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] == '#') {
            continue;
        }
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace mimopa
