#include "config.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"

namespace sqd {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(Errc::validation, "config key '" + key + "': " + what);
}

const json& field(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) bad(key, "missing");
    return *it;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
}

int integer(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) bad(key, "expected an integer");
    return v.get<int>();
}

Vec vector_of(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_array()) bad(key, "expected an array");
    Vec out;
    for (const auto& x : v) out.push_back(number(x, key));
    return out;
}

Matrix matrix_of(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_array() || v.empty()) bad(key, "expected a non-empty array of rows");
    std::size_t cols = 0;
    std::vector<Vec> rows;
    for (std::size_t r = 0; r < v.size(); ++r) {
        if (!v[r].is_array()) bad(key, "row " + std::to_string(r + 1) + " is not an array");
        Vec row;
        for (const auto& x : v[r]) row.push_back(number(x, key));
        if (r == 0) cols = row.size();
        if (row.size() != cols || cols == 0) bad(key, "ragged rows");
        rows.push_back(std::move(row));
    }
    return Matrix::from_rows(rows);
}

json matrix_json(const Matrix& M) {
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) rows.push_back(M.row(i));
    return rows;
}

void read_common(const json& j, DetectionModel& m) {
    if (!j.is_object()) throw Error(Errc::validation, "config must be a JSON object");
    m.X = integer(j, "X");
    m.Y = integer(j, "Y");
    m.A = integer(j, "A");
    m.P = matrix_of(j, "P");
    m.c = matrix_of(j, "c");
    m.f = vector_of(j, "f");
    m.d = number(field(j, "d"), "d");
    m.rho = number(field(j, "rho"), "rho");
    m.pi0 = vector_of(j, "pi0");
}

}  // namespace

DetectionModel model_from_json(const json& j) {
    DetectionModel m;
    read_common(j, m);
    m.B = matrix_of(j, "B");
    clamp_tiny_negatives(m);
    return m;
}

bool is_sensing_config(const json& j) {
    return j.is_object() && j.contains("B1") && j.contains("B2");
}

SensingModel sensing_from_json(const json& j) {
    SensingModel sm;
    read_common(j, sm.base);
    sm.B1 = matrix_of(j, "B1");
    sm.B2 = matrix_of(j, "B2");
    if (j.contains("Q1") || j.contains("Q2")) {
        sm.has_factor = true;
        sm.base.B = matrix_of(j, "B");
        sm.Q1 = matrix_of(j, "Q1");
        sm.Q2 = matrix_of(j, "Q2");
    } else {
        sm.base.B = j.contains("B") ? matrix_of(j, "B") : sm.B1;
    }
    clamp_tiny_negatives(sm.base);
    return sm;
}

json model_to_json(const DetectionModel& m) {
    json j;
    j["X"] = m.X;
    j["Y"] = m.Y;
    j["A"] = m.A;
    j["P"] = matrix_json(m.P);
    j["B"] = matrix_json(m.B);
    j["c"] = matrix_json(m.c);
    j["f"] = m.f;
    j["d"] = m.d;
    j["rho"] = m.rho;
    j["pi0"] = m.pi0;
    return j;
}

json sensing_to_json(const SensingModel& sm) {
    json j = model_to_json(sm.base);
    j["B1"] = matrix_json(sm.B1);
    j["B2"] = matrix_json(sm.B2);
    if (sm.has_factor) {
        j["Q1"] = matrix_json(sm.Q1);
        j["Q2"] = matrix_json(sm.Q2);
    } else {
        j.erase("B");
    }
    return j;
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::validation, std::string("malformed JSON: ") + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::validation, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str());
}

}  // namespace sqd
