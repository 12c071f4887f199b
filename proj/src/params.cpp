#include "crum/families/params.hpp"

#include "crum/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace crum {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

double parse_real(const std::string& s, const std::string& whole) {
    if (s.empty() || s == "+") {
        return 1.0;
    }
    if (s == "-") {
        return -1.0;
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ParameterError("cannot parse number '" + whole + "'");
    }
    return v;
}

} // namespace

cplx parse_complex(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw ParameterError("empty parameter value");
    }
    if (s.back() != 'i' && s.back() != 'j') {
        return {parse_real(s, s), 0.0};
    }
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not part of an exponent and not leading
    size_t split = std::string::npos;
    for (size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        return {0.0, parse_real(body, s)};
    }
    return {parse_real(body.substr(0, split), s), parse_real(body.substr(split), s)};
}

nlohmann::json complex_to_json(cplx v) {
    if (v.imag() == 0.0) {
        return v.real();
    }
    return nlohmann::json::array({v.real(), v.imag()});
}

cplx complex_from_json(const nlohmann::json& j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    if (j.is_string()) {
        return parse_complex(j.get<std::string>());
    }
    throw ParameterError("parameter value must be a number, [re, im] or a string");
}

ParamSet::ParamSet(std::initializer_list<std::pair<std::string, cplx>> init) {
    for (const auto& [k, v] : init) {
        set(k, v);
    }
}

bool ParamSet::has(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.first == name; });
}

cplx ParamSet::get(const std::string& name) const {
    for (const auto& [k, v] : entries_) {
        if (k == name) {
            return v;
        }
    }
    throw ParameterError("missing parameter '" + name + "'");
}

double ParamSet::get_real(const std::string& name) const {
    const cplx v = get(name);
    if (v.imag() != 0.0) {
        throw ParameterError("parameter '" + name + "' must be real");
    }
    return v.real();
}

cplx ParamSet::get_or(const std::string& name, cplx fallback) const {
    return has(name) ? get(name) : fallback;
}

void ParamSet::set(const std::string& name, cplx value) {
    for (auto& [k, v] : entries_) {
        if (k == name) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(name, value);
}

void ParamSet::assign(const std::string& text) {
    const size_t eq = text.find('=');
    if (eq == std::string::npos) {
        throw ParameterError("parameter assignment '" + text + "' lacks '='");
    }
    const std::string name = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (name.empty()) {
        throw ParameterError("parameter assignment '" + text + "' lacks a name");
    }
    const bool listed = value.find(',') != std::string::npos || value.starts_with("(");
    if (!listed) {
        set(name, parse_complex(value));
        return;
    }
    if (value.starts_with("(")) {
        if (!value.ends_with(")")) {
            throw ParameterError("unbalanced parentheses in '" + text + "'");
        }
        value = value.substr(1, value.size() - 2);
    }
    std::stringstream ss(value);
    std::string item;
    int k = 1;
    while (std::getline(ss, item, ',')) {
        set(name + std::to_string(k++), parse_complex(item));
    }
}

nlohmann::json ParamSet::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : entries_) {
        j[k] = complex_to_json(v);
    }
    return j;
}

ParamSet ParamSet::from_json(const nlohmann::json& j) {
    ParamSet p;
    if (j.is_null()) {
        return p;
    }
    if (!j.is_object()) {
        throw ParameterError("parameters must be a JSON object");
    }
    for (const auto& [k, v] : j.items()) {
        p.set(k, complex_from_json(v));
    }
    return p;
}

std::string ParamSet::to_string() const {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    for (const auto& [k, v] : entries_) {
        os << (first ? "" : ", ") << k << "=";
        if (v.imag() == 0.0) {
            os << v.real();
        } else {
            os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
        }
        first = false;
    }
    return os.str();
}

} // namespace crum
