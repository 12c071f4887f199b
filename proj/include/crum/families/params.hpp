#pragma once

#include "crum/analytic/jet.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace crum {

/// Ordered named parameters. Values are complex; real parameters have zero imaginary part.
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(std::initializer_list<std::pair<std::string, cplx>> init);

    bool has(const std::string& name) const;
    cplx get(const std::string& name) const;
    double get_real(const std::string& name) const;
    cplx get_or(const std::string& name, cplx fallback) const;
    void set(const std::string& name, cplx value);
    const std::vector<std::pair<std::string, cplx>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// Parses "name=value". A parenthesised list "a=(v1,v2,...)" expands to a1, a2, ...
    /// Complex values use the forms 0.1+0.2i, -0.2i, 3.
    void assign(const std::string& text);

    nlohmann::json to_json() const;
    static ParamSet from_json(const nlohmann::json& j);
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, cplx>> entries_;
};

/// Parses a real or complex literal such as "0.1-0.2i".
cplx parse_complex(const std::string& text);
nlohmann::json complex_to_json(cplx v);
cplx complex_from_json(const nlohmann::json& j);

} // namespace crum
