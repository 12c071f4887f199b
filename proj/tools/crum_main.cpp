#include "crum/error.hpp"
#include "crum/families/family.hpp"
#include "crum/structure/structure.hpp"
#include "crum/verify/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace crum;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kSuiteFailed = 1, kUsage = 2 };

/// Raised for bad files and arguments that CLI11 cannot see.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write " + path);
    }
    f << text;
}

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw UsageError("cannot read " + path);
    }
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

ParamSet parse_params(const std::vector<std::string>& assigns) {
    ParamSet p;
    for (const auto& a : assigns) {
        p.assign(a);
    }
    return p;
}

void parse_tolerances(const std::vector<std::string>& items, verify::Tolerances& t) {
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--tol expects name=value, got " + it);
        }
        const std::string name = it.substr(0, eq);
        double v = 0.0;
        try {
            v = std::stod(it.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("--tol value is not a number: " + it);
        }
        if (name == "algebraic") {
            t.algebraic = v;
        } else if (name == "quadrature") {
            t.quadrature = v;
        } else if (name == "oracle") {
            t.oracle = v;
        } else {
            t.overrides[name] = v;
        }
    }
}

/// One line per failing or erroring entry.
void list_failures(const json& j, const std::string& path, std::ostream& os) {
    if (j.is_object()) {
        if (j.contains("pass") && j["pass"].is_boolean() && !j["pass"].get<bool>()) {
            os << "  FAIL " << path;
            if (j.contains("residual")) {
                os << " residual=" << j["residual"] << " tol=" << j["tol"];
            }
            if (j.contains("message")) {
                os << " " << j["message"].get<std::string>();
            }
            os << "\n";
        }
        for (const auto& [k, v] : j.items()) {
            if (k != "config") {
                list_failures(v, path + "/" + k, os);
            }
        }
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) {
            list_failures(j[i], path + "/" + std::to_string(i), os);
        }
    }
}

/// Writes the report unless out is empty and returns the exit code for its status.
int finish_report(const json& rep, const std::string& out) {
    if (!out.empty()) {
        emit(out, rep.dump(2) + "\n");
    }
    const bool pass = rep["status"] == "pass";
    std::cerr << rep["family"]["name"].get<std::string>() << " depth " << rep["depth"] << ": "
              << (pass ? "pass" : "FAIL") << " (" << std::fixed << std::setprecision(2)
              << rep["wall_time"].get<double>() << " s)\n";
    if (!pass) {
        list_failures(rep, "", std::cerr);
    }
    return pass ? kOk : kSuiteFailed;
}

std::string csv_text(const std::vector<structure::LimitTable>& tables) {
    std::ostringstream os;
    structure::write_csv(os, tables);
    return os.str();
}

int report_tables(const std::vector<structure::LimitTable>& tables, const std::string& csv) {
    emit(csv, csv_text(tables));
    bool conclusive = true;
    for (const auto& t : tables) {
        std::cerr << structure::limit_mode_name(t.mode) << ": fitted slope " << std::setprecision(4)
                  << t.slope;
        if (t.inconclusive) {
            std::cerr << " (inconclusive: errors not decreasing or at rounding level)";
            conclusive = false;
        } else if (std::abs(t.slope - 1.0) > 0.25) {
            std::cerr << " (first order expected; observed order differs)";
        }
        std::cerr << "\n";
    }
    return conclusive ? kOk : kSuiteFailed;
}

AnalyticFn polynomial_from(const std::vector<double>& coeffs) {
    return polynomial_fn(std::vector<cplx>(coeffs.begin(), coeffs.end()));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crum chains for ordinary and discrete quantum mechanics"};
    app.require_subcommand(1);

    auto* families = app.add_subcommand("families", "family catalog");
    families->add_subcommand("list", "list families with parameters and constraints");
    families->require_subcommand(1);

    verify::RunConfig cfg;
    cfg.out = "-";
    std::vector<std::string> params, tols;
    std::string precision = "double";

    auto* chain = app.add_subcommand("chain", "build a chain and run the verification suite");
    chain->add_option("--family", cfg.family, "family name")->required();
    chain->add_option("--param", params, "parameter assignment name=value; a=(v1,...) expands")
        ->take_all();
    chain->add_option("--depth", cfg.depth, "chain depth")->capture_default_str();
    chain->add_option("--nmax", cfg.nmax, "highest eigenfunction index")->capture_default_str();
    chain->add_option("--samples", cfg.samples, "real-axis sample count")->capture_default_str();
    chain->add_option("--seed", cfg.seed, "sampler seed (CRUM_SEED overrides)")->capture_default_str();
    chain->add_option("--tol", tols, "tolerance override name=value; names algebraic, quadrature, "
                                     "oracle set a class")
        ->take_all();
    chain->add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}))
        ->capture_default_str();
    chain->add_flag("--limits", cfg.limits, "add the limit tables");
    chain->add_option("--out", cfg.out, "report path, - for standard output")->capture_default_str();

    std::string report_path, verify_out;
    auto* ver = app.add_subcommand("verify", "re-run the configuration stored in a report");
    ver->add_option("report", report_path, "existing JSON report")->required();
    ver->add_option("--out", verify_out, "path for the new report, - for standard output");

    std::string mode = "c-to-inf", csv = "-";
    structure::LimitScaling sc;
    std::vector<double> w1{0.0, 1.0}, w2{0.0};
    auto* limit = app.add_subcommand("limit", "convergence tables of the c to infinity limit");
    limit->add_option("--mode", mode, "c-to-inf or casoratian-transfer")
        ->check(CLI::IsMember({"c-to-inf", "casoratian-transfer"}))
        ->capture_default_str();
    limit->add_option("--c", sc.c_values, "comma-separated c values")->delimiter(',');
    limit->add_option("--a", sc.a, "overall scale a > 0")->capture_default_str();
    limit->add_option("--gamma", sc.gamma, "shift scale")->capture_default_str();
    limit->add_option("--w1", w1, "coefficients of w_1, lowest first")->delimiter(',');
    limit->add_option("--w2", w2, "coefficients of the second-order term, lowest first")->delimiter(',');
    limit->add_option("--csv", csv, "CSV path, - for standard output")->capture_default_str();

    std::string scan_family = "hermite", scan_csv = "-";
    std::vector<std::string> scan_params;
    std::vector<double> gammas{1e-1, 1e-2, 1e-3};
    int scan_n = 3;
    auto* scan = app.add_subcommand("scan-gamma0", "Casoratian against Wronskian as gamma goes to 0");
    scan->add_option("--family", scan_family, "family whose phi_0..phi_{n-1} are used")->capture_default_str();
    scan->add_option("--param", scan_params, "parameter assignment")->take_all();
    scan->add_option("--n", scan_n, "number of functions")->capture_default_str()->check(CLI::Range(1, 8));
    scan->add_option("--gamma", gammas, "comma-separated gamma values")->delimiter(',');
    scan->add_option("--csv", scan_csv, "CSV path, - for standard output")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (families->parsed()) {
            std::cout << std::left << std::setw(14) << "name" << std::setw(6) << "kind" << std::setw(16)
                      << "parameters"
                      << "constraints\n";
            for (const auto& f : family_catalog()) {
                std::cout << std::setw(14) << f.name << std::setw(6) << f.kind << std::setw(16) << f.parameters
                          << f.constraints << "\n";
            }
            return kOk;
        }
        if (chain->parsed()) {
            cfg.params = parse_params(params);
            parse_tolerances(tols, cfg.tolerances);
            cfg.precision = precision == "extended" ? verify::Precision::extended : verify::Precision::double_;
            verify::apply_env(cfg);
            const json rep = verify::run_suite(cfg);
            const int code = finish_report(rep, cfg.out);
            for (const auto& st : rep["stages"]) {
                if (st.value("error", "") == "ParameterError") {
                    return kUsage;
                }
            }
            return code;
        }
        if (ver->parsed()) {
            const json old = read_json(report_path);
            if (!old.contains("schema") || old["schema"] != verify::kReportSchema || !old.contains("config")) {
                throw UsageError(report_path + " is not a " + std::string(verify::kReportSchema) + " report");
            }
            verify::RunConfig c = verify::RunConfig::from_json(old["config"]);
            verify::apply_env(c);
            const json rep = verify::run_suite(c);
            if (rep["status"] != old["status"]) {
                std::cerr << "status changed: stored " << old["status"] << ", now " << rep["status"] << "\n";
            }
            return finish_report(rep, verify_out);
        }
        if (limit->parsed()) {
            if (!(sc.a > 0.0)) {
                throw ParameterError("--a must be positive");
            }
            for (double c : sc.c_values) {
                if (!(c > 0.0)) {
                    throw ParameterError("--c values must be positive");
                }
            }
            sc.w1 = polynomial_from(w1);
            sc.w2 = polynomial_from(w2);
            std::vector<double> pts;
            for (int k = 0; k < 10; ++k) {
                pts.push_back(-1.8 + 3.6 * (k + 0.5) / 10.0);
            }
            const auto t = mode == "c-to-inf" ? structure::limit_c_to_inf(sc, pts)
                                              : structure::limit_casoratian_transfer(sc, pts);
            return report_tables({t}, csv);
        }
        if (scan->parsed()) {
            for (double g : gammas) {
                if (!(g > 0.0)) {
                    throw ParameterError("--gamma values must be positive");
                }
            }
            const auto fam = make_family(scan_family, parse_params(scan_params));
            std::vector<AnalyticFn> fs;
            for (int k = 0; k < scan_n; ++k) {
                fs.push_back(fam->phi(k));
            }
            const Interval w = fam->sample_window();
            std::vector<double> pts;
            for (int k = 0; k < 10; ++k) {
                pts.push_back(w.lo + 0.05 * w.width() + 0.9 * w.width() * (k + 0.5) / 10.0);
            }
            return report_tables({structure::limit_gamma_to_0(fs, gammas, pts)}, scan_csv);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kUsage;
    } catch (const IndexError& e) {
        std::cerr << "index error: " << e.what() << "\n";
        return kUsage;
    } catch (const CapabilityError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSuiteFailed;
    }
    return kUsage;
}
