#pragma once

#include "crum/analytic/analytic_fn.hpp"
#include "crum/analytic/quadrature.hpp"
#include "crum/families/params.hpp"

#include <json.hpp>

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace crum {

/// Largest n for which eigenfunctions and energies are served.
inline constexpr int kTabulatedN = 32;

struct Interval {
    double lo;
    double hi;
    double width() const { return hi - lo; }
};

/// Common face of the oQM and dQM families.
class Family : public std::enable_shared_from_this<Family> {
public:
    virtual ~Family() = default;

    virtual std::string name() const = 0;
    virtual bool is_discrete() const = 0;
    const ParamSet& params() const { return params_; }
    /// Shift parameter; 0 for the ordinary families.
    virtual double gamma() const { return 0.0; }

    /// Physical domain (possibly infinite).
    virtual Interval domain() const = 0;
    /// Window for residual sampling, central 90% applied by the sampler.
    virtual Interval sample_window() const = 0;
    /// Window scanned for sign changes.
    virtual Interval node_window() const = 0;
    /// Quadrature for Gram matrices of eigenfunctions.
    virtual QuadratureSpec gram_quadrature() const = 0;
    /// Quadrature over the true physical domain, used for the virtual-state norm.
    virtual QuadratureSpec virtual_quadrature() const = 0;

    virtual double energy(int n) const = 0;
    virtual AnalyticFn phi(int n) const = 0;
    virtual AnalyticFn eta() const = 0;
    /// The excluded zero mode annihilated by A-dagger.
    virtual AnalyticFn virtual_state() const = 0;

    /// Norms h_n = <phi_n, phi_n>, computed by quadrature and cached.
    double norm(int n) const;

    nlohmann::json descriptor(int nmax) const;

protected:
    explicit Family(ParamSet params) : params_(std::move(params)) {}
    void check_index(int n) const;
    template <class T>
    std::shared_ptr<const T> self() const {
        return std::static_pointer_cast<const T>(shared_from_this());
    }

    ParamSet params_;

private:
    mutable std::mutex norm_mutex_;
    mutable std::vector<double> norms_;
};

/// Ordinary QM: H = p^2 + U, U = W'^2 + W''.
class OqmFamily : public Family {
public:
    bool is_discrete() const override { return false; }

    /// Jet of the pre-potential W.
    virtual Jet prepotential_jet(cplx x, int order) const = 0;
    /// Closed-form potential, independent of the W route.
    virtual cplx potential_closed(cplx x) const = 0;
    /// Jet of phi_n.
    virtual Jet phi_jet(int n, cplx x, int order) const = 0;

    Jet wprime_jet(cplx x, int order) const;
    AnalyticFn prepotential() const;
    AnalyticFn potential() const;
    AnalyticFn phi(int n) const override;

    /// Real shape parameters (g for laguerre and jacobi, none for hermite).
    virtual std::vector<double> shape_params() const = 0;
    virtual std::shared_ptr<const OqmFamily> with_shape_params(const std::vector<double>& p) const = 0;

protected:
    using Family::Family;
};

/// Askey-Wilson type discrete QM with pure imaginary shifts.
class DqmFamily : public Family {
public:
    bool is_discrete() const override { return true; }

    /// sqrt(V) as the product of principal roots of its factors.
    virtual cplx sqrt_v(cplx x) const = 0;
    virtual cplx v(cplx x) const = 0;
    cplx sqrt_v_star(cplx x) const { return std::conj(sqrt_v(std::conj(x))); }
    cplx v_star(cplx x) const { return std::conj(v(std::conj(x))); }

    /// Unchecked evaluations used by the chain's lattice.
    virtual cplx phi_raw(int n, cplx x) const = 0;
    virtual Jet phi_jet(int n, cplx x, int order) const = 0;
    virtual cplx eta_raw(cplx x) const = 0;
    /// Coefficients of the monic recurrence P_{n+1} = (y - b_n) P_n - c_n P_{n-1}.
    virtual std::pair<double, double> recurrence(int n) const = 0;

    AnalyticFn v_fn() const;
    AnalyticFn v_star_fn() const;
    AnalyticFn phi(int n) const override;
    AnalyticFn eta() const override;

    /// Level-0 difference Hamiltonian applied to f at x.
    cplx hamiltonian(const AnalyticFn& f, cplx x) const;

    /// Strip half-width declared on the family's functions.
    double strip() const { return strip_; }

    /// Complex shape parameters (a_1..a_4 for askey_wilson, none for q_hermite).
    virtual std::vector<cplx> shape_params() const = 0;
    virtual std::shared_ptr<const DqmFamily> with_shape_params(const std::vector<cplx>& p) const = 0;
    /// Family with the parameters moved by the shift delta of the virtual state.
    virtual std::shared_ptr<const DqmFamily> shifted_for_virtual() const = 0;
    virtual double virtual_delta() const = 0;

protected:
    DqmFamily(ParamSet params, double strip) : Family(std::move(params)), strip_(strip) {}

    double strip_;
};

using FamilyPtr = std::shared_ptr<const Family>;
using OqmFamilyPtr = std::shared_ptr<const OqmFamily>;
using DqmFamilyPtr = std::shared_ptr<const DqmFamily>;

/// Catalog entry for `families list`.
struct FamilyInfo {
    std::string name;
    std::string kind;
    std::string parameters;
    std::string constraints;
};

std::vector<FamilyInfo> family_catalog();

struct FamilyOptions {
    /// Run the construction-time self-consistency suite.
    bool validate = true;
    /// Chain depth the dQM strip is sized for.
    int depth = 4;
};

/// Builds and validates a family. Throws ParameterError on constraint violations.
FamilyPtr make_family(const std::string& name, const ParamSet& params,
                      const FamilyOptions& opts = {});
OqmFamilyPtr make_oqm_family(const std::string& name, const ParamSet& params,
                             const FamilyOptions& opts = {});
DqmFamilyPtr make_dqm_family(const std::string& name, const ParamSet& params,
                             const FamilyOptions& opts = {});

enum class FamilyPart { V, Vstar, phi0, phi_n, eta, energy };

/// Closed-form part of a family. V and Vstar exist only for dQM families;
/// for oQM families V denotes the potential U.
cplx family_eval(const Family& fam, FamilyPart part, int n = 0, cplx x = 0.0);

/// Report of the construction-time self-consistency suite.
struct FamilyCheck {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};
std::vector<FamilyCheck> family_self_check(const Family& fam);

} // namespace crum
