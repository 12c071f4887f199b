#pragma once

#include "crum/analytic/analytic_fn.hpp"
#include "crum/families/family.hpp"

#include <memory>
#include <string>
#include <vector>

namespace crum::oqm {

/// Default depth cap for double precision.
inline constexpr int kDepthCap = 4;

class Level;
using LevelPtr = std::shared_ptr<const Level>;

/// Level s of the ordinary Crum tower: H^[s] = A^[s]dag A^[s] + E_s, eigenfunctions phi^[s]_n for n >= s.
///
/// W_s is never formed; operators use W_s' = phi^[s]_s' / phi^[s]_s (the family's W' at level 0).
class Level : public std::enable_shared_from_this<Level> {
public:
    static LevelPtr base(OqmFamilyPtr family, int nmax);

    int s() const { return s_; }
    int nmax() const { return nmax_; }
    double energy() const { return family_->energy(s_); }
    const OqmFamily& family() const { return *family_; }
    OqmFamilyPtr family_ptr() const { return family_; }
    LevelPtr parent() const { return parent_; }

    /// Jet of phi^[s]_n; throws IndexError for n < s or n > nmax.
    Jet phi_jet(int n, cplx x, int order) const;
    AnalyticFn phi(int n) const;
    AnalyticFn ground() const { return phi(s_); }

    Jet wprime_jet(cplx x, int order) const;
    AnalyticFn wprime() const;
    /// U^[s] = W_s'^2 + W_s''.
    AnalyticFn potential() const;

    /// f' - W_s' f.
    AnalyticFn apply_A(const AnalyticFn& f) const;
    /// -f' - W_s' f.
    AnalyticFn apply_Adag(const AnalyticFn& f) const;
    /// -f'' + U_s f + E_s f as a function.
    AnalyticFn hamiltonian(const AnalyticFn& f) const;
    cplx hamiltonian_apply(const AnalyticFn& f, cplx x) const;

private:
    Level(OqmFamilyPtr family, LevelPtr parent, int s, int nmax);
    friend LevelPtr step_chain(const LevelPtr& prev, int grid_points);

    void check_n(int n) const;

    OqmFamilyPtr family_;
    LevelPtr parent_;
    int s_;
    int nmax_;
};

/// Width cut from each finite (singular) edge of the domain at level s >= 1. Near such an
/// edge phi^[s]_n ~ x^(g+s) while each application of A amplifies rounding by about 1/x, so
/// values closer than (1e-13)^(1/(g + 2s)) are rounding-dominated.
double edge_cut(const OqmFamily& family, int s);

/// The window with edge_cut removed at every finite domain endpoint it touches.
Interval trusted_window(const OqmFamily& family, int s, Interval window);

/// Level s+1 from level s. Scans phi^[s+1]_{s+1} for sign changes on the family's node
/// window and throws ChainBreakError if any are found.
LevelPtr step_chain(const LevelPtr& prev, int grid_points = 2001);

/// Levels 0..depth. depth above the cap raises CapabilityError.
std::vector<LevelPtr> build_chain(OqmFamilyPtr family, int depth, int nmax, int grid_points = 2001,
                                  int depth_cap = kDepthCap);

/// phi^[s-1]_n = A^[s-1]dag phi^[s]_n / (E_n - E_{s-1}), given level s.
AnalyticFn downshift(const std::vector<LevelPtr>& chain, int s, int n);

/// W[phi_0..phi_{s-1}, phi_n](x) / W[phi_0..phi_{s-1}](x).
cplx phi_via_wronskian(const OqmFamily& family, int s, int n, cplx x);

enum class Relation {
    intertwine,
    riccati,
    potential_wronskian,
    factorization,
    eigen,
    zero_mode,
    wronskian_product,
    wronskian_phi,
};

std::string relation_name(Relation r);

struct Residual {
    double max_residual = 0.0;
    int samples = 0;
};

/// Max over samples of |lhs - rhs| / (1 + |lhs|) for the identity at level s.
///
/// intertwine: A^[s] H^[s] f = H^[s+1] A^[s] f and A^[s]dag H^[s+1] g = H^[s] A^[s]dag g,
///   with f = phi^[s]_n for n in (s, nmax] and a generic smooth test function; needs level s+1.
/// riccati: W_{s}'^2 + W_{s}'' = W_{s-1}'^2 - W_{s-1}'' - (E_s - E_{s-1}) (s >= 1).
/// potential_wronskian: U^[s] + E_s = U - 2 (log W[phi_0..phi_{s-1}])''.
/// factorization: H^[s] = A^[s]dag A^[s] + E_s = A^[s-1] A^[s-1]dag + E_{s-1} on each phi^[s]_n.
/// eigen: H^[s] phi^[s]_n = E_n phi^[s]_n, normalized by max(1, E_n) sup |phi^[s]_n|.
/// zero_mode: A^[s] phi^[s]_s = 0, normalized by sup |phi^[s]_s'|.
/// wronskian_product: W[phi_0..phi_{s-1}, phi_n] = phi_0 phi^[1]_1 ... phi^[s-1]_{s-1} phi^[s]_n.
/// wronskian_phi: phi_via_wronskian against the recursive phi^[s]_n.
Residual relation_residual(Relation kind, const std::vector<LevelPtr>& chain, int s,
                           const std::vector<double>& samples);

/// Generic smooth test function used by the intertwining check.
AnalyticFn intertwining_probe(const OqmFamily& family);

} // namespace crum::oqm
