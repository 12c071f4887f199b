#pragma once

#include "crum/analytic/analytic_fn.hpp"
#include "crum/families/family.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace crum::dqm {

/// Default depth cap for double precision.
inline constexpr int kDepthCap = 4;
/// Lattice steps per half shift gamma/2.
inline constexpr int kLatticeSteps = 8;

/// A*f = i(sqrt(V*)(x - i g/2) f(x - i g/2) - sqrt(V)(x + i g/2) f(x + i g/2)).
AnalyticFn apply_A(const AnalyticFn& sqrt_v, double gamma, const AnalyticFn& f);
/// A-dagger f = -i(sqrt(V)(x) f(x - i g/2) - sqrt(V*)(x) f(x + i g/2)).
AnalyticFn apply_Adag(const AnalyticFn& sqrt_v, double gamma, const AnalyticFn& f);

class Chain;
class Level;
using ChainPtr = std::shared_ptr<const Chain>;
using LevelPtr = std::shared_ptr<const Level>;

/// The discrete Crum tower of a dQM family.
///
/// Every evaluation point x is placed on a lattice re + i(base + j*delta) with
/// delta = gamma / (2 kLatticeSteps), so that the shifts +-i gamma/2 move j by
/// kLatticeSteps and values can be shared between levels. Square roots of level s >= 1
/// are continued along j from the real axis, where they are positive.
class Chain : public std::enable_shared_from_this<Chain> {
public:
    /// Builds levels 0..depth. Raises CapabilityError above the cap, ChainBreakError if a
    /// new ground state changes sign on the real axis, BranchError if a square root cannot
    /// be continued.
    static ChainPtr build(DqmFamilyPtr family, int depth, int nmax, int node_points = 401,
                          int depth_cap = kDepthCap);

    int depth() const { return depth_; }
    int nmax() const { return nmax_; }
    const DqmFamily& family() const { return *family_; }
    DqmFamilyPtr family_ptr() const { return family_; }
    double gamma() const { return gamma_; }
    double energy(int s) const { return family_->energy(s); }
    LevelPtr level(int s) const;

    /// Unchecked evaluations of level-s quantities.
    cplx phi(int s, int n, cplx x) const;
    cplx sqrt_v(int s, cplx x) const;
    cplx sqrt_v_star(int s, cplx x) const;
    cplx v(int s, cplx x) const;
    cplx v_star(int s, cplx x) const;
    /// sqrt(V_s(x)) sqrt(V_s*(x)); real positive on the real axis by construction.
    cplx anchor_product(int s, cplx x) const;

    /// Memoized entries, for diagnostics.
    size_t cache_size() const;

    struct Site {
        double re;
        double base;
        int j;
    };

private:
    struct Key {
        int s;
        int n;
        double re;
        double base;
        int j;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const;
    };

    Chain(DqmFamilyPtr family, int nmax);

    Site site(cplx x) const;
    cplx point(const Site& p) const;
    Site shifted(const Site& p, int dj) const { return {p.re, p.base, p.j + dj}; }

    cplx phi_at(int s, int n, const Site& p) const;
    cplx z_at(int s, const Site& p) const;
    cplx r_at(int s, const Site& p) const;
    cplx t_at(int l, const Site& p) const;
    cplx s_at(int s, const Site& p) const;
    cplx s_star_at(int s, const Site& p) const;
    bool lookup(const std::unordered_map<Key, cplx, KeyHash>& m, const Key& k, cplx& out) const;
    void store(std::unordered_map<Key, cplx, KeyHash>& m, const Key& k, cplx v) const;
    void check_level(int s) const;
    void check_n(int s, int n) const;

    DqmFamilyPtr family_;
    int depth_ = 0;
    int nmax_;
    double gamma_;
    double delta_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<Key, cplx, KeyHash> phi_cache_;
    mutable std::unordered_map<Key, cplx, KeyHash> z_cache_;
};

/// View of one level of a chain with checked AnalyticFn operators.
class Level : public std::enable_shared_from_this<Level> {
public:
    Level(ChainPtr chain, int s) : chain_(std::move(chain)), s_(s) {}

    int s() const { return s_; }
    double energy() const { return chain_->energy(s_); }
    double gamma() const { return chain_->gamma(); }
    const Chain& chain() const { return *chain_; }
    int nmax() const { return chain_->nmax(); }

    AnalyticFn phi(int n) const;
    AnalyticFn ground() const { return phi(s_); }
    AnalyticFn v_fn() const;
    AnalyticFn v_star_fn() const;
    AnalyticFn sqrt_v_fn() const;

    AnalyticFn apply_A(const AnalyticFn& f) const;
    AnalyticFn apply_Adag(const AnalyticFn& f) const;
    AnalyticFn hamiltonian(const AnalyticFn& f) const;
    /// S(x)S*(x - i g) f(x - i g) + S*(x)S(x + i g) f(x + i g) - (V + V*)(x) f(x) + E_s f(x).
    cplx hamiltonian_apply(const AnalyticFn& f, cplx x) const;

private:
    ChainPtr chain_;
    int s_;
};

/// V^[s] as a function, s >= 1.
AnalyticFn next_potential(const Chain& chain, int s);

/// phi^[s-1]_n = A^[s-1]dag phi^[s]_n / (E_n - E_{s-1}).
AnalyticFn downshift(const Chain& chain, int s, int n);

/// prod_{l<s} sqrt(V_l)(x + i(s-l)g/2) W_g[phi_0..phi_{s-1}, phi_n](x) / W_g[phi_0..phi_{s-1}](x - i g/2).
/// Needs levels 0..s-1 of the chain.
cplx phi_via_casoratian(const Chain& chain, int s, int n, cplx x);

/// |ad - bc - (-i) W[F](x) W[F, f, g](x)| / max(1, |ad| + |bc|) with
/// a = W[F, f](x + i g/2), b = W[F, h](x + i g/2), c = W[F, f](x - i g/2), d = W[F, h](x - i g/2).
double casoratian_jacobi_residual(const std::vector<AnalyticFn>& fs, const AnalyticFn& f,
                                  const AnalyticFn& h, cplx x, double gamma);

enum class Relation {
    zero_mode,
    quadratic,
    linear,
    intertwine,
    step_determinant,
    casoratian_jacobi,
    check_product,
    casoratian_phi,
    eigen,
    factorization,
    realness,
    branch_anchor,
};

std::string relation_name(Relation r);

struct Residual {
    double max_residual = 0.0;
    int samples = 0;
};

/// Max normalized residual of an identity at level s over the sample points.
///
/// zero_mode: A^[s] phi^[s]_s = 0, relative to sup |phi^[s]_s|.
/// quadratic: V_{s-1}(x - i g/2) V*_{s-1}(x - i g/2) = V_s(x) V*_s(x - i g) (s >= 1).
/// linear: V_{s-1}(x + i g/2) + V*_{s-1}(x - i g/2) = V_s(x) + V*_s(x) - (E_s - E_{s-1}) (s >= 1).
/// intertwine: A^[s] H^[s] f = H^[s+1] A^[s] f and its adjoint form; needs level s+1.
/// step_determinant: phi^[s]_n from the 2x2 formula on level s-1.
/// casoratian_jacobi: the determinant identity on eigenfunctions and on generic functions.
/// check_product: W_g[phi_0..phi_{s-1}, phi_n] as a product of check functions.
/// casoratian_phi: phi_via_casoratian against the recursive phi^[s]_n.
/// eigen: H^[s] phi^[s]_n = E_n phi^[s]_n relative to max(1, |E_n|) sup |phi^[s]_n|.
/// factorization: H^[s] f = A^[s]dag A^[s] f + E_s f on eigenfunctions.
/// realness: phi^[s]_n(x*)* = phi^[s]_n(x).
/// branch_anchor: sqrt(V_{s-1}) sqrt(V*_{s-1}) is real positive at real sample abscissae (s >= 1).
Residual relation_residual(Relation kind, const Chain& chain, int s, const std::vector<cplx>& samples);

} // namespace crum::dqm
