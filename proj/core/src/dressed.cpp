#include "rabi/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <lapacke.h>

namespace rabi {

namespace {

constexpr double kSupportCut = 1e-14;
constexpr double kAmbiguityGap = 1e-3;
constexpr double kAssignFloor = 0.25;

inline std::size_t g_row(const FockWindow& w, std::int64_t n) {
    return 2 * static_cast<std::size_t>(n - w.n_min);
}
inline std::size_t e_row(const FockWindow& w, std::int64_t n) {
    return 2 * static_cast<std::size_t>(n - w.n_min) + 1;
}

} // namespace

const DressedPair* DressedBasis::find_pair(std::int64_t n) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), n,
                               [](const DressedPair& p, std::int64_t v) {
                                   return p.n < v;
                               });
    if (it != pairs.end() && it->n == n) return &*it;
    return nullptr;
}

DressedBasis dressed_states(const QrmParams& p, const FockWindow& w) {
    validate(p);
    if (w.n_min < 0 || w.n_max < w.n_min)
        throw DomainError("dressed_states: invalid window");

    DressedBasis basis;
    basis.window = w;
    basis.k_photon = p.k_photon;
    const double nu = p.srm.nu;
    basis.energy_shift = nu * static_cast<double>(w.n_min);

    const std::int64_t size = w.size();
    const lapack_int n = static_cast<lapack_int>(2 * size);
    basis.dim = n;
    constexpr lapack_int kd = 3;
    constexpr lapack_int ldab = kd + 1;

    // Lower band storage, column-major: ab[(i-j) + j*ldab] = A(i,j).
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    for (std::int64_t j = 0; j < size; ++j) {
        const double nrel = static_cast<double>(j);
        const double root_n = std::sqrt(static_cast<double>(w.n_min + j));
        const double root_np1 = std::sqrt(static_cast<double>(w.n_min + j + 1));
        const std::size_t gi = 2 * static_cast<std::size_t>(j);
        const std::size_t ei = gi + 1;
        ab[0 + gi * ldab] = nu * nrel;                   // <g,n|H|g,n>
        ab[0 + ei * ldab] = nu * nrel + p.srm.omega0;    // <e,n|H|e,n>
        if (j > 0)                                        // <g,n|H|e,n-1>
            ab[1 + (ei - 2) * ldab] = p.check_g0 * root_n;
        if (j + 1 < size)                                 // <e,n+1|H|g,n>
            ab[3 + gi * ldab] = p.check_g0 * root_np1;
    }

    basis.evals.resize(static_cast<std::size_t>(n));
    basis.evecs.resize(static_cast<std::size_t>(n) * n);
    const lapack_int info = LAPACKE_dsbevd(
        LAPACK_COL_MAJOR, 'V', 'L', n, kd, ab.data(), ldab, basis.evals.data(),
        basis.evecs.data(), n);
    if (info != 0)
        throw Error("dressed_states: dsbevd failed with info " + std::to_string(info));

    // Doublet bookkeeping. Valid doublets: n in [n_min + K, n_max].
    const int K = p.k_photon;
    const std::int64_t first_n = w.n_min + K;
    const std::int64_t n_doublets = w.n_max - first_n + 1;
    struct Slot {
        int cols[2] = {-1, -1};
        int count = 0;
    };
    std::vector<Slot> slots(n_doublets > 0 ? static_cast<std::size_t>(n_doublets) : 0);
    basis.support.resize(static_cast<std::size_t>(n));

    for (lapack_int col = 0; col < n; ++col) {
        const double* v = basis.vec(col);
        int lo = 0, hi = static_cast<int>(n);
        while (lo < hi && std::abs(v[lo]) < kSupportCut) ++lo;
        while (hi > lo && std::abs(v[hi - 1]) < kSupportCut) --hi;
        basis.support[static_cast<std::size_t>(col)] = {lo, hi};

        double best = 0.0, second = 0.0;
        std::int64_t best_n = -1;
        for (std::int64_t m = first_n; m <= w.n_max; ++m) {
            const double vg = v[g_row(w, m)];
            const double ve = v[e_row(w, m - K)];
            const double weight = vg * vg + ve * ve;
            if (weight > best) {
                second = best;
                best = weight;
                best_n = m;
            } else if (weight > second) {
                second = weight;
            }
        }
        if (best < kAssignFloor) {
            basis.unpaired.push_back(col);
            continue;
        }
        if (best - second < kAmbiguityGap)
            throw PairingAmbiguity("dressed_states: eigenvector " +
                                   std::to_string(col) +
                                   " overlaps two doublets almost equally");
        Slot& slot = slots[static_cast<std::size_t>(best_n - first_n)];
        if (slot.count >= 2)
            throw PairingAmbiguity("dressed_states: more than two members for n = " +
                                   std::to_string(best_n));
        slot.cols[slot.count++] = col;
    }

    for (std::int64_t m = first_n; m <= w.n_max; ++m) {
        Slot& slot = slots[static_cast<std::size_t>(m - first_n)];
        if (slot.count != 2) {
            for (int c = 0; c < slot.count; ++c)
                basis.unpaired.push_back(slot.cols[c]);
            continue;
        }
        // Normalize global signs so <g,n|v> >= 0, then split S/A by the
        // relative sign of the two doublet components.
        int col_s = -1, col_a = -1;
        for (int c = 0; c < 2; ++c) {
            const int col = slot.cols[c];
            double* v = basis.evecs.data() + static_cast<std::size_t>(col) * n;
            double vg = v[g_row(w, m)];
            double ve = v[e_row(w, m - K)];
            const double ref = std::abs(vg) >= std::abs(ve) ? vg : ve;
            if (ref < 0.0)
                for (lapack_int i = 0; i < n; ++i) v[i] = -v[i];
            vg = v[g_row(w, m)];
            ve = v[e_row(w, m - K)];
            const bool symmetric =
                vg * ve > 0.0 || (vg * ve == 0.0 && std::abs(vg) >= std::abs(ve));
            (symmetric ? col_s : col_a) = col;
        }
        if (col_s < 0 || col_a < 0)
            throw PairingAmbiguity("dressed_states: S/A classification failed at n = " +
                                   std::to_string(m));
        // enforce <g,n|S> >= 0 (flip once more if the reference pick was e-side)
        {
            double* v = basis.evecs.data() + static_cast<std::size_t>(col_s) * n;
            if (v[g_row(w, m)] < 0.0)
                for (lapack_int i = 0; i < n; ++i) v[i] = -v[i];
        }
        DressedPair pair;
        pair.n = m;
        pair.col_s = col_s;
        pair.col_a = col_a;
        pair.energy_s = basis.evals[static_cast<std::size_t>(col_s)];
        pair.energy_a = basis.evals[static_cast<std::size_t>(col_a)];
        const double* vs = basis.vec(col_s);
        pair.mu = vs[g_row(w, m)];
        pair.sigma_small = (m - 1 >= w.n_min) ? -vs[e_row(w, m - 1)] : 0.0;
        pair.varpi = (m - 2 >= w.n_min) ? vs[g_row(w, m - 2)] : 0.0;
        basis.pairs.push_back(pair);
    }
    return basis;
}

namespace {

// w_vec = W^(kind) v over the support of v; returns the [lo, hi) range of w.
void apply_w(ModKind kind, const QrmParams& p, const DressedBasis& basis,
             const double* v, std::pair<int, int> sup, std::vector<double>& out,
             std::pair<int, int>& out_range) {
    const std::int64_t dim = basis.dim;
    out.assign(static_cast<std::size_t>(dim), 0.0);
    if (kind == ModKind::omega) {
        const double half = 0.5 * p.srm.eps_omega;
        int lo = sup.first + ((sup.first % 2 == 0) ? 1 : 0);
        for (int i = lo; i < sup.second; i += 2)
            out[static_cast<std::size_t>(i)] = half * v[i];
        out_range = sup;
        return;
    }
    const double half = 0.5 * p.check_eps_g;
    const FockWindow& w = basis.window;
    const std::int64_t size = w.size();
    // (a + a^dag) sigma_x: same band pattern as the static coupling
    const int lo = std::max(0, sup.first - 3);
    const int hi = std::min<int>(static_cast<int>(dim), sup.second + 3);
    for (int i = lo; i < hi; ++i) {
        const std::int64_t j = i / 2;          // window offset
        const bool is_e = (i % 2) != 0;
        const double root_n = std::sqrt(static_cast<double>(w.n_min + j));
        const double root_np1 = std::sqrt(static_cast<double>(w.n_min + j + 1));
        double acc = 0.0;
        if (is_e) {
            // <e,n| W |g,n+-1>
            if (j + 1 < size) acc += root_np1 * v[i + 1];  // g at j+1: row 2j+2 = i+1
            if (j > 0) acc += root_n * v[i - 3];           // g at j-1: row i-3
        } else {
            // <g,n| W |e,n+-1>
            if (j > 0) acc += root_n * v[i - 1];           // e at j-1: row i-1
            if (j + 1 < size) acc += root_np1 * v[i + 3];  // e at j+1: row i+3
        }
        out[static_cast<std::size_t>(i)] = half * acc;
    }
    out_range = {lo, hi};
}

} // namespace

double matrix_element(ModKind kind, const QrmParams& p, const DressedBasis& basis,
                      int col_a, int col_b) {
    static thread_local std::vector<double> wb;
    std::pair<int, int> range;
    apply_w(kind, p, basis, basis.vec(col_b),
            basis.support[static_cast<std::size_t>(col_b)], wb, range);
    const double* va = basis.vec(col_a);
    const auto sa = basis.support[static_cast<std::size_t>(col_a)];
    const int lo = std::max(range.first, sa.first);
    const int hi = std::min(range.second, sa.second);
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) acc += va[i] * wb[static_cast<std::size_t>(i)];
    return acc;
}

double figure_of_merit(ModKind kind, const QrmParams& p, const DressedBasis& basis,
                       int col_a, int col_b, double eta_k) {
    const double w = matrix_element(kind, p, basis, col_a, col_b);
    if (w == 0.0 || !std::isfinite(1.0 / w))
        throw ZeroCoupling("figure_of_merit: vanishing matrix element");
    const double ea = basis.evals[static_cast<std::size_t>(col_a)];
    const double eb = basis.evals[static_cast<std::size_t>(col_b)];
    return std::abs((std::abs(ea - eb) - eta_k) / w);
}

DressedAmplitudes project_to_dressed(const JointState& psi, const DressedBasis& basis) {
    if (2 * static_cast<std::int64_t>(psi.amp_g.size()) != basis.dim)
        throw DomainError("project_to_dressed: dimension mismatch");
    const std::size_t size = psi.amp_g.size();
    // interleave once so columns stream contiguously
    cvec flat(2 * size);
    for (std::size_t j = 0; j < size; ++j) {
        flat[2 * j] = psi.amp_g[j];
        flat[2 * j + 1] = psi.amp_e[j];
    }
    auto project = [&](int col) {
        const double* v = basis.vec(col);
        const auto [lo, hi] = basis.support[static_cast<std::size_t>(col)];
        cxd acc{0.0, 0.0};
        for (int i = lo; i < hi; ++i) acc += v[i] * flat[static_cast<std::size_t>(i)];
        return acc;
    };
    DressedAmplitudes amps;
    amps.c_s.reserve(basis.pairs.size());
    amps.c_a.reserve(basis.pairs.size());
    for (const auto& pair : basis.pairs) {
        amps.c_s.push_back(project(pair.col_s));
        amps.c_a.push_back(project(pair.col_a));
    }
    amps.extras.reserve(basis.unpaired.size());
    for (int col : basis.unpaired) amps.extras.push_back(project(col));
    return amps;
}

namespace {

JointState assemble(const DressedBasis& basis,
                    const std::function<cxd(int col, std::size_t which)>& coeff) {
    JointState psi;
    psi.window = basis.window;
    psi.frame = Frame::lab;
    const std::size_t size = static_cast<std::size_t>(basis.window.size());
    cvec flat(2 * size, cxd{0.0, 0.0});
    auto add_col = [&](int col, cxd c) {
        if (c == cxd{0.0, 0.0}) return;
        const double* v = basis.vec(col);
        const auto [lo, hi] = basis.support[static_cast<std::size_t>(col)];
        for (int i = lo; i < hi; ++i) flat[static_cast<std::size_t>(i)] += c * v[i];
    };
    for (std::size_t k = 0; k < basis.pairs.size(); ++k) {
        add_col(basis.pairs[k].col_s, coeff(basis.pairs[k].col_s, 2 * k));
        add_col(basis.pairs[k].col_a, coeff(basis.pairs[k].col_a, 2 * k + 1));
    }
    for (std::size_t k = 0; k < basis.unpaired.size(); ++k)
        add_col(basis.unpaired[k],
                coeff(basis.unpaired[k], 2 * basis.pairs.size() + k));
    psi.amp_g.resize(size);
    psi.amp_e.resize(size);
    for (std::size_t j = 0; j < size; ++j) {
        psi.amp_g[j] = flat[2 * j];
        psi.amp_e[j] = flat[2 * j + 1];
    }
    return psi;
}

} // namespace

JointState reconstruct_from_dressed(const DressedAmplitudes& amps,
                                    const DressedBasis& basis) {
    return assemble(basis, [&](int, std::size_t which) {
        const std::size_t np = basis.pairs.size();
        if (which < 2 * np)
            return (which % 2 == 0) ? amps.c_s[which / 2] : amps.c_a[which / 2];
        return amps.extras[which - 2 * np];
    });
}

OdeStats evolve_dressed_slow(
    const DressedBasis& basis, const QrmParams& p, const DressedAmplitudes& amps0,
    int order, double t0, double t1, const std::vector<double>& sample_times,
    const std::function<void(std::size_t, double, const JointState&)>& on_sample,
    const ReducedOptions& opt) {
    if (order != 1 && order != 2)
        throw DomainError("evolve_dressed_slow: order must be 1 or 2");
    const std::size_t np = basis.pairs.size();
    if (amps0.c_s.size() != np || amps0.c_a.size() != np)
        throw DomainError("evolve_dressed_slow: amplitude/pair size mismatch");

    struct Mod {
        ModKind kind;
        double eta;
        double eps;
    };
    std::vector<Mod> mods;
    if (p.srm.eps_omega != 0.0)
        mods.push_back({ModKind::omega, p.srm.eta_omega, p.srm.eps_omega});
    if (p.check_eps_g != 0.0)
        mods.push_back({ModKind::g, p.srm.eta_g, p.check_eps_g});

    // member index: 2k (S of pair k), 2k+1 (A of pair k)
    const std::size_t nm = 2 * np;
    auto member_col = [&](std::size_t m) {
        return (m % 2 == 0) ? basis.pairs[m / 2].col_s : basis.pairs[m / 2].col_a;
    };
    auto member_energy = [&](std::size_t m) {
        return (m % 2 == 0) ? basis.pairs[m / 2].energy_s
                            : basis.pairs[m / 2].energy_a;
    };

    // Diagonal elements W^(p)_{aa}; validate |W_aa| << eta for every channel.
    std::vector<std::vector<double>> diag(mods.size(), std::vector<double>(nm, 0.0));
    for (std::size_t c = 0; c < mods.size(); ++c) {
        for (std::size_t m = 0; m < nm; ++m) {
            const int col = member_col(m);
            diag[c][m] = matrix_element(mods[c].kind, p, basis, col, col);
            if (std::abs(diag[c][m]) > opt.diag_ratio * mods[c].eta)
                throw ReductionInvalid(
                    "evolve_dressed_slow: |W_AA| exceeds " +
                    std::to_string(opt.diag_ratio) + " * eta");
        }
    }

    // Retained couplings.
    struct Coupling {
        std::uint32_t ia, ib;
        cxd coeff;
        double omega;
    };
    std::vector<Coupling> couplings;
    const cxd iunit{0.0, 1.0};
    for (std::size_t ka = 0; ka < np; ++ka) {
        const std::int64_t na = basis.pairs[ka].n;
        for (int dn = -opt.max_neighbor; dn <= opt.max_neighbor; ++dn) {
            const DressedPair* pb = basis.find_pair(na + dn);
            if (!pb) continue;
            const std::size_t kb = static_cast<std::size_t>(pb - basis.pairs.data());
            for (int sa = 0; sa < 2; ++sa) {
                for (int sb = 0; sb < 2; ++sb) {
                    const std::size_t ma = 2 * ka + static_cast<std::size_t>(sa);
                    const std::size_t mb = 2 * kb + static_cast<std::size_t>(sb);
                    if (ma == mb) continue;
                    const double delta_e = member_energy(mb) - member_energy(ma);
                    double w_ab[2] = {0.0, 0.0};
                    bool w_ab_done[2] = {false, false};
                    auto get_w = [&](std::size_t c) {
                        if (!w_ab_done[c]) {
                            w_ab[c] = matrix_element(mods[c].kind, p, basis,
                                                     member_col(ma), member_col(mb));
                            w_ab_done[c] = true;
                        }
                        return w_ab[c];
                    };
                    // first order: -sigma W e^{i t (sigma eta - dE)}
                    for (std::size_t c = 0; c < mods.size(); ++c) {
                        const double w = get_w(c);
                        if (w == 0.0) continue;
                        for (int sigma : {1, -1}) {
                            const double om = sigma * mods[c].eta - delta_e;
                            if (std::abs(om) <= opt.f_max * std::abs(w))
                                couplings.push_back({static_cast<std::uint32_t>(ma),
                                                     static_cast<std::uint32_t>(mb),
                                                     cxd{-double(sigma) * w, 0.0},
                                                     om});
                        }
                    }
                    // second order: -i sigma1 G e^{i t (sigma1 eta_k + sigma2 eta_p - dE)}
                    if (order >= 2 && mods.size() == 2) {
                        for (std::size_t c = 0; c < 2; ++c) {
                            const std::size_t cp = 1 - c;
                            const double g_coeff =
                                get_w(c) * (diag[cp][mb] - diag[cp][ma]) / mods[cp].eta;
                            if (g_coeff == 0.0) continue;
                            for (int s1 : {1, -1}) {
                                for (int s2 : {1, -1}) {
                                    const double om =
                                        s1 * mods[c].eta + s2 * mods[cp].eta - delta_e;
                                    if (std::abs(om) <= opt.f_max * std::abs(g_coeff))
                                        couplings.push_back(
                                            {static_cast<std::uint32_t>(ma),
                                             static_cast<std::uint32_t>(mb),
                                             -iunit * double(s1) * g_coeff, om});
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    auto rhs = [&](double t, const std::vector<cxd>& v, std::vector<cxd>& dv) {
        std::fill(dv.begin(), dv.end(), cxd{0.0, 0.0});
        for (const auto& c : couplings)
            dv[c.ia] += c.coeff * std::polar(1.0, c.omega * t) * v[c.ib];
    };

    std::vector<cxd> y(nm);
    for (std::size_t k = 0; k < np; ++k) {
        y[2 * k] = amps0.c_s[k];
        y[2 * k + 1] = amps0.c_a[k];
    }

    OdeOptions oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    auto emit = [&](std::size_t i, double t, const std::vector<cxd>& v) {
        if (!on_sample) return;
        // C -> c (diagonal phase) and dressed free evolution, then rebuild psi
        JointState psi = assemble(basis, [&](int, std::size_t which) -> cxd {
            const std::size_t npairs = basis.pairs.size();
            if (which < 2 * npairs) {
                double diag_phase = 0.0;
                for (std::size_t c = 0; c < mods.size(); ++c)
                    diag_phase += 2.0 * (std::cos(mods[c].eta * t) - 1.0) /
                                  mods[c].eta * diag[c][which];
                const double energy = member_energy(which);
                return v[which] * std::polar(1.0, diag_phase - energy * t);
            }
            const std::size_t x = which - 2 * npairs;
            const double energy =
                basis.evals[static_cast<std::size_t>(basis.unpaired[x])];
            return amps0.extras[x] * std::polar(1.0, -energy * t);
        });
        on_sample(i, t, psi);
    };
    return integrate_adaptive(rhs, std::move(y), t0, t1, sample_times, emit, oopt);
}

} // namespace rabi
