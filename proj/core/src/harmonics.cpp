#include "rabi/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rabi/special.hpp"

namespace rabi {

namespace {

constexpr double kAmplitudeFloor = 1e-18;

// i^|m| J_|m|(z): the m-th harmonic of exp(i z cos(theta)); exp(-i z cos)
// flips i -> -i. Jacobi-Anger with J_{-m} folded in.
std::complex<double> cos_harmonic(int m, double z, bool conjugate) {
    const int am = std::abs(m);
    const double j = bessel_j(am, z);
    std::complex<double> ipow{1.0, 0.0};
    switch (am % 4) {
        case 0: ipow = {1.0, 0.0}; break;
        case 1: ipow = {0.0, 1.0}; break;
        case 2: ipow = {-1.0, 0.0}; break;
        case 3: ipow = {0.0, -1.0}; break;
    }
    if (conjugate) ipow = std::conj(ipow);
    return ipow * j;
}

// J_n(z) for signed n (J_{-n} = (-1)^n J_n).
double bessel_signed(int n, double z) {
    const int an = std::abs(n);
    double j = bessel_j(an, z);
    if (n < 0 && an % 2 == 1) j = -j;
    return j;
}

struct Channel {
    std::complex<double> amp;
    int w = 0; // multiples of 2 nu
    int a = 0; // eta_omega quanta (signed)
    int b = 0; // eta_g quanta (signed)
    int order = 0;
};

std::string make_label(int w, int a, int b) {
    std::string s = "Xi_{";
    if (w == 0) {
        s += "-R";
    } else {
        s += std::to_string(2 * w);
        s += "-R";
    }
    auto tone = [&](int q, const char* name) {
        if (q == 0) return;
        s += q > 0 ? '+' : '-';
        if (std::abs(q) > 1) s += std::to_string(std::abs(q));
        s += name;
    };
    if (a != 0 || b != 0) s += ',';
    tone(a, "eta_O");
    tone(b, "eta_g");
    s += '}';
    return s;
}

} // namespace

std::vector<HarmonicTerm> expand_harmonics(const SrmParams& p, const DerivedSrm& d,
                                           int max_order) {
    if (max_order < 0 || max_order > 4)
        throw DomainError("expand_harmonics: max_order must lie in [0, 4]");
    for (double u : d.upsilon)
        if (std::abs(u) >= 1.0)
            throw SeriesDivergence("expand_harmonics: |Upsilon_k| >= 1");

    const bool has_omega = p.eps_omega != 0.0;
    const bool has_g = p.eps_g != 0.0;

    // Bracket channels of R- eps_+^* - g~ eps_z - R+ eps_+ with
    // eps_+ = g(t) e^{2 i nu t} + eps_g sin(eta_g t).
    std::vector<Channel> bracket;
    bracket.push_back({{p.g0 * d.r_minus, 0.0}, -1, 0, 0, 0});
    bracket.push_back({{-p.g0 * d.r_plus, 0.0}, 1, 0, 0, 0});
    if (has_omega) {
        for (int s : {1, -1})
            bracket.push_back({{0.0, s * 0.5 * d.g_tilde * p.eps_omega}, 0, s, 0, 1});
    }
    if (has_g) {
        for (int s : {1, -1}) {
            bracket.push_back({{0.0, s * 0.5 * d.delta_tilde * p.eps_g}, 0, 0, s, 1});
            bracket.push_back({{0.0, -s * 0.5 * p.eps_g * d.r_minus}, -1, 0, s, 1});
            bracket.push_back({{0.0, s * 0.5 * p.eps_g * d.r_plus}, 1, 0, s, 1});
        }
    }

    const int m1_max = has_omega ? max_order : 0;
    const int mg_max = has_g ? max_order : 0;
    const int n0_max = 6;
    const std::complex<double> phase = std::polar(1.0, d.phi);

    struct Accum {
        std::complex<double> amp{0.0, 0.0};
        int min_order = 99;
    };
    std::map<std::tuple<int, int, int>, Accum> merged;

    for (int m1 = -m1_max; m1 <= m1_max; ++m1) {
        const std::complex<double> f1 =
            cos_harmonic(m1, d.upsilon[1], /*conjugate=*/true);
        for (int m2 = -mg_max; m2 <= mg_max; ++m2) {
            const std::complex<double> f2 = cos_harmonic(m2, d.upsilon[2], false);
            for (int m3 = -mg_max; m3 <= mg_max; ++m3) {
                const std::complex<double> f3 = cos_harmonic(m3, d.upsilon[3], false);
                for (int m4 = -mg_max; m4 <= mg_max; ++m4) {
                    const int quanta =
                        std::abs(m1) + std::abs(m2) + std::abs(m3) + std::abs(m4);
                    if (quanta > max_order) continue;
                    const std::complex<double> f4 =
                        cos_harmonic(m4, d.upsilon[4], false);
                    const std::complex<double> f1234 = f1 * f2 * f3 * f4;
                    for (const Channel& ch : bracket) {
                        const int order = quanta + ch.order;
                        if (order > max_order) continue;
                        for (int n0 = -n0_max; n0 <= n0_max; ++n0) {
                            const double f0 = bessel_signed(n0, d.upsilon[0]);
                            const std::complex<double> amp =
                                phase * f0 * f1234 * ch.amp;
                            if (std::abs(amp) < kAmplitudeFloor) continue;
                            const int w = -n0 + m3 - m4 + ch.w;
                            const int a = m1 + ch.a;
                            const int b = m2 + m3 + m4 + ch.b;
                            auto& slot = merged[{w, a, b}];
                            slot.amp += amp;
                            slot.min_order = std::min(slot.min_order, order);
                        }
                    }
                }
            }
        }
    }

    std::vector<HarmonicTerm> out;
    out.reserve(merged.size());
    for (const auto& [key, acc] : merged) {
        if (std::abs(acc.amp) < kAmplitudeFloor) continue;
        HarmonicTerm term;
        term.amplitude = acc.amp;
        term.order = acc.min_order;
        std::tie(term.w, term.a, term.b) = key;
        term.frequency = -d.R + 2.0 * p.nu * term.w + term.a * p.eta_omega +
                         term.b * p.eta_g;
        term.label = make_label(term.w, term.a, term.b);
        out.push_back(std::move(term));
    }
    std::sort(out.begin(), out.end(), [](const HarmonicTerm& x, const HarmonicTerm& y) {
        return std::abs(x.amplitude) > std::abs(y.amplitude);
    });
    return out;
}

std::vector<HarmonicTerm> select_shift_terms(const std::vector<HarmonicTerm>& terms) {
    std::vector<HarmonicTerm> out;
    for (const auto& t : terms)
        if (t.a == 0 && t.b == 0 && (t.w == 0 || t.w == -1 || t.w == -2))
            out.push_back(t);
    return out;
}

FrequencyShift frequency_shift(const std::vector<HarmonicTerm>& retained,
                               const DerivedSrm& d) {
    if (retained.empty()) throw DomainError("frequency_shift: no retained terms");
    const HarmonicTerm* lead = &retained.front();
    double sum_p2 = 0.0;
    for (const auto& t : retained) {
        const double ap = std::abs(t.amplitude);
        if (ap > std::abs(lead->amplitude)) lead = &t;
        if (ap > 0.1 * std::abs(t.frequency))
            throw CoarseGrainViolation("frequency_shift: |p_j| > 0.1 |f_j| for " + t.label);
        sum_p2 += ap * ap;
    }
    const double f1 = lead->frequency;
    FrequencyShift s;
    const double sgn = f1 >= 0.0 ? 1.0 : -1.0;
    s.delta = sgn * 0.5 * (std::abs(f1) - std::sqrt(f1 * f1 + 4.0 * sum_p2));
    s.r = d.R + 2.0 * s.delta;
    s.tau = 2.0 * M_PI / std::abs(f1);
    for (const auto& t : retained) s.retained.push_back(t.label);
    return s;
}

FrequencyShift frequency_shift_for(const SrmParams& p, const DerivedSrm& d) {
    const auto retained = select_shift_terms(expand_harmonics(p, d, 0));
    if (retained.empty()) {
        // g0 = 0: no fast tones at all, the shift vanishes identically.
        FrequencyShift s;
        s.delta = 0.0;
        s.r = d.R;
        s.tau = 2.0 * M_PI / (2.0 * p.nu + d.R);
        return s;
    }
    return frequency_shift(retained, d);
}

double resonance_omega0(int k, double g0, double nu, double tol, int max_iter) {
    if (k < 1) throw DomainError("resonance_omega0: k must be >= 1");
    const auto step = [&](double omega0) {
        SrmParams p;
        p.nu = nu;
        p.omega0 = omega0;
        p.g0 = g0;
        const DerivedSrm d = derive_srm(p);
        const FrequencyShift s = frequency_shift_for(p, d);
        const double arg = (k * nu - s.delta) * (k * nu - s.delta) - g0 * g0;
        if (arg < 0.0)
            throw DomainError("resonance_omega0: square root argument negative");
        return nu + 2.0 * std::sqrt(arg);
    };

    double omega0 = (2 * k + 1) * nu; // unshifted guess
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const double next = 0.5 * omega0 + 0.5 * step(omega0);
        const double change = std::abs(next - omega0);
        omega0 = next;
        if (change < tol * nu) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NoConvergence("resonance_omega0: no fixed point after max_iter iterations");
    // Undamped polish: the map is strongly contracting near the fixed point,
    // so a few plain iterations land within ~1e-12 nu of it.
    for (int it = 0; it < 3; ++it) omega0 = step(omega0);
    return omega0;
}

std::vector<bool> match_flags(const std::vector<HarmonicTerm>& terms,
                              const FrequencyShift& shift, double match_tol) {
    // Tones whose structural frequencies alias exactly (integer combinations
    // of the same drive frequencies) act as one drive; the matching test
    // |f - 2 delta| <= tol |p| therefore applies to the summed amplitude of
    // each frequency group.
    const std::size_t n = terms.size();
    std::vector<int> group(n, -1);
    std::vector<double> gfreq;
    std::vector<std::complex<double>> gsum;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = terms[i].frequency;
        for (std::size_t g = 0; g < gfreq.size(); ++g) {
            if (std::abs(f - gfreq[g]) <= 1e-9 * (std::abs(f) + 1.0)) {
                group[i] = static_cast<int>(g);
                gsum[g] += terms[i].amplitude;
                break;
            }
        }
        if (group[i] < 0) {
            group[i] = static_cast<int>(gfreq.size());
            gfreq.push_back(f);
            gsum.push_back(terms[i].amplitude);
        }
    }
    std::vector<bool> out(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t g = static_cast<std::size_t>(group[i]);
        out[i] = std::abs(gfreq[g] - 2.0 * shift.delta) <=
                 match_tol * std::abs(gsum[g]);
    }
    return out;
}

ResonantRate total_rate(const std::vector<HarmonicTerm>& terms,
                        const FrequencyShift& shift, double match_tol) {
    ResonantRate r;
    r.xi = {0.0, 0.0};
    const std::vector<bool> matched = match_flags(terms, shift, match_tol);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!matched[i]) continue;
        r.xi += terms[i].amplitude;
        r.contributing.push_back(terms[i].label);
    }
    r.magnitude = std::abs(r.xi);
    r.phase = r.magnitude > 0.0 ? std::arg(r.xi) : 0.0;
    return r;
}

std::vector<HarmonicTerm> slow_terms(const std::vector<HarmonicTerm>& terms,
                                     const FrequencyShift& shift, double c) {
    std::vector<HarmonicTerm> out;
    const std::vector<bool> matched = match_flags(terms, shift, c);
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (matched[i]) out.push_back(terms[i]);
    return out;
}

} // namespace rabi
