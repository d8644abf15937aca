#include "photon_smatrix/app/selftest.hpp"

#include "photon_smatrix/app/commands.hpp"
#include "photon_smatrix/photon_smatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace psm::app {

namespace {

using S = Scatterer<double>;
using P = TwoPhotonPoint<double>;
using C = Complex<double>;

struct Draws {
    std::mt19937_64 rng;

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

    S v_atom(int n_max) {
        const int n = integer(1, n_max);
        std::vector<double> d, g;
        for (int i = 0; i < n; ++i) {
            d.push_back(uniform(-3, 3));
            g.push_back(uniform(0.2, 2));
        }
        return S::v_atom(d, g);
    }

    // Point with every photon energy at least `guard` from every level.
    P point(const S& s, double guard) {
        for (;;) {
            const P pt{uniform(-4, 4), uniform(-4, 4), uniform(-4, 4)};
            bool ok = true;
            for (double e : {pt.k1, pt.k2, pt.p1, pt.p2()}) {
                for (Eigen::Index n = 0; n < s.size(); ++n) ok = ok && std::abs(e - s.deltas(n)) > guard;
            }
            if (ok) return pt;
        }
    }
};

double min_decay(const S& s) {
    double out = std::numeric_limits<double>::infinity();
    for (const auto& p : poles(s)) out = std::min(out, -p.imag());
    return out;
}

double min_spacing(const S& s) {
    std::vector<double> d(s.deltas.begin(), s.deltas.end());
    std::sort(d.begin(), d.end());
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < d.size(); ++i) out = std::min(out, d[i] - d[i - 1]);
    return out;
}

double relative(C a, C b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

PropertyResult make(std::string name, double dev, double tol) { return {std::move(name), dev, tol, dev < tol}; }

}  // namespace

bool SelftestReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

void SelftestReport::print(std::ostream& os) const {
    for (const auto& p : properties) {
        os << (p.passed ? "PASS " : "FAIL ") << p.name << " max_deviation=" << format_number(p.max_deviation)
           << " tolerance=" << format_number(p.tolerance) << '\n';
    }
    os << (passed() ? "selftest passed" : "selftest FAILED") << '\n';
}

SelftestReport run_selftest(const SelftestOptions& opts) {
    Draws draw{std::mt19937_64(opts.seed)};
    SelftestReport rep;

    double phase = 0;
    for (int i = 0; i < 500; ++i) {
        const S s = draw.v_atom(6);
        phase = std::max(phase, std::abs(std::abs(t_chiral(s, draw.uniform(-5, 5))) - 1));
    }
    rep.properties.push_back(make("chiral_phase", phase, 1e-12));

    double simplified = 0, closed = 0;
    for (int i = 0; i < 500; ++i) {
        const S s = draw.v_atom(2);
        const P pt = draw.point(s, 1e-3);
        const C ref = t2_general(s, pt);
        simplified = std::max(simplified, relative(t2_simplified(s, pt) + opts.perturbation, ref));
        if (s.size() == 2) closed = std::max(closed, relative(t2_v2_closed(s, pt), ref));
    }
    rep.properties.push_back(make("three_path_simplified", simplified, 1e-9));
    rep.properties.push_back(make("three_path_closed_n2", closed, 1e-9));

    double n1 = 0;
    for (int i = 0; i < 200; ++i) {
        const S s = draw.v_atom(1);
        const P pt = draw.point(s, 1e-3);
        const double g = s.gammas(0), d = s.deltas(0);
        auto sk = [&](double k) { return std::sqrt(2 * g) / C(k - d, g); };
        const C expected = std::sqrt(2 * g) / std::numbers::pi * sk(pt.p2()) * sk(pt.p1) * (sk(pt.k1) + sk(pt.k2));
        n1 = std::max(n1, relative(t2_general(s, pt), expected));
    }
    rep.properties.push_back(make("n1_closed_form", n1, 1e-12));

    double sym = 0;
    for (int i = 0; i < 200; ++i) {
        const S s = draw.v_atom(4);
        const P pt = draw.point(s, 0);
        const C ref = t2_general(s, pt);
        for (const P& q : {pt.swap_outgoing(), pt.swap_incoming(), pt.time_reversed()}) {
            sym = std::max(sym, relative(t2_general(s, q), ref));
        }
    }
    rep.properties.push_back(make("exchange_and_time_reversal", sym, 1e-10));

    double quench = 0;
    for (int i = 0; i < 20; ++i) {
        S s = draw.v_atom(4);
        while (min_spacing(s) < 0.3) s = draw.v_atom(4);
        const auto roots = crit_roots(s).roots;
        for (std::size_t a = 0; a < roots.size(); ++a) {
            const auto r = verify_two_photon_crit(s, roots[a], roots[(a + 1) % roots.size()], {-1.3, 0.2, 2.7});
            quench = std::max({quench, r.max_incoming, r.max_outgoing});
        }
    }
    rep.properties.push_back(make("two_photon_crit_quench", quench, 1e-10));

    double oracle1 = 0, oracle2 = 0;
    for (int i = 0; i < 4; ++i) {
        S s = draw.v_atom(3);
        while (min_decay(s) < 0.05) s = draw.v_atom(3);
        const double k = draw.uniform(-3, 3);
        oracle1 = std::max(oracle1, (oracle_single(s, k) - amplitudes_s(s, k)).cwiseAbs().maxCoeff());
        const P pt = draw.point(s, 0);
        oracle2 = std::max(oracle2, std::abs(oracle_two_photon(s, pt) - t2_general(s, pt)));
    }
    {
        const S two = S::two_2ls({0.7, -0.4}, {0.8, 1.3});
        const P pt{0.3, -0.9, 1.1};
        oracle2 = std::max(oracle2, std::abs(oracle_two_photon(two, pt) - t2_two2ls(two, pt)));
    }
    rep.properties.push_back(make("oracle_single_photon", oracle1, 1e-6));
    rep.properties.push_back(make("oracle_two_photon", oracle2, 1e-5));
    return rep;
}

}  // namespace psm::app
