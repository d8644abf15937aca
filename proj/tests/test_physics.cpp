#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "photon_smatrix/photon_smatrix.hpp"
#include "reference.hpp"

#include <random>

using namespace psm;
using S = Scatterer<double>;
using P = TwoPhotonPoint<double>;
using C = std::complex<double>;

namespace {

struct Rng {
    std::mt19937_64 gen{12345};
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
    S v_atom(int n_min, int n_max) {
        std::vector<double> d, g;
        const int n = integer(n_min, n_max);
        for (int i = 0; i < n; ++i) {
            d.push_back(uniform(-3, 3));
            g.push_back(uniform(0.1, 2));
        }
        return S::v_atom(d, g);
    }
};

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected psm::Error");
    return ErrorCode::ValidationError;
}

}  // namespace

TEST_SUITE("core") {
    TEST_CASE("validation names the violated invariant") {
        CHECK(code_of([] { validate(S::v_atom({}, {})); }) == ErrorCode::ValidationError);
        CHECK(code_of([] { validate(S::v_atom({0, 1}, {1})); }) == ErrorCode::ValidationError);
        CHECK(code_of([] { validate(S::v_atom({0}, {0.0})); }) == ErrorCode::ValidationError);
        CHECK(code_of([] { validate(S::v_atom({0}, {-1.0})); }) == ErrorCode::ValidationError);
        CHECK(code_of([] { validate(S::v_atom({std::nan("")}, {1.0})); }) == ErrorCode::ValidationError);
        CHECK(code_of([] { validate(S::two_2ls({0, 1, 2}, {1, 1, 1})); }) == ErrorCode::ValidationError);
        try {
            validate(S::v_atom({0}, {-1.0}));
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("gamma_1 <= 0") != std::string::npos);
        }
        CHECK_NOTHROW(validate(S::two_2ls({1, -1}, {1, 2})));
    }

    TEST_CASE("error codes render as upper snake case") {
        CHECK(to_string(ErrorCode::GuardBand) == "GUARD_BAND");
        CHECK(to_string(ErrorCode::DarkState) == "DARK_STATE");
        CHECK(to_string(ScattererKind::Two2LS) == "two_2ls");
    }

    TEST_CASE("on-shell point derives p2 and its permutations") {
        const P pt{0.3, -1.1, 0.7};
        CHECK(pt.p2() == doctest::Approx(-1.5));
        CHECK(pt.swap_outgoing().p1 == doctest::Approx(-1.5));
        CHECK(pt.swap_incoming().k1 == -1.1);
        const P tr = pt.time_reversed();
        CHECK(tr.k1 == pt.p1);
        CHECK(tr.k2 == doctest::Approx(pt.p2()));
        CHECK(tr.p1 == pt.k1);
        const P d = P::from_detunings(3.0, 0.5, -0.25);
        CHECK(d.k1 == doctest::Approx(2.0));
        CHECK(d.k2 == doctest::Approx(1.0));
        CHECK(d.p1 == doctest::Approx(1.25));
        CHECK(d.total_energy() == doctest::Approx(3.0));
    }
}

TEST_SUITE("single_photon") {
    TEST_CASE("N=1 matches the closed form and vanishes on resonance") {
        const S s = S::v_atom({0.4}, {0.7});
        for (double k : {-2.0, 0.1, 0.4, 3.0}) {
            CHECK(std::abs(amplitudes_s(s, k)(0) - ref::s1(0.7, 0.4, k)) < 1e-14);
        }
        CHECK(std::abs(t_nonchiral(s, 0.4)) < 1e-12);
        CHECK(std::abs(r_nonchiral(s, 0.4) + 1.0) < 1e-12);
    }

    TEST_CASE("N=2 amplitudes agree with Cramer's rule") {
        const S s = S::v_atom({1.2, -0.3}, {0.5, 1.7});
        for (double k : {-1.0, 0.0, 0.8, 1.2}) {
            const auto [a, b] = ref::s2(1.2, -0.3, 0.5, 1.7, k);
            const auto v = amplitudes_s(s, k);
            CHECK(std::abs(v(0) - a) < 1e-13);
            CHECK(std::abs(v(1) - b) < 1e-13);
            const auto cf = amplitudes_s_n2(s, k);
            CHECK(std::abs(cf[0] - a) < 1e-13);
            CHECK(std::abs(cf[1] - b) < 1e-13);
        }
    }

    TEST_CASE("property: chiral transmission is a pure phase and equals the alpha form") {
        Rng rng;
        for (int i = 0; i < 2000; ++i) {
            const S s = rng.v_atom(1, 6);
            const double k = rng.uniform(-5, 5);
            const C t = t_chiral(s, k);
            CHECK(std::abs(std::abs(t) - 1) < 1e-12);
            CHECK(std::abs(t - ref::t_from_alpha(alpha(s, k))) < 1e-10);
            CHECK(std::abs(t - t_chiral_alpha(s, k)) < 1e-10);
        }
    }

    TEST_CASE("property: non-chiral flux conservation") {
        Rng rng;
        for (int i = 0; i < 1000; ++i) {
            const S s = rng.v_atom(1, 5);
            const double k = rng.uniform(-5, 5);
            CHECK(std::norm(t_nonchiral(s, k)) + std::norm(r_nonchiral(s, k)) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("chirality is enforced") {
        const S chiral = S::v_atom({0}, {1}, Chirality::Chiral);
        CHECK(code_of([&] { t_nonchiral(chiral, 0.5); }) == ErrorCode::ChiralityMismatch);
        CHECK_NOTHROW(t_chiral(chiral, 0.5));
        const auto amps = single_amplitudes(chiral, 0.5);
        CHECK_FALSE(amps.t.has_value());
    }

    TEST_CASE("alpha is undefined exactly on a level") {
        const S s = S::v_atom({0.5, -0.5}, {1, 1});
        CHECK(code_of([&] { alpha(s, 0.5); }) == ErrorCode::PoleAtLevel);
        CHECK_FALSE(single_amplitudes(s, 0.5).alpha.has_value());
        CHECK(alpha(s, 0.0) == doctest::Approx(0.0));
        CHECK(beta(s, 1.0, 2.0) == doctest::Approx(1.0 / (0.5 * 1.5) + 1.0 / (1.5 * 2.5)));
    }

    TEST_CASE("poles match the 2x2 quadratic formula") {
        for (double d : {0.0, 0.3, 1.0, 1.7, 2.0, 5.0}) {
            const S s = S::v_atom({d, -d}, {1, 1});
            const auto p = poles(s);
            const auto [l1, l2] = ref::eig2(C(d, -1), C(0, -1), C(0, -1), C(-d, -1));
            REQUIRE(p.size() == 2);
            // At the exceptional point the eigenvalues are only accurate to sqrt(eps).
            const double tol = d == 1.0 ? 1e-7 : 1e-10;
            CHECK(std::abs(p[0] - l1) < tol);
            CHECK(std::abs(p[1] - l2) < tol);
            CHECK((p[0] + p[1]).imag() == doctest::Approx(-2.0).epsilon(1e-12));
        }
    }

    TEST_CASE("property: poles are the singularities of s_k") {
        Rng rng;
        for (int i = 0; i < 50; ++i) {
            const S s = rng.v_atom(1, 4);
            for (const auto& lambda : poles(s)) {
                const C near = lambda + C(1e-7, 0);
                CHECK(amplitudes_s(s, near).norm() > 1e3);
            }
        }
    }

    TEST_CASE("long double instantiation") {
        const auto s = Scatterer<long double>::v_atom({0.0L, 1.0L}, {1.0L, 1.0L});
        CHECK(std::abs(std::abs(t_chiral(s, 0.3L)) - 1.0L) < 1e-15L);
    }
}

TEST_SUITE("two_photon") {
    TEST_CASE("N=1 reduction of every path") {
        const S s = S::v_atom({0}, {1});
        CHECK(std::abs(t2_general(s, P{0, 0, 0}) - C(0, 8 / std::numbers::pi)) < 1e-12);
        Rng rng;
        for (int i = 0; i < 500; ++i) {
            const double d = rng.uniform(-2, 2), g = rng.uniform(0.2, 2);
            const S one = S::v_atom({d}, {g});
            const P pt{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
            const C expected = ref::t2_n1(g, d, pt.k1, pt.k2, pt.p1);
            const double scale = std::max(1.0, std::abs(expected));
            CHECK(std::abs(t2_general(one, pt) - expected) / scale < 1e-12);
            CHECK(std::abs(t2_simplified(one, pt) - expected) / scale < 1e-11);
        }
    }

    TEST_CASE("property: three analytic paths agree") {
        Rng rng;
        for (int i = 0; i < 3000; ++i) {
            const S s = rng.v_atom(2, 2);
            const P pt{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
            const C g = t2_general(s, pt);
            const double scale = std::max(1.0, std::abs(g));
            CHECK(std::abs(t2_v2_closed(s, pt) - g) / scale < 1e-9);
            try {
                CHECK(std::abs(t2_simplified(s, pt) - g) / scale < 1e-9);
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::GuardBand);
            }
        }
    }

    TEST_CASE("property: exchange and time-reversal symmetry") {
        Rng rng;
        for (int i = 0; i < 1000; ++i) {
            const S s = rng.v_atom(1, 5);
            const P pt{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
            const C t = t2_general(s, pt);
            const double tol = 1e-10 * std::max(1.0, std::abs(t));
            CHECK(std::abs(t2_general(s, pt.swap_outgoing()) - t) < tol);
            CHECK(std::abs(t2_general(s, pt.swap_incoming()) - t) < tol);
            CHECK(std::abs(t2_general(s, pt.time_reversed()) - t) < tol);
        }
        const S two = S::two_2ls({0.4, -1.0}, {0.6, 1.4});
        const P pt{0.2, -0.7, 1.3};
        const C t = t2_two2ls(two, pt);
        CHECK(std::abs(t2_two2ls(two, pt.swap_outgoing()) - t) < 1e-12);
        CHECK(std::abs(t2_two2ls(two, pt.swap_incoming()) - t) < 1e-12);
        CHECK(std::abs(t2_two2ls(two, pt.time_reversed()) - t) < 1e-12);
    }

    TEST_CASE("flat band behaves as one level with summed rate") {
        const S flat = S::v_atom({0.3, 0.3, 0.3, 0.3, 0.3}, {0.4, 0.4, 0.4, 0.4, 0.4});
        const S one = S::v_atom({0.3}, {2.0});
        for (const P& pt : {P{0, 0, 0}, P{1.1, -0.4, 0.9}, P{-2, 0.5, 0.3}}) {
            CHECK(std::abs(t2_general(flat, pt) - t2_general(one, pt)) < 1e-10);
            CHECK(std::abs(t_chiral(flat, pt.k1) - t_chiral(one, pt.k1)) < 1e-10);
        }
    }

    TEST_CASE("level structure is visible in two-photon scattering") {
        const S v = S::v_atom({0.8, -0.5}, {1.0, 0.6});
        const S two = S::two_2ls({0.8, -0.5}, {1.0, 0.6});
        const P pt{0.9, 0.1, -0.4};
        CHECK(std::abs(t2_v2_closed(v, pt) - t2_two2ls(two, pt)) > 1e-6);
        CHECK(std::abs(t_chiral(v, 0.9) - t_chiral(two, 0.9)) < 1e-15);
    }

    TEST_CASE("two 2LS at matched rates quench on the collective resonance") {
        const S two = S::two_2ls({1.0, -1.0}, {1.0, 1.0});
        for (double x : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
            CHECK(std::abs(t2_two2ls(two, P{x, -x, 0.3})) < 1e-12);
        }
        const S unequal = S::two_2ls({1.0, -1.0}, {0.5, 1.0});
        CHECK(std::abs(t2_two2ls(unequal, P{0.3, -0.3, 0.1})) > 1e-4);
    }

    TEST_CASE("kind and guard band errors") {
        const S v = S::v_atom({0.5, -0.5}, {1, 1});
        CHECK(code_of([&] { t2_two2ls(v, P{0, 0, 0}); }) == ErrorCode::KindMismatch);
        CHECK(code_of([&] { t2_simplified(v, P{0.5, 0, 0.1}); }) == ErrorCode::GuardBand);
        CHECK(code_of([&] { t2_simplified(v, P{0.1, 0.2, 0.5 + 5e-7}); }) == ErrorCode::GuardBand);
        CHECK_NOTHROW(t2_general(v, P{0.5, 0.5, 0.5}));
        CHECK(code_of([&] { t2_v2_closed(S::v_atom({0}, {1}), P{0, 0, 0}); }) == ErrorCode::KindMismatch);
    }

    TEST_CASE("non-chiral value and signed-momentum helper") {
        const S s = S::v_atom({0.5, -0.5}, {1, 1});
        const P pt{0.7, 0.2, 0.4};
        const C tc = t2_chiral(s, pt);
        CHECK(std::abs(t2_nonchiral(s, pt, Direction::Left, Direction::Right) - tc / 4.0) < 1e-15);
        CHECK(std::abs(t2_nonchiral_momenta(s, 0.7, 0.2, -0.4, 0.5) - tc / 4.0) < 1e-15);
        CHECK(code_of([&] { t2_nonchiral_momenta(s, -0.7, 0.2, 0.4, -0.9); }) == ErrorCode::ValidationError);
        CHECK(code_of([&] { t2_nonchiral_momenta(s, 0.7, 0.2, 0.4, 0.4); }) == ErrorCode::OnshellViolation);
        const S chiral = S::v_atom({0}, {1}, Chirality::Chiral);
        CHECK(code_of([&] { t2_nonchiral(chiral, pt); }) == ErrorCode::ChiralityMismatch);
    }

    TEST_CASE("elastic coefficients are products of transmissions") {
        const S s = S::v_atom({0.2}, {0.9});
        const auto r = two_photon(s, P{0.5, -0.1, 0.3});
        CHECK(std::abs(r.elastic_direct - t_chiral(s, 0.5) * t_chiral(s, -0.1)) < 1e-15);
        CHECK(std::abs(r.elastic_exchange - r.elastic_direct) < 1e-15);
    }

    TEST_CASE("fluorescence map symmetry, zero cross and thread independence") {
        const S s = S::v_atom({1.5, -1.5}, {1, 1});
        std::vector<double> grid;
        for (int i = -10; i <= 10; ++i) grid.push_back(0.3 * i);
        const auto map = fluorescence_map(s, 3.0, grid, grid, 1);
        const auto map4 = fluorescence_map(s, 3.0, grid, grid, 4);
        CHECK((map.values.array() == map4.values.array()).all());
        const Eigen::Index n = map.values.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const C v = map.values(i, j);
                CHECK(std::abs(map.values(n - 1 - i, j) - v) < 1e-10);
                CHECK(std::abs(map.values(i, n - 1 - j) - v) < 1e-10);
            }
        }
        Eigen::Index mi, mj;
        map.intensity().maxCoeff(&mi, &mj);
        CHECK(grid[static_cast<std::size_t>(mi)] == 0.0);
        CHECK(grid[static_cast<std::size_t>(mj)] == 0.0);

        const auto zero = fluorescence_map(S::v_atom({1.0, -1.0}, {1, 1}), 0.0, grid, grid);
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(std::abs(zero.values(i, 10)) < 1e-12);
            CHECK(std::abs(zero.values(10, i)) < 1e-12);
        }
        const auto quenched = fluorescence_map(S::two_2ls({1.0, -1.0}, {1, 1}), 0.0, grid, grid);
        CHECK(quenched.values.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_SUITE("crit") {
    TEST_CASE("N=2 root is the rate-weighted level average") {
        Rng rng;
        for (int i = 0; i < 200; ++i) {
            const double d1 = rng.uniform(-3, 3), d2 = d1 + rng.uniform(0.01, 3);
            const double g1 = rng.uniform(0.1, 3), g2 = rng.uniform(0.1, 3);
            const S s = S::v_atom({d1, d2}, {g1, g2});
            const auto set = crit_roots(s);
            REQUIRE(set.roots.size() == 1);
            CHECK(std::abs(set.roots[0] - (g2 * d1 + g1 * d2) / (g1 + g2)) < 1e-10);
            CHECK(verify_single_crit(s, set.roots[0]).passed);
        }
    }

    TEST_CASE("N=3 symmetric roots are the zeros of 3k^2 - 1") {
        const S s = S::v_atom({-1, 0, 1}, {1, 1, 1});
        const auto poly = crit_polynomial(s);
        REQUIRE(poly.size() == 3);
        CHECK(poly[0] == doctest::Approx(-1));
        CHECK(poly[1] == doctest::Approx(0).epsilon(1e-15));
        CHECK(poly[2] == doctest::Approx(3));
        const auto set = crit_roots(s);
        REQUIRE(set.roots.size() == 2);
        CHECK(std::abs(set.roots[0] + 1 / std::sqrt(3.0)) < 1e-12);
        CHECK(std::abs(set.roots[1] - 1 / std::sqrt(3.0)) < 1e-12);
    }

    TEST_CASE("property: roots interlace the levels and match bisection") {
        Rng rng;
        for (int i = 0; i < 300; ++i) {
            const int n = rng.integer(2, 7);
            std::vector<double> d, g;
            for (int j = 0; j < n; ++j) {
                d.push_back(rng.uniform(-4, 4));
                g.push_back(rng.uniform(0.05, 3));
            }
            std::vector<double> sorted = d;
            std::sort(sorted.begin(), sorted.end());
            bool separated = true;
            for (std::size_t j = 1; j < sorted.size(); ++j) separated = separated && sorted[j] - sorted[j - 1] > 0.05;
            if (!separated) continue;
            const S s = S::v_atom(d, g);
            const auto set = crit_roots(s);
            const auto expected = ref::alpha_roots_bisection(d, g);
            std::sort(d.begin(), d.end());
            REQUIRE(set.roots.size() == expected.size());
            for (std::size_t j = 0; j < set.roots.size(); ++j) {
                CHECK(set.roots[j] > d[j]);
                CHECK(set.roots[j] < d[j + 1]);
                CHECK(std::abs(set.roots[j] - expected[j]) < 1e-9 * std::max(1.0, d[j + 1] - d[j]));
                CHECK(set.residuals[j] < 1e-9);
            }
        }
    }

    TEST_CASE("nearly degenerate levels fail the residual check") {
        // alpha' ~ gamma / spacing^2 puts |alpha| at one ulp of k far above the threshold.
        CHECK(code_of([] { crit_roots(S::v_atom({0.0, 1e-7, 1.0}, {1, 1, 1})); }) == ErrorCode::RootQuality);
    }

    TEST_CASE("degenerate levels merge and a single level has no root") {
        CHECK(crit_roots(S::v_atom({0.3}, {1})).roots.empty());
        CHECK(crit_roots(S::v_atom({0.3, 0.3}, {1, 2})).roots.empty());
        const auto set = crit_roots(S::v_atom({-1, -1, 1}, {0.5, 0.5, 1}));
        REQUIRE(set.roots.size() == 1);
        CHECK(set.roots[0] == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("property: two-photon quench with photons at roots") {
        Rng rng;
        std::vector<double> samples;
        for (int i = 0; i <= 40; ++i) samples.push_back(-4 + 0.2 * i);
        for (int i = 0; i < 40; ++i) {
            std::vector<double> d{rng.uniform(-3, -1), rng.uniform(-0.5, 0.5), rng.uniform(1, 3)};
            std::vector<double> g{rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.2, 2)};
            const S s = S::v_atom(d, g);
            const auto r = crit_roots(s).roots;
            for (auto [a, b] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
                const auto rep = verify_two_photon_crit(s, r[a], r[b], samples);
                CHECK(rep.passed);
            }
        }
        const auto two = S::two_2ls({1, -1}, {0.5, 1});
        CHECK_FALSE(verify_two_photon_crit(two, 0.0, 0.0, samples).passed);
    }

    TEST_CASE("quench scan contrasts the two level structures") {
        const auto rows = quench_scan<double>({0.25, 0.5, 1, 2, 4}, 1.0, 1.0);
        REQUIRE(rows.size() == 5);
        for (const auto& r : rows) {
            CHECK(r.abs_t2_v < 1e-20);
            CHECK(r.k_crit == doctest::Approx((1.0 * 1 - r.gamma1) / (r.gamma1 + 1)));
        }
        CHECK(rows[2].abs_t2_2ls < 1e-20);
        CHECK(rows[1].abs_t2_2ls > 1e-8);
        CHECK(rows[3].abs_t2_2ls > 1e-8);
        // 2LS values in units of the chiral |T|^2 / 16.
        CHECK(rows[0].abs_t2_2ls * 16 == doctest::Approx(1.668).epsilon(1e-3));
        CHECK(rows[4].abs_t2_2ls * 16 == doctest::Approx(48.5).epsilon(1e-3));
    }
}

TEST_SUITE("oracle") {
    TEST_CASE("time integration reproduces the resolvent") {
        const S s = S::v_atom({0.6, -0.9, 0.1}, {0.7, 1.1, 0.4});
        for (double k : {-1.3, 0.05, 2.2}) {
            CHECK((oracle_single(s, k) - amplitudes_s(s, k)).cwiseAbs().maxCoeff() < 1e-6);
        }
        ComplexVector<double> f(3);
        f << C(1, 0.5), C(-0.2, 0), C(0, 1);
        const ComplexVector<double> expected = (C(0.4) * ComplexMatrix<double>::Identity(3, 3) - a_matrix(s)).inverse() * f;
        CHECK((oracle_resolvent(s, 0.4, f) - expected).cwiseAbs().maxCoeff() < 1e-6);
    }

    TEST_CASE("two-photon oracle for both level structures") {
        const S v = S::v_atom({0.6, -0.9}, {0.7, 1.1});
        const S two = S::two_2ls({0.6, -0.9}, {0.7, 1.1});
        const P pt{0.35, -0.8, 1.05};
        CHECK(std::abs(oracle_two_photon(v, pt) - t2_general(v, pt)) < 1e-5);
        CHECK(std::abs(oracle_two_photon(two, pt) - t2_two2ls(two, pt)) < 1e-5);
    }

    TEST_CASE("oracle preconditions") {
        const S v = S::v_atom({0.5, -0.5}, {1, 1});
        CHECK(code_of([&] { oracle_two_photon(v, P{0.2, 0.1, 0.2}); }) == ErrorCode::OnshellViolation);
        // Equal levels with equal rates carry an exactly dark combination.
        const S dark = S::v_atom({0.2, 0.2}, {1, 1});
        CHECK(code_of([&] { oracle_single(dark, 0.1); }) == ErrorCode::DarkState);
        IntegratorConfig<double> coarse{0.5, 100};
        CHECK(code_of([&] { oracle_single<double>(v, 0.1, coarse); }) == ErrorCode::ValidationError);
        IntegratorConfig<double> short_run{0.001, 1};
        CHECK(code_of([&] { oracle_single<double>(v, 0.1, short_run); }) == ErrorCode::ValidationError);
    }

    TEST_CASE("automatic configuration satisfies its own checks") {
        const auto cfg = IntegratorConfig<double>::automatic(3.0, 0.2, 2.0);
        CHECK_NOTHROW(cfg.check(3.0, 0.2, 2.0));
        CHECK(cfg.t_final >= 20 / 0.2);
    }
}
