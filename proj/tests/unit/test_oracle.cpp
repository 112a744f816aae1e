#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sei/error.hpp"
#include "sei/fft.hpp"
#include "sei/oracle.hpp"

using namespace sei;

namespace {

constexpr double kPi = std::numbers::pi;

// Inverse Fourier transform of the radial bump (1 - |xi|^2/rho^2)^k in 2-D.
double bump_inverse_ft(double rho, int k, double u) {
    const double a = 2.0 * kPi * rho * u;
    if (a < 1e-8) return kPi * rho * rho / (k + 1);
    return 2.0 * kPi * rho * rho * std::pow(2.0, k) * std::tgamma(k + 1.0) *
           std::cyl_bessel_j(k + 1.0, a) / std::pow(a, k + 1);
}

FilterSpec bump_filter(double radius, int order = 3) {
    return FilterSpec::from(SpectrumFn::bump({0, 0}, radius, 1.0, order));
}

}  // namespace

TEST(SpectrumFn, Primitives) {
    auto b = SpectrumFn::bump({0.1, 0.0}, 0.2, Cplx(2.0, 0.0), 2);
    EXPECT_DOUBLE_EQ(b.support(), 0.3);
    EXPECT_DOUBLE_EQ(b({0.1, 0.0}).real(), 2.0);
    EXPECT_NEAR(b({0.2, 0.0}).real(), 2.0 * 0.75 * 0.75, 1e-15);
    EXPECT_EQ(b({0.35, 0.0}), Cplx(0.0));
    auto d = SpectrumFn::disc(0.5, 3.0);
    EXPECT_EQ(d({0.49, 0.0}), Cplx(3.0));
    EXPECT_EQ(d({0.0, 0.5}), Cplx(0.0));
    EXPECT_EQ(SpectrumFn()({0, 0}), Cplx(0.0));
    EXPECT_TRUE(std::isinf(SpectrumFn::constant(1.0).support()));
    EXPECT_DOUBLE_EQ(SpectrumFn::sum({b, d}).support(), 0.5);
    EXPECT_DOUBLE_EQ(spectrum_multiply(b, d).support(), 0.3);
    EXPECT_THROW(SpectrumFn::bump({0, 0}, 0.0, 1.0), ValidationError);
}

TEST(SpectrumFn, DilationAndScaling) {
    auto b = SpectrumFn::bump({0, 0}, 0.4, 1.0, 3);
    auto z = scale_spectrum(b, 0.5);
    EXPECT_DOUBLE_EQ(z.support(), 0.8);
    EXPECT_NEAR(z({0.4, 0.0}).real(), 0.25 * b({0.2, 0.0}).real(), 1e-15);
    auto z1 = scale_spectrum(b, 0.5, 1);
    EXPECT_NEAR(z1({0.4, 0.0}).real(), 0.5 * b({0.2, 0.0}).real(), 1e-15);
    EXPECT_EQ(scale_spectrum(b, 1.0).node(), b.node());
    EXPECT_THROW(scale_spectrum(b, 0.0), ValidationError);
}

TEST(SpectrumFn, TranslationAndRotation) {
    auto b = SpectrumFn::bump({0.1, 0.05}, 0.2, Cplx(0.5, -0.3), 3);
    auto t = translate_spectrum(b, {3.0, -1.5});
    const Freq xi{0.12, 0.1};
    EXPECT_NEAR(std::abs(t(xi)), std::abs(b(xi)), 1e-15);
    EXPECT_NEAR(std::arg(t(xi) / b(xi)), std::remainder(-2 * kPi * (0.12 * 3.0 - 0.1 * 1.5), 2 * kPi), 1e-12);
    auto r = rotate_spectrum(b, kPi / 2);
    // The bump centre (0.1, 0.05) moves to (-0.05, 0.1).
    EXPECT_NEAR(r({-0.05, 0.1}).real(), b({0.1, 0.05}).real(), 1e-15);
    EXPECT_EQ(r.support(), b.support());
}

TEST(SpectrumFn, Quotient) {
    auto num = SpectrumFn::disc(1.0, 2.0);
    auto den = SpectrumFn::bump({0, 0}, 0.5, 1.0, 1);
    auto q = spectrum_quotient(num, den, 0.4);
    EXPECT_NEAR(q({0.25, 0.0}).real(), 2.0 / 0.75, 1e-14);
    EXPECT_EQ(q({0.45, 0.0}), Cplx(0.0));
    auto bad = spectrum_quotient(num, den, 0.9);
    EXPECT_THROW(bad({0.6, 0.0}), NumericalError);
}

TEST(ScaleSpectrum, MatchesTheTransformOfADilatedImage) {
    // z(u / s) sampled on a unit grid, transformed with the DFT, against
    // s^2 z^(s xi) evaluated in closed form.
    const std::size_t n = 256;
    const double rho = 0.2, s = 0.8;
    const int order = 6;
    std::vector<double> img(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double u = std::hypot(static_cast<double>(fft::signed_bin(i, n)),
                                        static_cast<double>(fft::signed_bin(j, n)));
            img[i * n + j] = bump_inverse_ft(rho, order, u / s);
        }
    const auto numeric = fft::dft2_real(img, n, n);
    const auto exact = render_spectrum(scale_spectrum(SpectrumFn::bump({0, 0}, rho, 1.0, order), s), n);
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        diff = std::max(diff, std::abs(numeric[i] - exact[i]));
        peak = std::max(peak, std::abs(exact[i]));
    }
    EXPECT_NEAR(peak, s * s, 1e-15);
    EXPECT_LT(diff / peak, 1e-6);
}

TEST(RenderSpectrum, BinOrder) {
    auto f = SpectrumFn::bump({2.0 / 16, -1.0 / 16}, 0.05, 1.0, 2);
    auto grid = render_spectrum(f, 16);
    EXPECT_EQ(grid[2 * 16 + 15], Cplx(1.0));
    EXPECT_EQ(grid[0], Cplx(0.0));
}

TEST(FilterSafeRadius, ClosedForms) {
    // (1 - t^2)^3 >= 1e-6  <=>  t <= sqrt(0.99).
    EXPECT_NEAR(filter_safe_radius(bump_filter(0.4)), 0.4 * std::sqrt(0.99), 2e-6);
    EXPECT_NEAR(filter_safe_radius(FilterSpec::from(SpectrumFn::disc(0.3))), 0.3, 2e-6);
    EXPECT_NEAR(filter_safe_radius(bump_filter(0.4), 1e-6, 1), 0.4 * std::sqrt(0.99), 2e-6);
    EXPECT_NEAR(theorem2_choose_s(bump_filter(0.4), 0.3), 0.3 / (0.4 * std::sqrt(0.99)), 1e-4);
}

TEST(FilterSafeRadius, AnisotropicFilterUsesTheWorstDirection) {
    // Off-centre bump pair: radius along the y axis is limited by the lobes.
    auto h = SpectrumFn::sum({SpectrumFn::bump({0, 0}, 0.2, 1.0, 3), SpectrumFn::bump({0.15, 0}, 0.2, 1.0, 3),
                              SpectrumFn::bump({-0.15, 0}, 0.2, 1.0, 3)});
    const double r2 = filter_safe_radius(FilterSpec::from(h), 1e-6, 2);
    const double r1 = filter_safe_radius(FilterSpec::from(h), 1e-6, 1);
    EXPECT_LT(r2, r1);
    EXPECT_NEAR(r2, 0.2 * std::sqrt(1 - std::pow(1e-6 * std::abs(h({0, 0})), 1.0 / 3)), 1e-4);
}

TEST(FilterSafeRadius, Hypotheses) {
    auto hole = FilterSpec::from(SpectrumFn::bump({0.2, 0}, 0.1, 1.0));
    EXPECT_THROW(filter_safe_radius(hole), HypothesisError);
    EXPECT_THROW(filter_safe_radius(FilterSpec::from(SpectrumFn::constant(1.0))), HypothesisError);
    EXPECT_THROW(filter_safe_radius(bump_filter(0.4), 0.0), ValidationError);
    EXPECT_THROW(filter_safe_radius(bump_filter(0.4), 1e-6, 3), ValidationError);
    EXPECT_THROW(theorem2_choose_s(bump_filter(0.4), 0.0), ValidationError);
}

TEST(Theorem2Recover, ExactOnASingleMember) {
    auto h = bump_filter(0.2);
    auto phi = bump_filter(0.4);
    const double s = theorem2_choose_s(h, phi.bandwidth);
    auto z = SpectrumFn::bump({0.05, -0.02}, 0.3, Cplx(1.0, 0.5), 4);
    auto x = theorem2_recover(spectrum_multiply(h.spectrum, z), h, phi, s);
    Rng rng(1);
    auto freqs = sample_frequencies(rng, 500, 0.5);
    auto expected = spectrum_multiply(phi.spectrum, scale_spectrum(z, 1.0 / s));
    EXPECT_LT(relative_mismatch(x, expected, freqs), 1e-12);
    EXPECT_THROW(theorem2_recover(spectrum_multiply(h.spectrum, z), h, phi, 0.5 * s), HypothesisError);
}

TEST(Theorem2SetCheck, TwoDimensional) {
    Rng rng(2);
    std::vector<SpectrumFn> seeds;
    for (int i = 0; i < 3; ++i) seeds.push_back(random_seed_spectrum(rng, 0.35));
    auto rep = theorem2_set_check(seeds, bump_filter(0.15), bump_filter(0.3), {0.7, 1.0, 1.3}, 5, 400);
    EXPECT_EQ(rep.set_size, 27u);
    EXPECT_GT(rep.s, 1.0);
    EXPECT_LT(rep.max_mismatch(), 1e-10);
    EXPECT_TRUE(rep.passed());
    // With a 2-D Jacobian, dropping to s^1 leaves a factor s mismatch.
    EXPECT_NEAR(rep.mismatch_power1, std::abs(rep.s - 1.0), 1e-8);
    auto j = to_json(rep);
    EXPECT_EQ(j["exact_convention"], "s^dim");
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Theorem2SetCheck, OneDimensional) {
    Rng rng(3);
    std::vector<SpectrumFn> seeds{random_seed_spectrum(rng, 0.35, 3, 1), random_seed_spectrum(rng, 0.35, 2, 1)};
    auto rep = theorem2_set_check(seeds, bump_filter(0.15), bump_filter(0.3), {0.8, 1.0}, 6, 300, 1);
    EXPECT_TRUE(rep.passed());
    EXPECT_LT(rep.mismatch_power1, 1e-10);
    EXPECT_EQ(to_json(rep)["exact_convention"], "s^1 and s^dim");
}

TEST(Theorem2SetCheck, Errors) {
    EXPECT_THROW(theorem2_set_check({}, bump_filter(0.15), bump_filter(0.3), {1.0}), ValidationError);
    Rng rng(4);
    EXPECT_THROW(theorem2_set_check({random_seed_spectrum(rng, 0.3)}, bump_filter(0.15), bump_filter(0.3), {}),
                 ValidationError);
}

TEST(RandomSeedSpectrum, HermitianAndBandlimited) {
    Rng rng(5);
    auto z = random_seed_spectrum(rng, 0.3);
    EXPECT_LE(z.support(), 0.3 + 1e-15);
    auto freqs = sample_frequencies(rng, 200, 0.35);
    for (const auto& xi : freqs) {
        const Cplx a = z(xi), b = z({-xi[0], -xi[1]});
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
    }
}

TEST(SampleFrequencies, StayInTheBall) {
    Rng rng(6);
    for (const auto& xi : sample_frequencies(rng, 1000, 0.7)) EXPECT_LE(std::hypot(xi[0], xi[1]), 0.7);
    for (const auto& xi : sample_frequencies(rng, 100, 0.7, 1)) EXPECT_EQ(xi[1], 0.0);
}

TEST(RelativeMismatch, Definition) {
    std::vector<Freq> at{{0.0, 0.0}};
    EXPECT_DOUBLE_EQ(relative_mismatch(SpectrumFn::constant(3.0), SpectrumFn::constant(2.0), at), 0.5);
    EXPECT_DOUBLE_EQ(relative_mismatch(SpectrumFn::constant(3.0), SpectrumFn(), at), 3.0);
}

TEST(Theorem1, CounterexampleHolds) {
    auto rep = theorem1_counterexample(bump_filter(0.15), bump_filter(0.3), 7, 10, 500);
    EXPECT_TRUE(rep.passed());
    EXPECT_GT(rep.witness_energy_above_xi_h, 0.0);
    EXPECT_DOUBLE_EQ(rep.witness_support, 0.3);
    EXPECT_FALSE(rep.witness_in_x1);
    EXPECT_EQ(rep.measurement_energy_above_xi_h, 0.0);
    auto j = to_json(rep);
    EXPECT_EQ(j["witness"], "phi*phi");
    EXPECT_EQ(j["members"], 10);
}

TEST(Theorem1, NeedsANarrowerFilter) {
    EXPECT_THROW(theorem1_counterexample(bump_filter(0.3), bump_filter(0.3)), HypothesisError);
    EXPECT_THROW(theorem1_counterexample(bump_filter(0.4), bump_filter(0.3)), HypothesisError);
}

TEST(RadialProfiles, CsvLayout) {
    std::ostringstream out;
    write_radial_profiles(out, {{"h", SpectrumFn::disc(0.5, 2.0)}, {"phi", SpectrumFn::bump({0, 0}, 1.0, 1.0, 1)}},
                          1.0, 3);
    EXPECT_EQ(out.str(), "radius,h,phi\n0,2,1\n0.5,0,0.75\n1,0,0\n");
}
