#pragma once

// Closed-form frequency-domain functions and numerical checks of the
// identification results for bandlimited filters:
//   * roto-translations cannot separate image sets that agree below the
//     filter bandwidth (counterexample construction), and
//   * for scale-invariant sets the reconstructions x_y with
//       x_y^(xi) = phi^(xi) y^(xi/s) / (s^dim h^(xi/s)),  |xi| < xi_phi
//     are determined by the measurements alone.
//
// Frequencies are in cycles per unit length. A spectrum in "dim" dimensions
// is evaluated at 2-vectors; 1-D spectra use the first coordinate only.

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sei/rng.hpp"

namespace sei {

using Freq = std::array<double, 2>;
using Cplx = std::complex<double>;

namespace detail {
struct SpectrumNode;
}

/// Immutable compactly supported spectrum. Every node knows a support radius
/// and evaluates to exactly 0 outside it.
class SpectrumFn {
   public:
    /// The zero spectrum.
    SpectrumFn();

    Cplx operator()(const Freq& xi) const;
    /// Radius beyond which the function is identically 0 (may be +inf).
    double support() const;

    static SpectrumFn constant(Cplx value);
    /// amp * (1 - (|xi - center| / radius)^2)^order inside the ball.
    static SpectrumFn bump(const Freq& center, double radius, Cplx amp, int order = 3);
    /// value on the open ball |xi| < radius (ideal low-pass).
    static SpectrumFn disc(double radius, Cplx value = 1.0);
    static SpectrumFn sum(const std::vector<SpectrumFn>& terms);

    explicit SpectrumFn(std::shared_ptr<const detail::SpectrumNode> node);
    const std::shared_ptr<const detail::SpectrumNode>& node() const { return node_; }

   private:
    std::shared_ptr<const detail::SpectrumNode> node_;
};

/// Pointwise product; support is the smaller of the two radii.
SpectrumFn spectrum_multiply(const SpectrumFn& a, const SpectrumFn& b);

/// amplitude * z(factor * xi); support = support(z) / factor.
SpectrumFn dilate_spectrum(const SpectrumFn& z, double factor, double amplitude);

/// Spectrum of the spatially scaled image z(u / s): s^power * z^(s xi) with
/// power = dim by default.
SpectrumFn scale_spectrum(const SpectrumFn& z, double s, int power = 2);

/// Spectrum of z(u - v): exp(-2 pi i <xi, v>) z^(xi).
SpectrumFn translate_spectrum(const SpectrumFn& z, const Freq& v);

/// Spectrum of z(P_theta^-1 u): z^(P_theta^-1 xi).
SpectrumFn rotate_spectrum(const SpectrumFn& z, double theta);

/// num / den on |xi| < band, 0 elsewhere. Evaluating where den vanishes
/// inside the band throws NumericalError.
SpectrumFn spectrum_quotient(const SpectrumFn& num, const SpectrumFn& den, double band);

struct FilterSpec {
    SpectrumFn spectrum;
    double bandwidth = 0.0;
    bool dc_nonzero = false;

    /// Derives bandwidth from the support and dc_nonzero from |f(0)| > 0.
    static FilterSpec from(const SpectrumFn& spectrum);
};

/// Largest radius R_h (resolution `tol`) with |h^| >= tol * |h^(0)| on every
/// sampled circle of radius <= R_h; returns xi_phi / R_h.
double theorem2_choose_s(const FilterSpec& h, double xi_phi, double tol = 1e-6, int dim = 2);

/// R_h as computed by theorem2_choose_s.
double filter_safe_radius(const FilterSpec& h, double tol = 1e-6, int dim = 2);

/// x_y^(xi) = phi^(xi) y^(xi/s) / (s^power h^(xi/s)) on |xi| < xi_phi.
/// Throws HypothesisError when |h^| < tol |h^(0)| somewhere on the
/// band |xi| < xi_phi / s.
SpectrumFn theorem2_recover(const SpectrumFn& y, const FilterSpec& h, const FilterSpec& phi, double s,
                            int power = 2, double tol = 1e-6);

/// Random Hermitian-symmetric spectrum made of `pairs` bump pairs, support
/// at most `max_support`.
SpectrumFn random_seed_spectrum(Rng& rng, double max_support, int pairs = 3, int dim = 2);

/// Frequencies drawn uniformly from the ball of the given radius.
std::vector<Freq> sample_frequencies(Rng& rng, std::size_t count, double radius, int dim = 2);

/// max |a - b| / max |b| over the samples (absolute when b vanishes).
double relative_mismatch(const SpectrumFn& a, const SpectrumFn& b, const std::vector<Freq>& samples);

struct Theorem2Report {
    int dim = 2;
    double s = 0.0;
    double r_h = 0.0;
    double xi_phi = 0.0;
    std::size_t seeds = 0;
    std::size_t set_size = 0;
    std::size_t samples = 0;
    /// {x_y : y in Y} subset of X, with x_y for z_t matched to phi * z_{t/s}.
    double mismatch_recovered_in_x = 0.0;
    /// X subset of {x_y}, with phi * z_t matched to x_y for z_{t s}.
    double mismatch_x_in_recovered = 0.0;
    /// Same two checks with the Jacobian power 1 instead of dim.
    double mismatch_power1 = 0.0;
    double threshold = 1e-10;

    double max_mismatch() const;
    bool passed() const { return max_mismatch() < threshold; }
};

Theorem2Report theorem2_set_check(const std::vector<SpectrumFn>& seeds, const FilterSpec& h,
                                  const FilterSpec& phi, const std::vector<double>& scale_grid,
                                  std::uint64_t sample_seed = 0, std::size_t samples = 1000,
                                  int dim = 2);

struct Theorem1Report {
    double xi_h = 0.0;
    double xi_phi = 0.0;
    double witness_support = 0.0;
    /// Largest |phi^ phi^| found strictly between xi_h and xi_phi.
    double witness_energy_above_xi_h = 0.0;
    bool witness_in_x2 = false;
    bool witness_in_x1 = false;
    bool translation_preserves_support = false;
    bool rotation_preserves_support = false;
    double phase_modulus_error = 0.0;
    double rotation_value_error = 0.0;
    /// max |h^ z^| over sampled |xi| > xi_h for bandwidth-xi_h members z.
    double measurement_energy_above_xi_h = 0.0;
    std::size_t members = 0;

    bool passed() const;
};

/// Requires xi_h < xi_phi (HypothesisError otherwise).
Theorem1Report theorem1_counterexample(const FilterSpec& h, const FilterSpec& phi,
                                       std::uint64_t seed = 0, std::size_t members = 10,
                                       std::size_t samples = 1000);

nlohmann::json to_json(const Theorem2Report& report);
nlohmann::json to_json(const Theorem1Report& report);

/// CSV `radius,<name>...` of |f| sampled along the first axis on [0, radius].
void write_radial_profiles(std::ostream& out,
                           const std::vector<std::pair<std::string, SpectrumFn>>& fns,
                           double radius, std::size_t points);

/// Samples f at the DFT frequencies (k_r / n, k_c / n), k in signed bin
/// order, row-major.
std::vector<Cplx> render_spectrum(const SpectrumFn& f, std::size_t n);

}  // namespace sei
