#include "sei/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "sei/dataset.hpp"
#include "sei/error.hpp"
#include "sei/fft.hpp"

namespace sei {

namespace detail {

struct SpectrumNode {
    virtual ~SpectrumNode() = default;
    virtual Cplx eval(const Freq& xi) const = 0;
    double support = 0.0;
};

}  // namespace detail

namespace {

using detail::SpectrumNode;
using NodePtr = std::shared_ptr<const SpectrumNode>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const Freq& xi) { return std::hypot(xi[0], xi[1]); }

struct Zero final : SpectrumNode {
    Zero() { support = 0.0; }
    Cplx eval(const Freq&) const override { return 0.0; }
};

struct Constant final : SpectrumNode {
    Cplx value;
    explicit Constant(Cplx v) : value(v) { support = v == Cplx(0.0) ? 0.0 : kInf; }
    Cplx eval(const Freq&) const override { return value; }
};

struct Bump final : SpectrumNode {
    Freq center;
    double radius;
    Cplx amp;
    int order;
    Bump(const Freq& c, double r, Cplx a, int k) : center(c), radius(r), amp(a), order(k) {
        support = norm(c) + r;
    }
    Cplx eval(const Freq& xi) const override {
        const double d = std::hypot(xi[0] - center[0], xi[1] - center[1]);
        if (d >= radius) return 0.0;
        const double t = d / radius;
        return amp * std::pow(1.0 - t * t, order);
    }
};

struct Disc final : SpectrumNode {
    double radius;
    Cplx value;
    Disc(double r, Cplx v) : radius(r), value(v) { support = r; }
    Cplx eval(const Freq& xi) const override { return norm(xi) < radius ? value : Cplx(0.0); }
};

struct Sum final : SpectrumNode {
    std::vector<NodePtr> terms;
    explicit Sum(std::vector<NodePtr> t) : terms(std::move(t)) {
        support = 0.0;
        for (const auto& n : terms) support = std::max(support, n->support);
    }
    Cplx eval(const Freq& xi) const override {
        Cplx acc = 0.0;
        for (const auto& n : terms) acc += n->eval(xi);
        return acc;
    }
};

struct Product final : SpectrumNode {
    NodePtr a, b;
    Product(NodePtr x, NodePtr y) : a(std::move(x)), b(std::move(y)) {
        support = std::min(a->support, b->support);
    }
    Cplx eval(const Freq& xi) const override { return a->eval(xi) * b->eval(xi); }
};

struct Dilate final : SpectrumNode {
    NodePtr z;
    double factor, amplitude;
    Dilate(NodePtr n, double f, double amp) : z(std::move(n)), factor(f), amplitude(amp) {
        support = z->support / factor;
    }
    Cplx eval(const Freq& xi) const override {
        return amplitude * z->eval({factor * xi[0], factor * xi[1]});
    }
};

struct Modulate final : SpectrumNode {
    NodePtr z;
    Freq v;
    Modulate(NodePtr n, const Freq& shift) : z(std::move(n)), v(shift) { support = z->support; }
    Cplx eval(const Freq& xi) const override {
        const double phase = -2.0 * std::numbers::pi * (xi[0] * v[0] + xi[1] * v[1]);
        return std::polar(1.0, phase) * z->eval(xi);
    }
};

struct Rotate final : SpectrumNode {
    NodePtr z;
    double c, s;
    Rotate(NodePtr n, double theta) : z(std::move(n)), c(std::cos(theta)), s(std::sin(theta)) {
        support = z->support;
    }
    Cplx eval(const Freq& xi) const override {
        // P_theta^-1 xi
        return z->eval({c * xi[0] + s * xi[1], -s * xi[0] + c * xi[1]});
    }
};

struct Quotient final : SpectrumNode {
    NodePtr num, den;
    double band;
    Quotient(NodePtr n, NodePtr d, double b) : num(std::move(n)), den(std::move(d)), band(b) {
        support = std::min(band, num->support);
    }
    Cplx eval(const Freq& xi) const override {
        if (norm(xi) >= band) return 0.0;
        const Cplx n = num->eval(xi);
        if (n == Cplx(0.0)) return 0.0;
        const Cplx d = den->eval(xi);
        if (d == Cplx(0.0)) throw NumericalError("spectrum quotient: denominator vanishes on the band");
        return n / d;
    }
};

// Angles used to sample a circle: a full dense set in 2-D, +/- axis in 1-D.
std::vector<Freq> circle_directions(int dim) {
    if (dim == 1) return {Freq{1.0, 0.0}, Freq{-1.0, 0.0}};
    constexpr int kAngles = 64;
    std::vector<Freq> out;
    for (int i = 0; i < kAngles; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kAngles;
        out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
}

void check_dim(int dim) {
    if (dim != 1 && dim != 2) throw ValidationError("oracle: dim must be 1 or 2");
}

}  // namespace

SpectrumFn::SpectrumFn() : node_(std::make_shared<Zero>()) {}
SpectrumFn::SpectrumFn(std::shared_ptr<const detail::SpectrumNode> node) : node_(std::move(node)) {}

Cplx SpectrumFn::operator()(const Freq& xi) const {
    if (norm(xi) > node_->support) return 0.0;
    return node_->eval(xi);
}

double SpectrumFn::support() const { return node_->support; }

SpectrumFn SpectrumFn::constant(Cplx value) { return SpectrumFn(std::make_shared<Constant>(value)); }

SpectrumFn SpectrumFn::bump(const Freq& center, double radius, Cplx amp, int order) {
    if (!(radius > 0.0)) throw ValidationError("bump: radius must be positive");
    if (order < 1) throw ValidationError("bump: order must be >= 1");
    return SpectrumFn(std::make_shared<Bump>(center, radius, amp, order));
}

SpectrumFn SpectrumFn::disc(double radius, Cplx value) {
    if (!(radius > 0.0)) throw ValidationError("disc: radius must be positive");
    return SpectrumFn(std::make_shared<Disc>(radius, value));
}

SpectrumFn SpectrumFn::sum(const std::vector<SpectrumFn>& terms) {
    std::vector<NodePtr> nodes;
    for (const auto& t : terms) nodes.push_back(t.node());
    return SpectrumFn(std::make_shared<Sum>(std::move(nodes)));
}

SpectrumFn spectrum_multiply(const SpectrumFn& a, const SpectrumFn& b) {
    return SpectrumFn(std::make_shared<Product>(a.node(), b.node()));
}

SpectrumFn dilate_spectrum(const SpectrumFn& z, double factor, double amplitude) {
    if (!(factor > 0.0)) throw ValidationError("dilate_spectrum: factor must be positive");
    return SpectrumFn(std::make_shared<Dilate>(z.node(), factor, amplitude));
}

SpectrumFn scale_spectrum(const SpectrumFn& z, double s, int power) {
    if (!(s > 0.0)) throw ValidationError("scale_spectrum: s must be positive");
    if (s == 1.0) return z;
    return dilate_spectrum(z, s, std::pow(s, power));
}

SpectrumFn translate_spectrum(const SpectrumFn& z, const Freq& v) {
    return SpectrumFn(std::make_shared<Modulate>(z.node(), v));
}

SpectrumFn rotate_spectrum(const SpectrumFn& z, double theta) {
    return SpectrumFn(std::make_shared<Rotate>(z.node(), theta));
}

SpectrumFn spectrum_quotient(const SpectrumFn& num, const SpectrumFn& den, double band) {
    return SpectrumFn(std::make_shared<Quotient>(num.node(), den.node(), band));
}

FilterSpec FilterSpec::from(const SpectrumFn& spectrum) {
    return {spectrum, spectrum.support(), std::abs(spectrum({0.0, 0.0})) > 0.0};
}

double filter_safe_radius(const FilterSpec& h, double tol, int dim) {
    check_dim(dim);
    if (!(tol > 0.0)) throw ValidationError("theorem2_choose_s: tol must be positive");
    const double dc = std::abs(h.spectrum({0.0, 0.0}));
    if (!h.dc_nonzero || dc == 0.0) throw HypothesisError("theorem2 needs h^(0) != 0");
    const double extent = h.spectrum.support();
    if (!std::isfinite(extent)) throw HypothesisError("theorem2 needs a bandlimited filter");
    const double threshold = tol * dc;
    const auto dirs = circle_directions(dim);
    auto good = [&](double rho) {
        for (const auto& d : dirs)
            if (std::abs(h.spectrum({rho * d[0], rho * d[1]})) < threshold) return false;
        return true;
    };
    constexpr int kRadialSteps = 4096;
    const double step = extent / kRadialSteps;
    double lo = 0.0, hi = extent;
    for (int k = 1; k <= kRadialSteps; ++k) {
        if (!good(k * step)) {
            hi = k * step;
            break;
        }
        lo = k * step;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (good(mid) ? lo : hi) = mid;
    }
    if (!(lo > 0.0)) throw HypothesisError("theorem2: h^ drops below tolerance arbitrarily close to 0");
    return lo;
}

double theorem2_choose_s(const FilterSpec& h, double xi_phi, double tol, int dim) {
    if (!(xi_phi > 0.0)) throw ValidationError("theorem2_choose_s: xi_phi must be positive");
    return xi_phi / filter_safe_radius(h, tol, dim);
}

SpectrumFn theorem2_recover(const SpectrumFn& y, const FilterSpec& h, const FilterSpec& phi, double s,
                            int power, double tol) {
    if (!(s > 0.0)) throw ValidationError("theorem2_recover: s must be positive");
    const double xi_phi = phi.bandwidth;
    const double dc = std::abs(h.spectrum({0.0, 0.0}));
    if (dc == 0.0) throw HypothesisError("theorem2 needs h^(0) != 0");
    // The denominator is h^(xi/s) for |xi| < xi_phi, i.e. h^ on radius < xi_phi / s.
    const double reach = xi_phi / s;
    const auto dirs = circle_directions(2);
    constexpr int kRadialSteps = 512;
    for (int k = 0; k < kRadialSteps; ++k) {
        const double rho = reach * k / kRadialSteps;
        for (const auto& d : dirs) {
            if (std::abs(h.spectrum({rho * d[0], rho * d[1]})) < tol * dc) {
                throw HypothesisError("theorem2_recover: h^(xi/s) falls below tolerance at |xi/s| = " +
                                      format_number(rho) + "; choose a larger s");
            }
        }
    }
    auto num = spectrum_multiply(phi.spectrum, dilate_spectrum(y, 1.0 / s, 1.0));
    auto den = dilate_spectrum(h.spectrum, 1.0 / s, std::pow(s, power));
    return spectrum_quotient(num, den, xi_phi);
}

SpectrumFn random_seed_spectrum(Rng& rng, double max_support, int pairs, int dim) {
    check_dim(dim);
    std::vector<SpectrumFn> terms;
    for (int p = 0; p < pairs; ++p) {
        const double radius = rng.uniform(0.15, 0.5) * max_support;
        const double offset = rng.uniform(0.0, 1.0) * (max_support - radius);
        const double angle = dim == 2 ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
        const Freq c{offset * std::cos(angle), offset * std::sin(angle)};
        const Cplx amp(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const int order = static_cast<int>(rng.uniform_int(2, 4));
        terms.push_back(SpectrumFn::bump(c, radius, amp, order));
        terms.push_back(SpectrumFn::bump({-c[0], -c[1]}, radius, std::conj(amp), order));
    }
    return SpectrumFn::sum(terms);
}

std::vector<Freq> sample_frequencies(Rng& rng, std::size_t count, double radius, int dim) {
    check_dim(dim);
    std::vector<Freq> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (dim == 1) {
            out.push_back({rng.uniform(-radius, radius), 0.0});
        } else {
            const double rho = radius * std::sqrt(rng.uniform());
            const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
            out.push_back({rho * std::cos(a), rho * std::sin(a)});
        }
    }
    return out;
}

double relative_mismatch(const SpectrumFn& a, const SpectrumFn& b, const std::vector<Freq>& samples) {
    double diff = 0.0, scale = 0.0;
    for (const auto& xi : samples) {
        const Cplx vb = b(xi);
        diff = std::max(diff, std::abs(a(xi) - vb));
        scale = std::max(scale, std::abs(vb));
    }
    return scale > 0.0 ? diff / scale : diff;
}

double Theorem2Report::max_mismatch() const {
    return std::max(mismatch_recovered_in_x, mismatch_x_in_recovered);
}

Theorem2Report theorem2_set_check(const std::vector<SpectrumFn>& seeds, const FilterSpec& h,
                                  const FilterSpec& phi, const std::vector<double>& scale_grid,
                                  std::uint64_t sample_seed, std::size_t samples, int dim) {
    check_dim(dim);
    if (seeds.empty()) throw ValidationError("theorem2_set_check: need at least one seed spectrum");
    if (scale_grid.empty()) throw ValidationError("theorem2_set_check: empty scale grid");
    Theorem2Report rep;
    rep.dim = dim;
    rep.xi_phi = phi.bandwidth;
    rep.r_h = filter_safe_radius(h, 1e-6, dim);
    rep.s = rep.xi_phi / rep.r_h;
    rep.seeds = seeds.size();
    rep.samples = samples;
    // Z holds every seed at scales t, t/s and t*s for t in the grid, so both
    // inclusions can be matched by index.
    rep.set_size = seeds.size() * scale_grid.size() * 3;

    Rng rng(sample_seed, streams::kSplit);
    const auto freqs = sample_frequencies(rng, samples, 1.25 * rep.xi_phi, dim);
    auto member = [&](const SpectrumFn& seed, double t) { return scale_spectrum(seed, t, dim); };
    auto measure = [&](const SpectrumFn& z) { return spectrum_multiply(h.spectrum, z); };
    auto target = [&](const SpectrumFn& z) { return spectrum_multiply(phi.spectrum, z); };
    for (const auto& seed : seeds) {
        for (double t : scale_grid) {
            const auto z_t = member(seed, t);
            const auto x_y = theorem2_recover(measure(z_t), h, phi, rep.s, dim);
            rep.mismatch_recovered_in_x = std::max(
                rep.mismatch_recovered_in_x, relative_mismatch(x_y, target(member(seed, t / rep.s)), freqs));

            const auto x_from_scaled = theorem2_recover(measure(member(seed, t * rep.s)), h, phi, rep.s, dim);
            rep.mismatch_x_in_recovered =
                std::max(rep.mismatch_x_in_recovered, relative_mismatch(x_from_scaled, target(z_t), freqs));

            const auto x_p1 = theorem2_recover(measure(z_t), h, phi, rep.s, 1);
            rep.mismatch_power1 =
                std::max(rep.mismatch_power1, relative_mismatch(x_p1, target(member(seed, t / rep.s)), freqs));
        }
    }
    return rep;
}

bool Theorem1Report::passed() const {
    return witness_in_x2 && !witness_in_x1 && translation_preserves_support && rotation_preserves_support &&
           phase_modulus_error < 1e-12 && rotation_value_error < 1e-12 && measurement_energy_above_xi_h == 0.0;
}

Theorem1Report theorem1_counterexample(const FilterSpec& h, const FilterSpec& phi, std::uint64_t seed,
                                       std::size_t members, std::size_t samples) {
    Theorem1Report rep;
    rep.xi_h = h.bandwidth;
    rep.xi_phi = phi.bandwidth;
    if (!(rep.xi_h < rep.xi_phi)) {
        throw HypothesisError("theorem1 construction needs xi_h < xi_phi (got xi_h = " +
                              format_number(rep.xi_h) + ", xi_phi = " + format_number(rep.xi_phi) + ")");
    }
    // Witness x = phi * phi, i.e. phi^ phi^ in frequency.
    const auto witness = spectrum_multiply(phi.spectrum, phi.spectrum);
    rep.witness_support = witness.support();
    const auto dirs = circle_directions(2);
    constexpr int kRadii = 256;
    for (int k = 1; k < kRadii; ++k) {
        const double rho = rep.xi_h + (rep.xi_phi - rep.xi_h) * k / kRadii;
        for (const auto& d : dirs) {
            rep.witness_energy_above_xi_h =
                std::max(rep.witness_energy_above_xi_h, std::abs(witness({rho * d[0], rho * d[1]})));
        }
    }
    // X2 = {phi * z : z arbitrary} contains phi * phi by construction; X1
    // members have bandwidth <= xi_h, so nonzero energy above xi_h excludes it.
    rep.witness_in_x2 = true;
    rep.witness_in_x1 = !(rep.witness_energy_above_xi_h > 0.0);

    Rng rng(seed, streams::kSplit);
    const auto freqs = sample_frequencies(rng, samples, 1.5 * rep.xi_phi);
    rep.translation_preserves_support = true;
    rep.rotation_preserves_support = true;
    rep.members = members;
    for (std::size_t m = 0; m < members; ++m) {
        const auto z = random_seed_spectrum(rng, rep.xi_h);
        const Freq v{rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)};
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const auto zt = translate_spectrum(z, v);
        const auto zr = rotate_spectrum(z, theta);
        rep.translation_preserves_support &= zt.support() == z.support() && z.support() <= rep.xi_h;
        rep.rotation_preserves_support &= zr.support() == z.support();
        const auto y = spectrum_multiply(h.spectrum, z);
        const double c = std::cos(theta), s = std::sin(theta);
        for (const auto& xi : freqs) {
            const Cplx base = z(xi);
            if (base != Cplx(0.0)) {
                rep.phase_modulus_error =
                    std::max(rep.phase_modulus_error, std::abs(std::abs(zt(xi) / base) - 1.0));
            }
            const Freq rotated{c * xi[0] - s * xi[1], s * xi[0] + c * xi[1]};
            rep.rotation_value_error = std::max(rep.rotation_value_error, std::abs(zr(rotated) - base));
            if (norm(xi) > rep.xi_h) {
                rep.measurement_energy_above_xi_h = std::max(rep.measurement_energy_above_xi_h, std::abs(y(xi)));
            }
        }
    }
    return rep;
}

nlohmann::json to_json(const Theorem2Report& r) {
    return {{"demo", "theorem2"},
            {"dim", r.dim},
            {"s", r.s},
            {"R_h", r.r_h},
            {"xi_phi", r.xi_phi},
            {"seeds", r.seeds},
            {"set_size", r.set_size},
            {"samples", r.samples},
            {"mismatch_recovered_in_x", r.mismatch_recovered_in_x},
            {"mismatch_x_in_recovered", r.mismatch_x_in_recovered},
            {"max_mismatch", r.max_mismatch()},
            {"mismatch_jacobian_power_1", r.mismatch_power1},
            {"exact_convention", r.mismatch_power1 < r.threshold ? "s^1 and s^dim" : "s^dim"},
            {"threshold", r.threshold},
            {"passed", r.passed()}};
}

nlohmann::json to_json(const Theorem1Report& r) {
    return {{"demo", "theorem1"},
            {"xi_h", r.xi_h},
            {"xi_phi", r.xi_phi},
            {"witness", "phi*phi"},
            {"witness_support", r.witness_support},
            {"witness_energy_above_xi_h", r.witness_energy_above_xi_h},
            {"witness_in_X2", r.witness_in_x2},
            {"witness_in_X1", r.witness_in_x1},
            {"translation_preserves_support", r.translation_preserves_support},
            {"rotation_preserves_support", r.rotation_preserves_support},
            {"phase_modulus_error", r.phase_modulus_error},
            {"rotation_value_error", r.rotation_value_error},
            {"measurement_energy_above_xi_h", r.measurement_energy_above_xi_h},
            {"members", r.members},
            {"passed", r.passed()}};
}

void write_radial_profiles(std::ostream& out, const std::vector<std::pair<std::string, SpectrumFn>>& fns,
                           double radius, std::size_t points) {
    out << "radius";
    for (const auto& [name, f] : fns) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < points; ++i) {
        const double rho = points > 1 ? radius * static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
        out << format_number(rho);
        for (const auto& [name, f] : fns) out << ',' << format_number(std::abs(f({rho, 0.0})));
        out << '\n';
    }
}

std::vector<Cplx> render_spectrum(const SpectrumFn& f, std::size_t n) {
    std::vector<Cplx> out(n * n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[i * n + j] = f({static_cast<double>(fft::signed_bin(i, n)) / dn,
                                static_cast<double>(fft::signed_bin(j, n)) / dn});
    return out;
}

}  // namespace sei
