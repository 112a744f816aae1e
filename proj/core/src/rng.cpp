#include "sei/rng.hpp"

#include <sstream>

#include "sei/error.hpp"

namespace sei {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(stream),
                         static_cast<std::uint32_t>(stream >> 32), 0x5e1u};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    auto seq = make_seed_seq(seed, stream);
    engine_.seed(seq);
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return normal_(engine_); }

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double Rng::rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

std::string Rng::state() const {
    std::ostringstream os;
    os << engine_ << ' ' << normal_;
    return os.str();
}

void Rng::set_state(const std::string& state) {
    std::istringstream is(state);
    is >> engine_ >> normal_;
    if (!is) {
        throw ValidationError("malformed rng state");
    }
}

bool Rng::operator==(const Rng& other) const {
    return engine_ == other.engine_ && normal_ == other.normal_;
}

}  // namespace sei
