#include "aupipe/rng.hpp"

#include <cmath>
#include <cstring>

#include "aupipe/error.hpp"

namespace aupipe {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) throw ValueError("uniform_int: n must be > 0");
    // Lemire's multiply-shift rejection method.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = -n % n;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

bool Rng::bernoulli(double p) {
    return uniform() < p;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::array<std::uint64_t, 6> Rng::state() const {
    std::array<std::uint64_t, 6> st{};
    for (int i = 0; i < 4; ++i) st[static_cast<std::size_t>(i)] = s_[static_cast<std::size_t>(i)];
    st[4] = has_cached_ ? 1U : 0U;
    std::memcpy(&st[5], &cached_, sizeof(double));
    return st;
}

void Rng::restore(const std::array<std::uint64_t, 6>& st) {
    for (int i = 0; i < 4; ++i) s_[static_cast<std::size_t>(i)] = st[static_cast<std::size_t>(i)];
    has_cached_ = st[4] != 0;
    std::memcpy(&cached_, &st[5], sizeof(double));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t x = base ^ fnv1a64(label);
    return splitmix64(x);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index) {
    std::uint64_t x = derive_seed(base, label) ^ (index * 0x9E3779B97F4A7C15ULL);
    return splitmix64(x);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t a,
                          std::uint64_t b) {
    std::uint64_t x = derive_seed(base, label, a) ^ (b * 0xD1B54A32D192ED03ULL);
    return splitmix64(x);
}

}  // namespace aupipe
