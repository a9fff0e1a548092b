#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evstudy {

/// Identity of the outcome-noise generator, echoed in CLI metadata.
inline constexpr std::string_view kGeneratorName = "mt19937_64/box-muller/splitmix64-seeds";

/// Independent seed streams. Each consumer derives its seeds from a user seed
/// through its own stream tag so the streams never overlap.
enum class SeedStream : std::uint64_t {
    Dgp = 0x6467700000000001ULL,
    Bootstrap = 0x626f6f7400000002ULL,
    MonteCarlo = 0x6d63647200000003ULL,
};

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// seed_k = mix64(mix64(seed ^ stream) + k). Pure function of its inputs, so the
/// k-th task gets the same seed regardless of execution schedule.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream,
                                                  std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ static_cast<std::uint64_t>(stream)) + index);
}

/// Unbiased index in [0, n) by rejection on the top of the 64-bit range.
/// std::uniform_int_distribution is avoided because its algorithm differs
/// between standard libraries.
[[nodiscard]] inline std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine();
    while (x >= limit) x = engine();
    return x % n;
}

/// Standard normal variates from std::mt19937_64 (whose output sequence is fixed
/// by the standard) via the Box-Muller transform, consuming two 53-bit uniforms
/// per pair of variates.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] double operator()();

    /// Uniform on the half-open interval (0, 1].
    [[nodiscard]] double uniform_open0() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    [[nodiscard]] std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace evstudy
