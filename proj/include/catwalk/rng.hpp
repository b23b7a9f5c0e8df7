#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace catwalk
{
//! Master seed used when neither --seed nor CATWALK_SEED is given.
inline constexpr std::uint64_t kDefaultMasterSeed = 20190417;

//! Environment variable overriding the master seed.
inline constexpr char const* kSeedEnvVar = "CATWALK_SEED";

/*!
 * Identity of one random stream.
 *
 * Streams are addressed by index rather than carved out of one sequence, so
 * replicate i always sees the same variates no matter which worker runs it.
 */
struct SeedSpec
{
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::uint64_t stream_index = 0;

    friend bool operator==(SeedSpec const&, SeedSpec const&) = default;
};

//! SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/*!
 * Derive an experiment-specific master seed from a parent seed and a label.
 *
 * The label is hashed with FNV-1a and combined with the parent through
 * mix64, so two experiments sharing a master seed never share streams.
 */
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

//! Seed resolution order: explicit value, then CATWALK_SEED, then default.
std::uint64_t resolve_master_seed(std::uint64_t const* explicit_seed);

namespace philox
{
using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

//! Philox4x64 with 10 rounds (Salmon et al., Random123).
Counter philox4x64_10(Counter counter, Key key);
}  // namespace philox

/*!
 * Counter-based random stream.
 *
 * Block b of stream s under master seed m is
 * philox4x64_10(counter = {b, 0, s, 0}, key = {m, 0}); each block yields
 * four 64-bit words. Satisfies UniformRandomBitGenerator.
 */
class Stream
{
  public:
    using result_type = std::uint64_t;

    explicit Stream(SeedSpec seed);
    Stream(std::uint64_t master_seed, std::uint64_t stream_index)
        : Stream(SeedSpec{master_seed, stream_index})
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()()
    {
        if (pos_ == 4)
        {
            refill();
        }
        return buffer_[pos_++];
    }

    //! Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    //! Uniform on (0, 1].
    double uniform_open_zero() { return 1.0 - uniform01(); }

    SeedSpec const& seed() const { return seed_; }

    //! Number of 64-bit words consumed so far.
    std::uint64_t words_consumed() const { return block_ * 4 - (4 - pos_); }

  private:
    void refill();

    SeedSpec seed_;
    std::uint64_t block_ = 0;
    philox::Counter buffer_{};
    int pos_ = 4;
};

//---------------------------------------------------------------------------//
// Variate generators. All throw ParameterError on invalid parameters.
//---------------------------------------------------------------------------//

int draw_bernoulli(Stream& stream, double q);

//! Exact binomial law; n may be as large as 10^9.
std::int64_t draw_binomial(Stream& stream, std::int64_t n, double q);

/*!
 * Exact Poisson law.
 *
 * Means below 10 use sequential inversion; larger means use the PTRD
 * transformed-rejection sampler. Both are exact.
 */
std::int64_t draw_poisson(Stream& stream, double mean);

//! Trials up to and including the first success, success probability s.
std::int64_t draw_geometric(Stream& stream, double s);

double draw_exponential(Stream& stream, double rate);
}  // namespace catwalk
